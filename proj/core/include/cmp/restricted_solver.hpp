#pragma once

#include "cmp/constraint.hpp"
#include "cmp/linalg.hpp"
#include "cmp/numeric_policy.hpp"

namespace cmp {

struct RestrictedSolution {
  Vec x;                      // length N, exact zeros outside J
  double objective = 0.0;     // ||Ax - y||^2
  double kkt_residual = 0.0;  // optimality certificate, see kkt_residual()
  bool unique = true;
};

struct SolverOptions {
  NumericPolicy policy{};
  bool require_unique = false;   // throw RankDeficient instead of returning a non-unique minimizer
  int simplex_max_iter = 100000;
  double simplex_tol = 1e-8;
};

// min ||Aw - y||^2 subject to w in P and supp(w) in J.
RestrictedSolution solve_restricted(const Mat& a, const Vec& y, const ConstraintModel& p, const IndexSet& j,
                                    const SolverOptions& opt = {});

// Lawson-Hanson nonnegative least squares with the Bro-De Jong guard on newly
// added indices. Throws CycleLimit after 3 * cols outer loops.
Vec nnls(const Mat& a, const Vec& y, const NumericPolicy& policy = {});

// Bounded-variable least squares, lo <= x <= hi with lo <= 0 <= hi (entries may be infinite).
Vec bvls(const Mat& a, const Vec& y, const Vec& lo, const Vec& hi, const NumericPolicy& policy = {});

// Euclidean projection onto {x >= 0 : w^T x <= cap}.
Vec project_weighted_simplex(const Vec& z, const Vec& w, double cap);

// Box/cone: max_i |x_i - clamp(x_i - g_i)| with g = A_J^T (A_J x_J - y).
// Simplex: ||x_J - Proj(x_J - g / L)||_inf with L = lambda_max(A_J^T A_J).
// Hyperplane: sup-norm of g projected onto the feasible subspace.
// Nonconvex demo: not defined, returns 0.
double kkt_residual(const Mat& a, const Vec& y, const ConstraintModel& p, const IndexSet& j, const Vec& x);

}  // namespace cmp
