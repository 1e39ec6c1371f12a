#pragma once

#include <vector>

#include "cmp/constraint.hpp"
#include "cmp/linalg.hpp"

namespace cmp::oracle {

struct L0Solution {
  int cardinality = 0;
  std::vector<IndexSet> supports;   // every minimal-cardinality feasible support
  std::vector<Vec> representatives; // one feasible x per support
  long subproblems_solved = 0;
};

// Exhaustive search for min ||x||_0 s.t. Ax = y, x in P. Throws BudgetExceeded
// when sum_k C(N, k) > 1e6 and NoSolutionWithinKmax when no support of size <= k_max fits.
L0Solution l0_brute(const Mat& a, const Vec& y, const ConstraintModel& p, int k_max);

struct NonconvexSolution {
  enum class Kind { Unique, Segment };
  Kind kind = Kind::Unique;
  Vec p;  // the unique minimizer, or the segment endpoint with the larger x2
  Vec q;  // the other segment endpoint (equal to p for Kind::Unique)
  double objective = 0.0;
};

// Restricted least squares over the nonconvex demo set for |J| <= 2, by grid
// search on [0, 1.5]^2 followed by local refinement to 1e-8.
NonconvexSolution nonconvex_line7_solve(const Mat& a, const Vec& y, const IndexSet& j);

}  // namespace cmp::oracle
