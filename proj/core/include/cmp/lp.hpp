#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "cmp/dense.hpp"
#include "cmp/linalg.hpp"
#include "cmp/numeric_policy.hpp"
#include "cmp/rational.hpp"

namespace cmp {

enum class LpStatus { Feasible, Infeasible, Ambiguous };
std::string_view to_string(LpStatus s);

// E x = d, x >= 0, and sum_{i in strict_group} x_i >= 1 when the group is nonempty.
template <class T>
struct FeasibilitySystem {
  DMat<T> e;
  DVec<T> d;
  std::vector<int> strict_group;
};

template <class T>
struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  DVec<T> x;                    // meaningful when status == Feasible
  T phase1_objective = T(0);    // sum of artificial variables at the phase-1 optimum
  int pivots = 0;
};

// Dense-tableau phase-1 simplex with Bland's rule. In double precision the
// phase-1 optimum is classified against policy.lp_feasible_below and
// policy.lp_infeasible_above; in rational mode only an exact zero is feasible.
// Throws CycleLimit past 50000 pivots.
template <class T>
LpResult<T> solve_feasibility(const FeasibilitySystem<T>& sys, const NumericPolicy& policy = {});

extern template LpResult<double> solve_feasibility(const FeasibilitySystem<double>&, const NumericPolicy&);
extern template LpResult<Rational> solve_feasibility(const FeasibilitySystem<Rational>&, const NumericPolicy&);

// Witness x or nullopt when infeasible. Throws NumericallyAmbiguous inside the band.
std::optional<Vec> feasible_eq_nonneg(const FeasibilitySystem<double>& sys, const NumericPolicy& policy = {});
std::optional<RVec> feasible_eq_nonneg(const FeasibilitySystem<Rational>& sys);

template <class T>
struct MotzkinWitness {
  bool exists = false;
  DVec<T> u;
  DVec<T> w;
};

// u + D_sigma H w = 0 with u >= 0, 1^T u >= 1, w >= 0.
MotzkinWitness<double> motzkin_alternative(const Mat& h, const std::vector<int>& sigma,
                                           const NumericPolicy& policy = {});
MotzkinWitness<Rational> motzkin_alternative(const RMat& h, const std::vector<int>& sigma);

}  // namespace cmp
