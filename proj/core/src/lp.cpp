#include "cmp/lp.hpp"

#include <string>

#include "cmp/error.hpp"

namespace cmp {

std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Feasible: return "Feasible";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Ambiguous: return "Ambiguous";
  }
  return "Unknown";
}

namespace {

constexpr int kMaxPivots = 50000;

template <class T>
bool is_negative(const T& v) {
  if constexpr (is_exact_v<T>) {
    return v < 0;
  } else {
    return v < -1e-12;
  }
}

template <class T>
bool is_positive(const T& v) {
  if constexpr (is_exact_v<T>) {
    return v > 0;
  } else {
    return v > 1e-12;
  }
}

}  // namespace

template <class T>
LpResult<T> solve_feasibility(const FeasibilitySystem<T>& sys, const NumericPolicy& policy) {
  const int p = static_cast<int>(sys.e.rows());
  const int q = static_cast<int>(sys.e.cols());
  if (sys.d.size() != p) fail(ErrorCode::InvalidArgument, "right-hand side length does not match E");
  for (int g : sys.strict_group)
    if (g < 0 || g >= q) fail(ErrorCode::InvalidArgument, "strict group index out of range");

  const bool strict = !sys.strict_group.empty();
  const int rows = p + (strict ? 1 : 0);
  const int structural = q + (strict ? 1 : 0);  // x plus the surplus of the normalization row
  const int cols = structural + rows;           // plus one artificial per row
  // Tableau: rows x (cols + 1), last column is the right-hand side.
  DMat<T> tab = DMat<T>::Zero(rows, cols + 1);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) tab(i, j) = sys.e(i, j);
    tab(i, cols) = sys.d(i);
  }
  if (strict) {
    for (int g : sys.strict_group) tab(p, g) = T(1);
    tab(p, q) = T(-1);
    tab(p, cols) = T(1);
  }
  for (int i = 0; i < rows; ++i) {
    if (tab(i, cols) < 0) tab.row(i) = -tab.row(i);
    tab(i, structural + i) = T(1);
  }
  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) basis[i] = structural + i;

  // Reduced costs of the phase-1 objective sum(artificials).
  DVec<T> cost = DVec<T>::Zero(cols + 1);
  for (int i = 0; i < rows; ++i) cost -= tab.row(i).transpose();
  for (int i = 0; i < rows; ++i) cost(structural + i) = T(0);

  LpResult<T> res;
  while (true) {
    int enter = -1;
    for (int j = 0; j < structural; ++j)
      if (is_negative(cost(j))) {
        enter = j;
        break;
      }
    if (enter < 0) break;
    int leave = -1;
    T best_ratio = T(0);
    for (int i = 0; i < rows; ++i) {
      if (!is_positive(tab(i, enter))) continue;
      const T ratio = tab(i, cols) / tab(i, enter);
      if (leave < 0 || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0) break;  // unbounded direction cannot occur for a bounded-below phase-1 objective
    if (++res.pivots > kMaxPivots) fail(ErrorCode::CycleLimit, "phase-1 simplex exceeded the pivot budget");
    const T piv = tab(leave, enter);
    tab.row(leave) /= piv;
    for (int i = 0; i < rows; ++i) {
      if (i == leave) continue;
      const T f = tab(i, enter);
      if (f == T(0)) continue;
      tab.row(i) -= f * tab.row(leave);
    }
    const T f = cost(enter);
    cost -= f * tab.row(leave).transpose();
    basis[leave] = enter;
  }

  T obj = T(0);
  for (int i = 0; i < rows; ++i)
    if (basis[i] >= structural) obj += tab(i, cols);
  res.phase1_objective = obj;
  res.x = DVec<T>::Zero(q);
  for (int i = 0; i < rows; ++i)
    if (basis[i] < q) res.x(basis[i]) = tab(i, cols);

  if constexpr (is_exact_v<T>) {
    res.status = obj == 0 ? LpStatus::Feasible : LpStatus::Infeasible;
  } else {
    // Scale the objective by the data magnitude so that the classification is unit-free.
    double scale = 1.0;
    for (int i = 0; i < p; ++i) scale = std::max(scale, std::abs(sys.d(i)));
    const double o = obj / scale;
    if (o <= policy.lp_feasible_below) {
      const double viol = p > 0 ? (sys.e * res.x - sys.d).cwiseAbs().maxCoeff() : 0.0;
      res.status = viol <= 1e-9 * scale ? LpStatus::Feasible : LpStatus::Ambiguous;
    } else if (o > policy.lp_infeasible_above) {
      res.status = LpStatus::Infeasible;
    } else {
      res.status = LpStatus::Ambiguous;
    }
  }
  return res;
}

template LpResult<double> solve_feasibility(const FeasibilitySystem<double>&, const NumericPolicy&);
template LpResult<Rational> solve_feasibility(const FeasibilitySystem<Rational>&, const NumericPolicy&);

std::optional<Vec> feasible_eq_nonneg(const FeasibilitySystem<double>& sys, const NumericPolicy& policy) {
  const LpResult<double> r = solve_feasibility(sys, policy);
  if (r.status == LpStatus::Ambiguous)
    fail(ErrorCode::NumericallyAmbiguous,
         "phase-1 optimum " + std::to_string(r.phase1_objective) + " lies inside the ambiguity band");
  if (r.status == LpStatus::Infeasible) return std::nullopt;
  return r.x;
}

std::optional<RVec> feasible_eq_nonneg(const FeasibilitySystem<Rational>& sys) {
  const LpResult<Rational> r = solve_feasibility(sys);
  if (r.status == LpStatus::Infeasible) return std::nullopt;
  return r.x;
}

namespace {

template <class T>
FeasibilitySystem<T> motzkin_system(const DMat<T>& h, const std::vector<int>& sigma) {
  const int n = static_cast<int>(h.rows());
  const int k = static_cast<int>(h.cols());
  if (static_cast<int>(sigma.size()) != n) fail(ErrorCode::InvalidArgument, "sign pattern length mismatch");
  FeasibilitySystem<T> sys;
  sys.e = DMat<T>::Zero(n, n + k);
  for (int i = 0; i < n; ++i) {
    if (sigma[i] != 1 && sigma[i] != -1) fail(ErrorCode::InvalidArgument, "sign pattern entries must be +-1");
    sys.e(i, i) = T(1);
    for (int c = 0; c < k; ++c) sys.e(i, n + c) = sigma[i] > 0 ? h(i, c) : T(-h(i, c));
  }
  sys.d = DVec<T>::Zero(n);
  for (int i = 0; i < n; ++i) sys.strict_group.push_back(i);
  return sys;
}

template <class T>
MotzkinWitness<T> split_witness(const DVec<T>& x, int n) {
  MotzkinWitness<T> out;
  out.exists = true;
  out.u = x.head(n);
  out.w = x.tail(x.size() - n);
  return out;
}

}  // namespace

MotzkinWitness<double> motzkin_alternative(const Mat& h, const std::vector<int>& sigma, const NumericPolicy& policy) {
  const std::optional<Vec> x = feasible_eq_nonneg(motzkin_system<double>(h, sigma), policy);
  if (!x) return {};
  return split_witness<double>(*x, static_cast<int>(h.rows()));
}

MotzkinWitness<Rational> motzkin_alternative(const RMat& h, const std::vector<int>& sigma) {
  const std::optional<RVec> x = feasible_eq_nonneg(motzkin_system<Rational>(h, sigma));
  if (!x) return {};
  return split_witness<Rational>(*x, static_cast<int>(h.rows()));
}

}  // namespace cmp
