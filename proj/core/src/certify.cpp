#include "cmp/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cmp/error.hpp"
#include "cmp/lp.hpp"
#include "cmp/pursuit.hpp"
#include "cmp/random.hpp"
#include "cmp/restricted_solver.hpp"

namespace cmp {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Fails: return "Fails";
    case Verdict::UndecidedSampled: return "UndecidedSampled";
  }
  return "Unknown";
}

std::string_view to_string(MarginState s) {
  switch (s) {
    case MarginState::Positive: return "Positive";
    case MarginState::Boundary: return "Boundary";
    case MarginState::Negative: return "Negative";
  }
  return "Unknown";
}

std::string_view to_string(ArithmeticMode m) {
  switch (m) {
    case ArithmeticMode::Float: return "float";
    case ArithmeticMode::Rational: return "rational";
  }
  return "unknown";
}

Margin make_margin(double value, const NumericPolicy& policy) {
  Margin m;
  m.value = value;
  if (std::abs(value) <= policy.boundary_tol)
    m.state = MarginState::Boundary;
  else
    m.state = value > 0 ? MarginState::Positive : MarginState::Negative;
  return m;
}

Margin make_margin(const Rational& value, const NumericPolicy& policy) {
  Margin m = make_margin(to_double(value), policy);
  m.exact = to_string(value);
  return m;
}

bool ConditionReport::has_boundary() const {
  return std::any_of(margins.begin(), margins.end(),
                     [](const auto& kv) { return kv.second.state == MarginState::Boundary; });
}

bool CertificateBundle::has_boundary() const {
  return std::any_of(conditions.begin(), conditions.end(), [](const ConditionReport& c) { return c.has_boundary(); });
}

const ConditionReport* CertificateBundle::find(std::string_view id) const {
  for (const ConditionReport& c : conditions)
    if (c.condition_id == id) return &c;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Exact recovery condition

template <class T>
ErcData<T> erc_from_gram(const DMat<T>& g, const IndexSet& s) {
  const int n = static_cast<int>(g.rows());
  const IndexSet sc = complement(n, s);
  ErcData<T> out;
  out.gss_inv = inverse(submatrix(g, s, s));
  out.coeff = out.gss_inv * submatrix(g, s, sc);
  out.norm = T(0);
  for (Eigen::Index c = 0; c < out.coeff.cols(); ++c) {
    T sum = T(0);
    for (Eigen::Index r = 0; r < out.coeff.rows(); ++r) sum += abs_value(out.coeff(r, c));
    if (sum > out.norm) out.norm = sum;
  }
  return out;
}

template ErcData<double> erc_from_gram(const DMat<double>&, const IndexSet&);
template ErcData<Rational> erc_from_gram(const DMat<Rational>&, const IndexSet&);

double erc_norm(const Mat& a, const IndexSet& s, const NumericPolicy& policy) {
  if (s.empty()) fail(ErrorCode::InvalidArgument, "support must be nonempty");
  if (!full_column_rank(columns(a, s), policy)) fail(ErrorCode::RankDeficient, "A_S is rank deficient");
  return erc_from_gram<double>(gram(a).theta, s).norm;
}

Rational erc_norm_exact(const RMat& g, const IndexSet& s) {
  if (s.empty()) fail(ErrorCode::InvalidArgument, "support must be nonempty");
  return erc_from_gram<Rational>(g, s).norm;
}

// ---------------------------------------------------------------------------
// Dominance

namespace {

template <class T>
std::vector<DVec<T>> forms(const DMat<T>& rows, const std::vector<RowKind>& kinds) {
  if (static_cast<Eigen::Index>(kinds.size()) != rows.rows())
    fail(ErrorCode::InvalidArgument, "row kinds do not match the row count");
  std::vector<DVec<T>> out;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const DVec<T> r = rows.row(i).transpose();
    if (kinds[i] != RowKind::Minus) out.push_back(r);
    if (kinds[i] != RowKind::Plus) out.push_back(-r);
  }
  return out;
}

template <class T>
T score(const DVec<T>& r, RowKind kind, const DVec<T>& v) {
  const T d = r.dot(v);
  switch (kind) {
    case RowKind::Abs: return abs_value(d);
    case RowKind::Plus: return d > 0 ? d : T(0);
    case RowKind::Minus: return d < 0 ? T(-d) : T(0);
  }
  return T(0);
}

template <class T>
T max_score(const DMat<T>& rows, const std::vector<RowKind>& kinds, const DVec<T>& v) {
  T best = T(0);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const T s = score<T>(rows.row(i).transpose(), kinds[i], v);
    if (s > best) best = s;
  }
  return best;
}

template <class T>
T gap_impl(const DominanceProblem<T>& prob, const DVec<T>& v) {
  return max_score(prob.p, prob.p_kind, v) - max_score(prob.q, prob.q_kind, v);
}

// One failure system for a sign pattern and a target form c (nullopt: the zero target).
// Failure: sigma_i v_i > 0, c.v > 0, (c - l).v >= 0 for every P form l;
// zero target: sigma_i v_i > 0, -l.v >= 0 for every P form l.
template <class T>
struct FailureSystem {
  std::vector<int> sigma;
  std::optional<DVec<T>> target;
  std::vector<DVec<T>> weak;  // rows b with b.v >= 0
};

template <class T>
FeasibilitySystem<T> primal_system(const FailureSystem<T>& f, int n) {
  // v = sigma (1 + t), t >= 0; one surplus per inequality row.
  const int rows = static_cast<int>(f.weak.size()) + (f.target ? 1 : 0);
  FeasibilitySystem<T> sys;
  sys.e = DMat<T>::Zero(rows, n + rows);
  sys.d = DVec<T>::Zero(rows);
  int r = 0;
  auto add = [&](const DVec<T>& b, const T& rhs) {
    T base = T(0);
    for (int i = 0; i < n; ++i) {
      const T coef = f.sigma[i] > 0 ? b(i) : T(-b(i));
      sys.e(r, i) = coef;
      base += coef;
    }
    sys.e(r, n + r) = T(-1);
    sys.d(r) = rhs - base;
    ++r;
  };
  if (f.target) add(*f.target, T(1));
  for (const DVec<T>& b : f.weak) add(b, T(0));
  return sys;
}

template <class T>
FeasibilitySystem<T> alternative_system(const FailureSystem<T>& f, int n) {
  // z_i sigma_i e_i + z_c c + sum_b y_b b = 0 with z, y >= 0 and sum z >= 1.
  const int strict = n + (f.target ? 1 : 0);
  const int cols = strict + static_cast<int>(f.weak.size());
  FeasibilitySystem<T> sys;
  sys.e = DMat<T>::Zero(n, cols);
  sys.d = DVec<T>::Zero(n);
  for (int i = 0; i < n; ++i) sys.e(i, i) = T(f.sigma[i]);
  if (f.target) sys.e.col(n) = *f.target;
  for (std::size_t b = 0; b < f.weak.size(); ++b) sys.e.col(strict + static_cast<int>(b)) = f.weak[b];
  for (int g = 0; g < strict; ++g) sys.strict_group.push_back(g);
  return sys;
}

template <class T>
std::vector<FailureSystem<T>> failure_systems(const DominanceProblem<T>& prob) {
  const int n = static_cast<int>(prob.p.cols());
  if (prob.q.rows() > 0 && prob.q.cols() != n) fail(ErrorCode::InvalidArgument, "P and Q column counts differ");
  for (int i : prob.sign_free)
    if (i < 0 || i >= n) fail(ErrorCode::InvalidArgument, "sign_free index out of range");
  const std::vector<DVec<T>> pf = forms(prob.p, prob.p_kind);
  const std::vector<DVec<T>> qf = forms(prob.q, prob.q_kind);
  const int free = static_cast<int>(prob.sign_free.size());
  std::vector<FailureSystem<T>> out;
  for (int mask = 0; mask < (1 << free); ++mask) {
    std::vector<int> sigma(static_cast<std::size_t>(n), 1);
    for (int b = 0; b < free; ++b)
      if (mask & (1 << b)) sigma[static_cast<std::size_t>(prob.sign_free[b])] = -1;
    for (const DVec<T>& c : qf) {
      FailureSystem<T> f{sigma, c, {}};
      for (const DVec<T>& l : pf) f.weak.push_back(c - l);
      out.push_back(std::move(f));
    }
    FailureSystem<T> z{sigma, std::nullopt, {}};
    for (const DVec<T>& l : pf) z.weak.push_back(-l);
    out.push_back(std::move(z));
  }
  return out;
}

template <class T>
DVec<T> witness_from_primal(const FailureSystem<T>& f, const DVec<T>& x, int n) {
  DVec<T> v(n);
  for (int i = 0; i < n; ++i) v(i) = f.sigma[i] > 0 ? T(T(1) + x(i)) : T(-(T(1) + x(i)));
  return v;
}

// max over w in the closed sigma-orthant with ||w||_1 = 1 of min over l in F_P + {0} of (c - l).w.
double violation_depth(const FailureSystem<double>& f, int n) {
  // The weak rows already hold c - l; the l = 0 row is c itself.
  std::vector<Vec> rows;
  rows.push_back(f.target ? *f.target : Vec::Zero(n));
  for (const Vec& b : f.weak) rows.push_back(b);
  double bound = 0.0;
  for (Vec& r : rows) {
    for (int i = 0; i < n; ++i) r(i) *= f.sigma[static_cast<std::size_t>(i)];
    bound = std::max(bound, r.cwiseAbs().maxCoeff());
  }
  const int k = static_cast<int>(rows.size());
  auto feasible = [&](double delta) {
    FeasibilitySystem<double> sys;
    sys.e = Mat::Zero(k + 1, n + k);
    sys.d = Vec::Zero(k + 1);
    for (int i = 0; i < n; ++i) sys.e(0, i) = 1.0;
    sys.d(0) = 1.0;
    for (int r = 0; r < k; ++r) {
      sys.e.block(r + 1, 0, 1, n) = rows[static_cast<std::size_t>(r)].transpose();
      sys.e(r + 1, n + r) = -1.0;
      sys.d(r + 1) = delta;
    }
    const LpResult<double> res = solve_feasibility(sys);
    return res.phase1_objective <= 1e-12 * std::max(1.0, std::abs(delta));
  };
  double lo = -bound - 1e-12;
  double hi = bound + 1e-12;
  if (feasible(hi)) return hi;
  for (int it = 0; it < 48 && hi - lo > 1e-14 * std::max(1.0, bound); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

FailureSystem<double> to_double_system(const FailureSystem<Rational>& f) {
  FailureSystem<double> out;
  out.sigma = f.sigma;
  if (f.target) out.target = Vec(to_double(RMat(*f.target)));
  for (const RVec& b : f.weak) out.weak.push_back(Vec(to_double(RMat(b))));
  return out;
}

std::vector<double> as_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

template <class T>
ConditionReport dominance_impl(const DominanceProblem<T>& prob, const DominanceOptions& opt) {
  const int n = static_cast<int>(prob.p.cols());
  ConditionReport rep;
  rep.condition_id = "dominance";
  rep.verdict = Verdict::Holds;
  const std::vector<FailureSystem<T>> systems = failure_systems(prob);
  bool ambiguous = false;
  std::optional<DVec<T>> witness;
  for (const FailureSystem<T>& f : systems) {
    const LpResult<T> primal = solve_feasibility(primal_system(f, n), opt.policy);
    const LpResult<T> alt = solve_feasibility(alternative_system(f, n), opt.policy);
    const bool fails = primal.status == LpStatus::Feasible && alt.status == LpStatus::Infeasible;
    const bool holds = primal.status == LpStatus::Infeasible && alt.status == LpStatus::Feasible;
    if (fails) {
      witness = witness_from_primal(f, primal.x, n);
      break;
    }
    if (!holds) {
      if constexpr (is_exact_v<T>) {
        fail(ErrorCode::NumericallyAmbiguous, "exact primal and alternative systems disagree");
      } else {
        if (opt.throw_on_ambiguous)
          fail(ErrorCode::NumericallyAmbiguous, "a dominance LP landed inside the ambiguity band");
        ambiguous = true;
      }
    }
  }
  if (witness) {
    rep.verdict = Verdict::Fails;
    DVec<T> v = *witness;
    const T scale = v.cwiseAbs().maxCoeff();
    if (scale > 0) v /= scale;
    const T gap = gap_impl(prob, v);
    if constexpr (is_exact_v<T>)
      rep.witness["gap"] = {to_double(gap)};
    else
      rep.witness["gap"] = {gap};
    if constexpr (is_exact_v<T>)
      rep.witness["v"] = as_std(to_double(RMat(v)));
    else
      rep.witness["v"] = as_std(v);
  } else if (ambiguous) {
    rep.verdict = Verdict::UndecidedSampled;
    rep.margins["lp_ambiguity"] = make_margin(0.0, opt.policy);
    rep.notes.push_back("a failure system is inside the LP ambiguity band");
  }
  if (opt.compute_depth) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const FailureSystem<T>& f : systems) {
      if constexpr (is_exact_v<T>)
        worst = std::max(worst, violation_depth(to_double_system(f), n));
      else
        worst = std::max(worst, violation_depth(f, n));
    }
    rep.margins["depth"] = make_margin(-worst, opt.policy);
  }
  return rep;
}

}  // namespace

ConditionReport motzkin_dominance(const DominanceProblem<double>& prob, const DominanceOptions& opt) {
  return dominance_impl(prob, opt);
}

ConditionReport motzkin_dominance(const DominanceProblem<Rational>& prob, const DominanceOptions& opt) {
  return dominance_impl(prob, opt);
}

double dominance_gap(const DominanceProblem<double>& prob, const Vec& v) { return gap_impl(prob, v); }

Rational dominance_gap(const DominanceProblem<Rational>& prob, const RVec& v) { return gap_impl(prob, v); }

// ---------------------------------------------------------------------------
// Condition (H)

HEvaluation condition_H_at(const Mat& a, const ConstraintModel& p, const Vec& u, const IndexSet& j) {
  const Vec y = a * u;
  HEvaluation out;
  out.v = solve_restricted(a, y, p, j).x;
  const IndexSet su = support(u);
  const double inf = std::numeric_limits<double>::infinity();
  out.min_inside = inf;
  out.min_outside = inf;
  for (int i = 0; i < a.cols(); ++i) {
    const bool inside = set_contains(su, i);
    if (inside && set_contains(j, i)) continue;
    const double g = coordinate_score(a, y, p, out.v, i).g_star;
    if (inside)
      out.min_inside = std::min(out.min_inside, g);
    else
      out.min_outside = std::min(out.min_outside, g);
  }
  out.margin = out.min_outside - out.min_inside;
  return out;
}

namespace {

std::vector<double> one_based(const IndexSet& s) {
  std::vector<double> out;
  for (int i : s) out.push_back(static_cast<double>(i + 1));
  return out;
}

}  // namespace

Vec sample_sparse_member(const ConstraintModel& p, int k, std::mt19937_64& rng) {
  if (const Hyperplane* h = p.as_hyperplane()) {
    const int n = p.dimension();
    IndexSet pool;
    for (int i = 0; i < n; ++i)
      if (h->d(i) != 0.0) pool.push_back(i);
    const IndexSet s = random_support(pool, std::min<int>(k, static_cast<int>(pool.size())), rng);
    Vec x = Vec::Zero(n);
    if (s.size() < 2) return x;
    std::normal_distribution<double> gauss;
    double acc = 0.0;
    for (std::size_t t = 0; t + 1 < s.size(); ++t) {
      x(s[t]) = gauss(rng);
      acc += h->d(s[t]) * x(s[t]);
    }
    x(s.back()) = -acc / h->d(s.back());
    return x;
  }
  const IndexSet pool = plantable_indices(p);
  return planted_vector(p, random_support(pool, std::min<int>(k, static_cast<int>(pool.size())), rng), rng);
}

ConditionReport condition_H_falsify(const Mat& a, const ConstraintModel& p, int k, int n_samples, std::uint64_t seed,
                                    const NumericPolicy& policy) {
  ConditionReport rep;
  rep.condition_id = "condition_H";
  rep.verdict = Verdict::UndecidedSampled;
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  int boundary = 0;
  for (int t = 0; t < n_samples; ++t) {
    const Vec u = sample_sparse_member(p, k, rng);
    const IndexSet su = support(u);
    if (su.empty()) continue;
    const int sz = static_cast<int>(su.size());
    for (int mask = 0; mask < (1 << sz) - 1; ++mask) {
      IndexSet j;
      for (int b = 0; b < sz; ++b)
        if (mask & (1 << b)) j.push_back(su[static_cast<std::size_t>(b)]);
      const HEvaluation h = condition_H_at(a, p, u, j);
      if (!std::isfinite(h.margin)) continue;
      worst = std::min(worst, h.margin);
      if (std::abs(h.margin) <= policy.boundary_tol) ++boundary;
      if (h.margin < -policy.boundary_tol) {
        rep.verdict = Verdict::Fails;
        rep.witness["u"] = as_std(u);
        rep.witness["J"] = one_based(j);
        rep.witness["v"] = as_std(h.v);
        rep.margins["min_margin"] = make_margin(h.margin, policy);
        rep.notes.push_back("violation found at sample " + std::to_string(t));
        return rep;
      }
    }
  }
  rep.margins["min_margin"] = make_margin(std::isfinite(worst) ? worst : 0.0, policy);
  rep.notes.push_back("no violation in " + std::to_string(n_samples) + " samples");
  if (boundary > 0) rep.notes.push_back(std::to_string(boundary) + " boundary ties observed");
  return rep;
}

// ---------------------------------------------------------------------------
// Recovery constants

namespace {

constexpr double kEnumerationBudget = 1e6;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Calls f(support) for every K-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(int n, int k, F&& f) {
  if (k > n || k < 0) return;
  IndexSet s(static_cast<std::size_t>(k));
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    f(s);
    int i = k - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++s[static_cast<std::size_t>(i)];
    for (int t = i + 1; t < k; ++t) s[static_cast<std::size_t>(t)] = s[static_cast<std::size_t>(t - 1)] + 1;
  }
}

void check_unit_columns(const Mat& a) {
  for (int j = 0; j < a.cols(); ++j)
    if (std::abs(a.col(j).norm() - 1.0) > 1e-9)
      fail(ErrorCode::InvalidArgument, "column " + std::to_string(j + 1) + " is not a unit vector");
}

// Indices scored by the outer maximum; all of them when the classification is empty.
IndexSet scored_indices(const ConeClassification& c, int n) {
  if (c.size() == 0) return range_set(n);
  if (c.size() != n) fail(ErrorCode::InvalidArgument, "classification dimension does not match A");
  return set_union(set_union(c.i1, c.iplus), c.iminus);
}

}  // namespace

RecoveryConstants recovery_constants(const Mat& a, int k, const ConeClassification& classification) {
  const int n = static_cast<int>(a.cols());
  if (k < 1 || k > n) fail(ErrorCode::InvalidArgument, "K must lie in [1, N]");
  if (binomial(n, k) > kEnumerationBudget) fail(ErrorCode::BudgetExceeded, "C(N, K) exceeds the enumeration budget");
  check_unit_columns(a);
  const Mat g = gram(a).theta;
  RecoveryConstants out;
  out.k = k;
  out.classification = classification;
  double lam = std::numeric_limits<double>::infinity();
  for_each_subset(n, k, [&](const IndexSet& s) {
    const double e = min_eig_sym(submatrix<double>(g, s, s));
    if (e < lam) {
      lam = e;
      out.worst_support = s;
    }
  });
  out.delta_at_least_one = lam <= 0.0;
  out.delta_hat = out.delta_at_least_one ? 1.0 : 1.0 - lam;

  for (int j : scored_indices(classification, n)) {
    std::vector<double> sq;
    for (int i = 0; i < n; ++i)
      if (i != j) sq.push_back(g(i, j) * g(i, j));
    std::sort(sq.begin(), sq.end(), std::greater<>());
    double top_k = 0.0;
    double top_k1 = 0.0;
    for (int t = 0; t < static_cast<int>(sq.size()); ++t) {
      if (t < k) top_k += sq[static_cast<std::size_t>(t)];
      if (t < k - 1) top_k1 += sq[static_cast<std::size_t>(t)];
    }
    out.theta_hat = std::max(out.theta_hat, std::sqrt(top_k));
    out.theta_hat_literal = std::max(out.theta_hat_literal, std::sqrt(1.0 + top_k1));
  }
  out.margin = (1.0 - out.delta_hat) - std::sqrt(static_cast<double>(k)) * out.theta_hat;
  out.satisfied = !out.delta_at_least_one && out.margin > 0.0;
  return out;
}

double min_restricted_eigenvalue(const Mat& a, int k) {
  const int n = static_cast<int>(a.cols());
  if (k < 1 || k > n) fail(ErrorCode::InvalidArgument, "K must lie in [1, N]");
  if (binomial(n, k) > kEnumerationBudget) fail(ErrorCode::BudgetExceeded, "C(N, K) exceeds the enumeration budget");
  double best = std::numeric_limits<double>::infinity();
  for_each_subset(n, k, [&](const IndexSet& s) {
    const Mat as = columns(a, s);
    Eigen::SelfAdjointEigenSolver<Mat> es(as.transpose() * as, Eigen::EigenvaluesOnly);
    best = std::min(best, es.eigenvalues().minCoeff());
  });
  return best;
}

double sampled_theta(const Mat& a, int k, const ConeClassification& classification, int samples, std::uint64_t seed) {
  const int n = static_cast<int>(a.cols());
  const IndexSet scored = scored_indices(classification, n);
  const Mat g = gram(a).theta;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<IndexSet> supports;
  if (binomial(n, k) <= samples) for_each_subset(n, k, [&](const IndexSet& s) { supports.push_back(s); });
  auto kind_score = [&](int j, double d) {
    if (classification.size() == 0 || set_contains(classification.i1, j)) return std::abs(d);
    if (set_contains(classification.iplus, j)) return std::max(d, 0.0);
    return std::max(-d, 0.0);
  };
  double best = 0.0;
  for (int t = 0; t < samples; ++t) {
    const IndexSet s = supports.empty() ? random_support(range_set(n), k, rng)
                                        : supports[static_cast<std::size_t>(t) % supports.size()];
    Vec x(static_cast<Eigen::Index>(s.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = gauss(rng);
    const double nx = x.norm();
    if (nx == 0.0) continue;
    x /= nx;
    for (int j : scored) {
      if (set_contains(s, j)) continue;
      double d = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) d += g(j, s[i]) * x(static_cast<Eigen::Index>(i));
      best = std::max(best, kind_score(j, d));
    }
  }
  return best;
}

PerturbationReport perturbation_stability(const Mat& a, int k, const ConeClassification& classification,
                                          std::vector<double> eta_grid, int trials, std::uint64_t seed) {
  const RecoveryConstants base = recovery_constants(a, k, classification);
  if (!base.satisfied) fail(ErrorCode::InvalidArgument, "the recovery constants of A are not satisfied");
  PerturbationReport rep;
  rep.base_margin = base.margin;
  rep.lipschitz_c = 2.0 * spectral_norm(a) + 1.0;
  rep.certified_radius = base.margin / ((1.0 + std::sqrt(static_cast<double>(k))) * rep.lipschitz_c);
  const double floor = 1e-6 * base.margin / rep.lipschitz_c;
  eta_grid.push_back(floor);
  std::sort(eta_grid.begin(), eta_grid.end());
  eta_grid.erase(std::unique(eta_grid.begin(), eta_grid.end()), eta_grid.end());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  bool stable = true;
  for (double eta : eta_grid) {
    PerturbationPoint pt;
    pt.eta = eta;
    pt.min_margin = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
      Mat e(a.rows(), a.cols());
      for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = gauss(rng);
      const double en = spectral_norm(e);
      if (en > 0.0) e *= eta / en;
      const RecoveryConstants c = recovery_constants(normalize_columns(Mat(a + e)), k, classification);
      ++pt.trials;
      if (c.satisfied) ++pt.satisfied;
      sum += c.margin;
      pt.min_margin = std::min(pt.min_margin, c.margin);
    }
    pt.mean_margin = trials > 0 ? sum / trials : base.margin;
    if (trials == 0) pt.min_margin = base.margin;
    if (stable && pt.satisfied == pt.trials)
      rep.largest_stable_eta = eta;
    else
      stable = false;
    rep.points.push_back(pt);
  }
  rep.meets_floor = rep.largest_stable_eta >= floor;
  return rep;
}

// ---------------------------------------------------------------------------
// Per-instance certificate

InstanceCertificate instance_certificate(const Mat& a, const ConstraintModel& p, const Vec& u, const IndexSet& j,
                                         int k) {
  const ConicHull hull = conic_hull(p);
  if (!hull.irreducible) fail(ErrorCode::NotIrreducible, "the conic hull of P freezes a coordinate at zero");
  const Mat an = normalize_columns(a);
  const IndexSet su = support(u);
  for (int i : j)
    if (!set_contains(su, i)) fail(ErrorCode::InvalidArgument, "J must be a subset of supp(u)");
  if (j.size() >= su.size()) fail(ErrorCode::InvalidArgument, "J must be a proper subset of supp(u)");
  const int kk = k > 0 ? k : static_cast<int>(su.size());

  InstanceCertificate out;
  const Vec y = an * u;
  out.v = solve_restricted(an, y, p, j).x;
  out.t_tilde = Vec::Zero(an.cols());
  for (int i = 0; i < an.cols(); ++i) out.t_tilde(i) = coordinate_score(an, y, p, out.v, i).t_tilde;
  out.shrink_factor = 1.0;
  for (int i : set_difference(su, j)) {
    const ExtendedInterval iv = interval_at(p, out.v, i);
    const double lo = iv.lo.as_double();
    const double hi = iv.hi.as_double();
    const double t = out.t_tilde(i);
    if (lo == 0.0 && hi == 0.0) {
      out.l_zero.push_back(i);
    } else if (lo < 0.0 && hi > 0.0) {
      if (t < lo) {
        out.l_minus_a.push_back(i);
        out.shrink_factor = std::min(out.shrink_factor, std::sqrt(lo / t));
      } else if (t > hi) {
        out.l_plus_b.push_back(i);
        out.shrink_factor = std::min(out.shrink_factor, std::sqrt(hi / t));
      } else {
        out.l_uc.push_back(i);
      }
    } else if (lo == 0.0) {
      if (t > hi) {
        out.l_plus_b.push_back(i);
        out.shrink_factor = std::min(out.shrink_factor, std::sqrt(hi / t));
      } else {
        out.l_zero_a.push_back(i);
      }
    } else {
      if (t < lo) {
        out.l_minus_a.push_back(i);
        out.shrink_factor = std::min(out.shrink_factor, std::sqrt(lo / t));
      } else {
        out.l_zero_b.push_back(i);
      }
    }
  }
  out.constants = recovery_constants(an, kk, hull.classes);
  out.lhs = (1.0 - out.constants.delta_hat) * out.shrink_factor;
  out.rhs = std::sqrt(static_cast<double>(kk)) * out.constants.theta_hat;
  out.c1_satisfied = out.l_zero.empty();
  for (int i : out.l_zero_a) out.c1_satisfied = out.c1_satisfied && u(i) > 0.0;
  for (int i : out.l_zero_b) out.c1_satisfied = out.c1_satisfied && u(i) < 0.0;
  out.c2_satisfied = out.lhs > out.rhs;
  return out;
}

}  // namespace cmp
