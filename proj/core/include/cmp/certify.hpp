#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmp/constraint.hpp"
#include "cmp/dense.hpp"
#include "cmp/linalg.hpp"
#include "cmp/numeric_policy.hpp"
#include "cmp/rational.hpp"

namespace cmp {

enum class Verdict { Holds, Fails, UndecidedSampled };
enum class MarginState { Positive, Boundary, Negative };
enum class ArithmeticMode { Float, Rational };

std::string_view to_string(Verdict v);
std::string_view to_string(MarginState s);
std::string_view to_string(ArithmeticMode m);

struct Margin {
  double value = 0.0;
  MarginState state = MarginState::Boundary;
  std::string exact;  // rational value when computed in exact arithmetic
};

Margin make_margin(double value, const NumericPolicy& policy = {});
Margin make_margin(const Rational& value, const NumericPolicy& policy = {});

struct ConditionReport {
  std::string condition_id;
  Verdict verdict = Verdict::Holds;
  std::map<std::string, Margin> margins;
  std::map<std::string, std::vector<double>> witness;
  std::vector<std::string> notes;

  bool has_boundary() const;
};

struct CertificateBundle {
  std::string case_id;
  std::string scope;  // "necessary+sufficient" or "sufficient"
  ArithmeticMode mode = ArithmeticMode::Float;
  Verdict aggregate = Verdict::Holds;
  std::vector<ConditionReport> conditions;
  std::vector<std::string> notes;

  bool has_boundary() const;
  const ConditionReport* find(std::string_view id) const;
};

// ---------------------------------------------------------------------------
// Exact recovery condition

template <class T>
struct ErcData {
  DMat<T> gss_inv;  // (A_S^T A_S)^{-1}
  DMat<T> coeff;    // (A_S^T A_S)^{-1} A_S^T A_{S^c}
  T norm = T(0);    // max column absolute sum of coeff
};

// Computed from a Gram matrix; throws SingularBlock when G_SS is singular.
template <class T>
ErcData<T> erc_from_gram(const DMat<T>& g, const IndexSet& s);
extern template ErcData<double> erc_from_gram(const DMat<double>&, const IndexSet&);
extern template ErcData<Rational> erc_from_gram(const DMat<Rational>&, const IndexSet&);

// ||(A_S^T A_S)^{-1} A_S^T A_{S^c}||_1. Throws RankDeficient when A_S is rank deficient.
double erc_norm(const Mat& a, const IndexSet& s, const NumericPolicy& policy = {});
Rational erc_norm_exact(const RMat& gram, const IndexSet& s);

// ---------------------------------------------------------------------------
// Strict max-dominance over sign-pattern orthants

enum class RowKind { Abs, Plus, Minus };

// Decides: for every v with v_i != 0 (i in sign_free) and v_i > 0 otherwise,
//   max_i score(p_i, v) > max_j score(q_j, v),
// where score(r, v) is |r.v|, (r.v)_+ or (r.v)_- by kind and an empty Q scores 0.
template <class T>
struct DominanceProblem {
  DMat<T> p;
  std::vector<RowKind> p_kind;
  DMat<T> q;
  std::vector<RowKind> q_kind;
  IndexSet sign_free;
};

struct DominanceOptions {
  NumericPolicy policy{};
  bool compute_depth = true;
  bool throw_on_ambiguous = true;
};

// Verdict Holds iff every failure system is infeasible (decided by the primal
// LP and its Motzkin alternative). Margin "depth" is minus the largest
// normalized violation over the closed orthants; Fails carries the witness v.
ConditionReport motzkin_dominance(const DominanceProblem<double>& prob, const DominanceOptions& opt = {});
ConditionReport motzkin_dominance(const DominanceProblem<Rational>& prob, const DominanceOptions& opt = {});

// max score(P) - max score(Q) at v.
double dominance_gap(const DominanceProblem<double>& prob, const Vec& v);
Rational dominance_gap(const DominanceProblem<Rational>& prob, const RVec& v);

// ---------------------------------------------------------------------------
// Fixed-support theorem dispatch

struct CertifyOptions {
  ArithmeticMode mode = ArithmeticMode::Float;
  NumericPolicy policy{};
  std::optional<RMat> exact_gram;  // rational mode: replaces the Gram matrix of the normalized A
  int max_support = 12;
  bool sample_on_failure = true;   // recovery search for sufficient-only cases that fail
  int sample_trials = 400;
  std::uint64_t seed = 1;
};

// Throws UnsupportedCombination when P is not a box-product cone or S meets I0.
CertificateBundle check_fixed_support(const Mat& a, const IndexSet& s, const ConstraintModel& p,
                                      const CertifyOptions& opt = {});

// Random planted z with supp(z) = S and signs allowed by P, magnitudes in (0.1, 2].
// Returns the first z whose recovery fails, if any.
std::optional<Vec> sampled_recovery_failure(const Mat& a, const IndexSet& s, const ConstraintModel& p, int trials,
                                            std::uint64_t seed);

// ---------------------------------------------------------------------------
// Condition (H)

struct HEvaluation {
  Vec v;                 // restricted minimizer over J
  double min_inside = 0.0;   // min over supp(u) \ J of f*_j(u, v)
  double min_outside = 0.0;  // min over supp(u)^c of f*_j(u, v)
  double margin = 0.0;       // min_outside - min_inside
};

HEvaluation condition_H_at(const Mat& a, const ConstraintModel& p, const Vec& u, const IndexSet& j);

// Samples u in Sigma_K cap P and every proper J of supp(u). Fails on the first
// margin below -boundary_tol, otherwise UndecidedSampled.
ConditionReport condition_H_falsify(const Mat& a, const ConstraintModel& p, int k, int n_samples,
                                    std::uint64_t seed, const NumericPolicy& policy = {});

// Random u in Sigma_K cap P with |supp(u)| = k.
Vec sample_sparse_member(const ConstraintModel& p, int k, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Recovery constants

struct RecoveryConstants {
  int k = 0;
  double delta_hat = 0.0;
  bool delta_at_least_one = false;  // min eigenvalue <= 0: reported at least one
  double theta_hat = 0.0;           // j restricted to the complement of supp(x)
  double theta_hat_literal = 0.0;   // j ranging over every index
  ConeClassification classification;
  IndexSet worst_support;
  double margin = 0.0;              // (1 - delta_hat) - sqrt(K) theta_hat
  bool satisfied = false;
};

// Exhaustive over the C(N, K) supports; throws BudgetExceeded past 1e6.
RecoveryConstants recovery_constants(const Mat& a, int k, const ConeClassification& classification);
// Direct min over supports of the smallest eigenvalue of A_S^T A_S (self-adjoint Eigen solver).
double min_restricted_eigenvalue(const Mat& a, int k);
// Random-direction estimate of sup over x in Sigma_K, ||x|| = 1, j outside supp(x) of the score.
double sampled_theta(const Mat& a, int k, const ConeClassification& classification, int samples,
                     std::uint64_t seed);

struct PerturbationPoint {
  double eta = 0.0;
  int trials = 0;
  int satisfied = 0;
  double mean_margin = 0.0;
  double min_margin = 0.0;
};

struct PerturbationReport {
  double base_margin = 0.0;
  double lipschitz_c = 0.0;        // 2 ||A||_2 + 1
  double certified_radius = 0.0;   // margin / ((1 + sqrt K) c)
  double largest_stable_eta = 0.0; // largest grid eta below which every trial stayed satisfied
  bool meets_floor = false;        // largest_stable_eta >= 1e-6 margin / c
  std::vector<PerturbationPoint> points;
};

// Requires recovery_constants(A).satisfied; the grid is augmented with 1e-6 margin / c.
PerturbationReport perturbation_stability(const Mat& a, int k, const ConeClassification& classification,
                                          std::vector<double> eta_grid, int trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Per-instance certificate

struct InstanceCertificate {
  IndexSet l_minus_a, l_zero_a, l_plus_b, l_zero_b, l_uc, l_zero;
  Vec v;
  Vec t_tilde;  // length N
  double shrink_factor = 1.0;
  double lhs = 0.0;  // (1 - delta_hat) * shrink_factor
  double rhs = 0.0;  // sqrt(K) * theta_hat
  bool c1_satisfied = false;
  bool c2_satisfied = false;
  RecoveryConstants constants;
};

// Throws NotIrreducible when the conic hull of P freezes a coordinate at zero.
InstanceCertificate instance_certificate(const Mat& a, const ConstraintModel& p, const Vec& u, const IndexSet& j,
                                         int k = 0);

// ---------------------------------------------------------------------------
// Counterexample report

struct CounterexampleItem {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CounterexampleReport {
  std::vector<CounterexampleItem> items;
  bool all_passed = false;
};

struct CounterexampleOptions {
  int grid_points = 17;
  int extension_m = 6;
  int extension_n = 6;
};

CounterexampleReport verify_counterexample(const CounterexampleOptions& opt = {});

// Grid of z_S values over (+-{0.1..2})^3 with every coordinate nonzero.
std::vector<Vec> counterexample_grid(int points_per_axis);

}  // namespace cmp
