#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cmp/certify.hpp"
#include "cmp/error.hpp"
#include "cmp/pursuit.hpp"
#include "cmp/random.hpp"

namespace cmp {

namespace {

template <class T>
struct Context {
  DMat<T> g;              // Gram matrix with I- coordinates flipped to I+
  IndexSet s, sc;         // sc excludes I0
  IndexSet free_set;      // I1
  std::vector<int> flip;  // -1 on I-, +1 elsewhere
  NumericPolicy policy;
};

template <class T>
bool scalar_holds(const T& value, const NumericPolicy& policy) {
  if constexpr (is_exact_v<T>) {
    return value > 0;
  } else {
    return value > policy.boundary_tol;
  }
}

template <class T>
T positive_part(const T& x) {
  return x > 0 ? x : T(0);
}

std::vector<double> one_based(const IndexSet& s) {
  std::vector<double> out;
  for (int i : s) out.push_back(static_cast<double>(i + 1));
  return out;
}

template <class T>
ConditionReport scalar_condition(const std::string& id, const std::string& name, const T& value,
                                 const NumericPolicy& policy) {
  ConditionReport r;
  r.condition_id = id;
  r.verdict = scalar_holds(value, policy) ? Verdict::Holds : Verdict::Fails;
  r.margins[name] = make_margin(value, policy);
  return r;
}

template <class T>
ConditionReport injectivity(const Context<T>& c) {
  const DMat<T> m = submatrix(c.g, c.s, c.s);
  if constexpr (is_exact_v<T>) {
    return scalar_condition<T>("injectivity", "det", determinant(m), c.policy);
  } else {
    return scalar_condition<double>("injectivity", "min_eigenvalue", min_eig_sym(m), c.policy);
  }
}

// Runs one dominance problem whose columns are the coordinates `coords`; the
// witness is mapped back to the caller's sign convention.
template <class T>
ConditionReport dominance(const Context<T>& c, const std::string& id, const DominanceProblem<T>& prob,
                          const IndexSet& coords) {
  DominanceOptions opt;
  opt.policy = c.policy;
  opt.throw_on_ambiguous = false;
  ConditionReport r = motzkin_dominance(prob, opt);
  r.condition_id = id;
  auto it = r.witness.find("v");
  if (it != r.witness.end()) {
    for (std::size_t i = 0; i < coords.size(); ++i) it->second[i] *= c.flip[static_cast<std::size_t>(coords[i])];
    r.witness["indices"] = one_based(coords);
  }
  return r;
}

// Folds a family of dominance reports into one: first failure wins, depth is the minimum.
ConditionReport fold(const std::string& id, const std::vector<std::pair<IndexSet, ConditionReport>>& parts,
                     const std::string& subset_key, const NumericPolicy& policy) {
  ConditionReport out;
  out.condition_id = id;
  out.verdict = Verdict::Holds;
  double depth = std::numeric_limits<double>::infinity();
  for (const auto& [subset, r] : parts) {
    auto d = r.margins.find("depth");
    if (d != r.margins.end()) depth = std::min(depth, d->second.value);
    if (r.verdict == Verdict::Fails && out.verdict != Verdict::Fails) {
      out.verdict = Verdict::Fails;
      out.witness = r.witness;
      out.witness[subset_key] = one_based(subset);
    }
    if (r.verdict == Verdict::UndecidedSampled && out.verdict == Verdict::Holds) {
      out.verdict = Verdict::UndecidedSampled;
      out.margins["lp_ambiguity"] = make_margin(0.0, policy);
    }
  }
  if (std::isfinite(depth)) out.margins["depth"] = make_margin(depth, policy);
  return out;
}

// Nonempty subsets of s, ascending by bitmask.
std::vector<IndexSet> subsets(const IndexSet& s, bool include_empty, bool include_full) {
  const int k = static_cast<int>(s.size());
  std::vector<IndexSet> out;
  for (int mask = 0; mask < (1 << k); ++mask) {
    if (mask == 0 && !include_empty) continue;
    if (mask == (1 << k) - 1 && !include_full) continue;
    IndexSet t;
    for (int b = 0; b < k; ++b)
      if (mask & (1 << b)) t.push_back(s[static_cast<std::size_t>(b)]);
    out.push_back(t);
  }
  return out;
}

template <class T>
ConditionReport face_dominance(const Context<T>& c) {
  std::vector<std::pair<IndexSet, ConditionReport>> parts;
  for (const IndexSet& t : subsets(c.s, false, true)) {
    DominanceProblem<T> prob;
    prob.p = submatrix(c.g, c.s, t);
    prob.p_kind.assign(c.s.size(), RowKind::Abs);
    prob.q = submatrix(c.g, c.sc, t);
    prob.q_kind.assign(c.sc.size(), RowKind::Abs);
    for (int i = 0; i < static_cast<int>(t.size()); ++i) prob.sign_free.push_back(i);
    parts.emplace_back(t, dominance(c, "face_dominance", prob, t));
  }
  return fold("face_dominance", parts, "face", c.policy);
}

// G_{Sc,I} - G_{Sc,J} G_JJ^{-1} G_{J,I}
template <class T>
DMat<T> projected_cross(const Context<T>& c, const IndexSet& j, const IndexSet& i) {
  DMat<T> e = submatrix(c.g, c.sc, i);
  if (!j.empty() && !c.sc.empty())
    e -= submatrix(c.g, c.sc, j) * inverse(submatrix(c.g, j, j)) * submatrix(c.g, j, i);
  return e;
}

// Dominance of (M/M_JJ) rows over E_J rows with kinds by class; sign_free on I1 coordinates.
template <class T>
ConditionReport schur_dominance(const Context<T>& c, const std::string& id, const IndexSet& j) {
  const IndexSet i = set_difference(c.s, j);
  IndexSet jpos;
  for (int x : j) jpos.push_back(static_cast<int>(std::lower_bound(c.s.begin(), c.s.end(), x) - c.s.begin()));
  DominanceProblem<T> prob;
  prob.p = schur_complement(DMat<T>(submatrix(c.g, c.s, c.s)), jpos);
  prob.q = projected_cross(c, j, i);
  for (std::size_t r = 0; r < i.size(); ++r) {
    const bool is_free = set_contains(c.free_set, i[r]);
    prob.p_kind.push_back(is_free ? RowKind::Abs : RowKind::Plus);
    if (is_free) prob.sign_free.push_back(static_cast<int>(r));
  }
  for (int x : c.sc) prob.q_kind.push_back(set_contains(c.free_set, x) ? RowKind::Abs : RowKind::Plus);
  return dominance(c, id, prob, i);
}

template <class T>
ConditionReport schur_family(const Context<T>& c, const std::string& id) {
  std::vector<std::pair<IndexSet, ConditionReport>> parts;
  for (const IndexSet& j : subsets(c.s, true, false)) parts.emplace_back(j, schur_dominance(c, id, j));
  return fold(id, parts, "J", c.policy);
}

// ---------------------------------------------------------------------------
// Cases

template <class T>
void nonneg_two(const Context<T>& c, CertificateBundle& b) {
  const int s1 = c.s[0], s2 = c.s[1];
  const T t12 = c.g(s1, s2);
  b.conditions.push_back(scalar_condition<T>("injectivity", "one_minus_theta12_sq", T(T(1) - t12 * t12), c.policy));
  b.conditions.push_back(schur_dominance(c, "step1_plus_dominance", {}));
  T worst = T(0);
  for (int j : c.sc) {
    worst = std::max(worst, positive_part<T>(c.g(j, s2) - t12 * c.g(j, s1)));
    worst = std::max(worst, positive_part<T>(c.g(j, s1) - t12 * c.g(j, s2)));
  }
  b.conditions.push_back(scalar_condition<T>("step2_gap", "gap", T(T(1) - t12 * t12 - worst), c.policy));
}

template <class T>
void nonneg_three(const Context<T>& c, CertificateBundle& b) {
  b.conditions.push_back(injectivity(c));
  b.conditions.push_back(schur_dominance(c, "step1_plus_dominance", {}));
  for (int x : c.s)
    b.conditions.push_back(schur_dominance(c, "step2_schur_dominance[J=" + std::to_string(x + 1) + "]", {x}));

  const int i1 = c.s[0], i2 = c.s[1], i3 = c.s[2];
  const T t12 = c.g(i1, i2), t13 = c.g(i1, i3), t23 = c.g(i2, i3);
  const T d12 = t12 - t13 * t23, d13 = t13 - t12 * t23, d23 = t23 - t12 * t13;
  const T det = T(1) + T(2) * t12 * t13 * t23 - t12 * t12 - t13 * t13 - t23 * t23;
  struct Implication {
    T diag, h1, h2;  // hypothesis: diag > min(h1, h2)
    int lead, o1, o2;
    T c1, c2;        // conclusion row: theta_{i,lead} diag - theta_{i,o1} c1 - theta_{i,o2} c2
  };
  const Implication imps[3] = {
      {T(1) - t12 * t12, d13, d23, i3, i1, i2, d13, d23},
      {T(1) - t13 * t13, d12, d23, i2, i1, i3, d12, d23},
      {T(1) - t23 * t23, d12, d13, i1, i2, i3, d12, d13},
  };
  ConditionReport r;
  r.condition_id = "step3_determinant";
  r.verdict = Verdict::Holds;
  T overall = T(0);
  for (int k = 0; k < 3; ++k) {
    const Implication& im = imps[k];
    const T hyp = im.diag - std::min(im.h1, im.h2);
    T rhs = T(0);
    for (int i : c.sc) rhs = std::max(rhs, positive_part<T>(c.g(i, im.lead) * im.diag - c.g(i, im.o1) * im.c1 -
                                                               c.g(i, im.o2) * im.c2));
    const T concl = det - rhs;
    const bool holds = !scalar_holds(hyp, c.policy) || scalar_holds(concl, c.policy);
    const T margin = std::max(T(-hyp), concl);
    r.margins["implication_" + std::to_string(k + 1)] = make_margin(margin, c.policy);
    if (k == 0 || margin < overall) overall = margin;
    if (!holds) r.verdict = Verdict::Fails;
  }
  r.margins["worst"] = make_margin(overall, c.policy);
  b.conditions.push_back(std::move(r));
}

template <class T>
void mixed_two(const Context<T>& c, CertificateBundle& b) {
  const int s1 = set_contains(c.free_set, c.s[0]) ? c.s[0] : c.s[1];
  const int s2 = s1 == c.s[0] ? c.s[1] : c.s[0];
  const T t12 = c.g(s1, s2);
  b.conditions.push_back(scalar_condition<T>("injectivity", "one_minus_theta12_sq", T(T(1) - t12 * t12), c.policy));

  const IndexSet order = {s1, s2};
  DominanceProblem<T> prob;
  prob.p = submatrix(c.g, order, order);
  prob.p_kind = {RowKind::Abs, RowKind::Plus};
  prob.q = submatrix(c.g, c.sc, order);
  for (int x : c.sc) prob.q_kind.push_back(set_contains(c.free_set, x) ? RowKind::Abs : RowKind::Plus);
  prob.sign_free = {0};
  b.conditions.push_back(dominance(c, "mixed_step1_dominance", prob, order));

  T worst = T(0);
  for (int j : c.sc) {
    const T a2 = c.g(j, s2) - t12 * c.g(j, s1);
    worst = std::max(worst, set_contains(c.free_set, j) ? abs_value(a2) : positive_part(a2));
    worst = std::max(worst, abs_value<T>(c.g(j, s1) - t12 * c.g(j, s2)));
  }
  b.conditions.push_back(scalar_condition<T>("mixed_step2_gap", "gap", T(T(1) - t12 * t12 - worst), c.policy));
}

template <class T>
Verdict necessary_sufficient(const CertificateBundle& b) {
  bool undecided = false;
  for (const ConditionReport& r : b.conditions) {
    if (r.verdict == Verdict::Fails) return Verdict::Fails;
    if (r.verdict == Verdict::UndecidedSampled) undecided = true;
  }
  return undecided ? Verdict::UndecidedSampled : Verdict::Holds;
}

template <class T>
CertificateBundle dispatch(const Mat& an, const Context<T>& c, const ConstraintModel& p, const CertifyOptions& opt) {
  CertificateBundle b;
  b.mode = opt.mode;
  const IndexSet all = set_union(c.s, c.sc);
  const bool all_free = std::all_of(all.begin(), all.end(), [&](int i) { return set_contains(c.free_set, i); });
  const bool all_nonneg = std::none_of(all.begin(), all.end(), [&](int i) { return set_contains(c.free_set, i); });
  const int k = static_cast<int>(c.s.size());

  if (all_free) {
    ConditionReport injr = injectivity(c);
    const bool injective = injr.verdict == Verdict::Holds;
    b.conditions.push_back(std::move(injr));
    ConditionReport face;
    if (k <= 3) {
      face = face_dominance(c);
    } else {
      face.condition_id = "face_dominance";
      face.verdict = Verdict::UndecidedSampled;
      face.notes.push_back("no finite reduction beyond three support indices; decided by the exact recovery condition");
    }
    if (injective) {
      const T erc = erc_from_gram<T>(c.g, c.s).norm;
      face.margins["erc_slack"] = make_margin(T(T(1) - erc), c.policy);
      if (k > 3) face.verdict = scalar_holds(T(T(1) - erc), c.policy) ? Verdict::Holds : Verdict::Fails;
    } else if (k > 3) {
      face.verdict = Verdict::Fails;
    }
    b.conditions.push_back(std::move(face));
    if (k <= 2) {
      b.case_id = "free_support_le_2";
      b.scope = "necessary+sufficient";
    } else {
      b.case_id = k == 3 ? "free_support_3" : "free_support_general";
      b.scope = "sufficient";
    }
  } else if (all_nonneg) {
    if (k == 2) {
      b.case_id = "nonneg_support_2";
      b.scope = "necessary+sufficient";
      nonneg_two(c, b);
    } else if (k == 3) {
      b.case_id = "nonneg_support_3";
      b.scope = "necessary+sufficient";
      nonneg_three(c, b);
    } else {
      b.case_id = "nonneg_general";
      b.scope = "sufficient";
      b.conditions.push_back(injectivity(c));
      b.conditions.push_back(schur_family(c, "schur_dominance"));
    }
  } else {
    const int n_free = static_cast<int>(
        std::count_if(c.s.begin(), c.s.end(), [&](int i) { return set_contains(c.free_set, i); }));
    if (k == 2 && n_free == 1) {
      b.case_id = "mixed_support_2";
      b.scope = "necessary+sufficient";
      mixed_two(c, b);
    } else {
      b.case_id = "mixed_general";
      b.scope = "sufficient";
      b.conditions.push_back(injectivity(c));
      b.conditions.push_back(schur_family(c, "mixed_schur_dominance"));
    }
  }

  b.aggregate = necessary_sufficient<T>(b);
  if (b.scope == "sufficient" && b.aggregate != Verdict::Holds) {
    b.aggregate = Verdict::UndecidedSampled;
    if (opt.sample_on_failure) {
      ConditionReport sr;
      sr.condition_id = "sampled_recovery";
      sr.verdict = Verdict::UndecidedSampled;
      const std::optional<Vec> z = sampled_recovery_failure(an, c.s, p, opt.sample_trials, opt.seed);
      if (z) {
        sr.verdict = Verdict::Fails;
        sr.witness["z"] = std::vector<double>(z->data(), z->data() + z->size());
        b.aggregate = Verdict::Fails;
      } else {
        sr.notes.push_back("no recovery failure in " + std::to_string(opt.sample_trials) + " sampled vectors");
      }
      b.conditions.push_back(std::move(sr));
    }
    b.notes.push_back("the checked conditions are sufficient only; a failed condition does not imply a recovery failure");
  }
  return b;
}

template <class T>
Context<T> make_context(DMat<T> g, const IndexSet& s, const ConeClassification& cls, const NumericPolicy& policy) {
  const int n = static_cast<int>(g.rows());
  Context<T> c;
  c.policy = policy;
  c.s = s;
  c.free_set = cls.i1;
  c.flip.assign(static_cast<std::size_t>(n), 1);
  for (int i : cls.iminus) c.flip[static_cast<std::size_t>(i)] = -1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (c.flip[static_cast<std::size_t>(i)] * c.flip[static_cast<std::size_t>(j)] < 0) g(i, j) = -g(i, j);
  c.g = std::move(g);
  c.sc = set_difference(complement(n, s), cls.i0);
  return c;
}

}  // namespace

CertificateBundle check_fixed_support(const Mat& a, const IndexSet& s, const ConstraintModel& p,
                                      const CertifyOptions& opt) {
  const int n = static_cast<int>(a.cols());
  if (s.empty()) fail(ErrorCode::InvalidArgument, "support must be nonempty");
  if (!std::is_sorted(s.begin(), s.end()) || std::adjacent_find(s.begin(), s.end()) != s.end())
    fail(ErrorCode::InvalidArgument, "support must be sorted and duplicate-free");
  if (s.front() < 0 || s.back() >= n) fail(ErrorCode::InvalidArgument, "support index out of range");
  if (p.dimension() != n) fail(ErrorCode::InvalidArgument, "constraint dimension does not match A");
  if (!p.as_box() || !p.is_cone())
    fail(ErrorCode::UnsupportedCombination, "fixed-support conditions need a box-product cone, got " + p.describe());
  if (static_cast<int>(s.size()) > opt.max_support)
    fail(ErrorCode::BudgetExceeded, "support larger than " + std::to_string(opt.max_support));
  const ConeClassification cls = classify_cone(p);
  for (int i : s)
    if (set_contains(cls.i0, i))
      fail(ErrorCode::UnsupportedCombination, "support index " + std::to_string(i + 1) + " is frozen at zero");

  const Mat an = normalize_columns(a);
  const Mat g = gram(an).theta;
  if (opt.mode == ArithmeticMode::Rational) {
    RMat rg = opt.exact_gram ? *opt.exact_gram : to_rational(g);
    if (rg.rows() != n || rg.cols() != n) fail(ErrorCode::InvalidArgument, "exact Gram matrix has the wrong size");
    return dispatch(an, make_context<Rational>(std::move(rg), s, cls, opt.policy), p, opt);
  }
  return dispatch(an, make_context<double>(g, s, cls, opt.policy), p, opt);
}

std::optional<Vec> sampled_recovery_failure(const Mat& a, const IndexSet& s, const ConstraintModel& p, int trials,
                                            std::uint64_t seed) {
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng = trial_rng(seed, static_cast<std::uint64_t>(t));
    const Vec z = planted_vector(p, s, rng);
    try {
      if (!verify_exact_recovery(a, z, p).vector_recovered) return z;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BranchLimit) throw;
    }
  }
  return std::nullopt;
}

}  // namespace cmp
