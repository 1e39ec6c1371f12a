#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cmp/certify.hpp"
#include "cmp/error.hpp"
#include "cmp/fixtures.hpp"
#include "cmp/pursuit.hpp"
#include "cmp/random.hpp"
#include "oracles.hpp"

using namespace cmp;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

const ConditionReport& condition(const CertificateBundle& b, std::string_view id) {
  const ConditionReport* r = b.find(id);
  REQUIRE(r != nullptr);
  return *r;
}

// Every z on a grid over the support, recovered on all branches?
bool grid_recovers(const Mat& a, const IndexSet& s, const ConstraintModel& p, int points, double top) {
  const ConeClassification cls = classify_cone(p);
  std::vector<std::vector<double>> axes;
  for (int i : s) {
    std::vector<double> ax;
    if (set_contains(cls.i1, i)) {
      for (int k = 1; k <= points / 2; ++k) {
        ax.push_back(top * k / (points / 2));
        ax.push_back(-top * k / (points / 2));
      }
    } else {
      const double sign = set_contains(cls.iminus, i) ? -1.0 : 1.0;
      for (int k = 1; k <= points; ++k) ax.push_back(sign * top * k / points);
    }
    axes.push_back(ax);
  }
  std::vector<std::size_t> idx(s.size(), 0);
  while (true) {
    Vec z = Vec::Zero(a.cols());
    for (std::size_t d = 0; d < s.size(); ++d) z(s[d]) = axes[d][idx[d]];
    if (!verify_exact_recovery(a, z, p).vector_recovered) return false;
    std::size_t d = 0;
    while (d < s.size() && ++idx[d] == axes[d].size()) idx[d++] = 0;
    if (d == s.size()) break;
  }
  return true;
}

}  // namespace

TEST_CASE("exact recovery condition") {
  const Mat a = fixtures::counterexample_matrix();
  CHECK(std::abs(erc_norm(a, {0, 1, 2}) - 1.0) <= 1e-12);
  const RMat g = fixtures::counterexample_gram_exact();
  CHECK(erc_norm_exact(g, {0, 1, 2}) == 1);
  const ErcData<Rational> d = erc_from_gram<Rational>(g, {0, 1, 2});
  RMat expected(3, 3);
  expected << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  CHECK(d.gss_inv == expected * make_rational(3, 4));

  CHECK(erc_norm(Mat::Identity(5, 5), {0, 3}) == 0.0);

  Mat dep(3, 3);
  dep << 1, 1, 0, 0, 0, 1, 0, 0, 0;
  try {
    erc_norm(dep, {0, 1});
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("motzkin_dominance") {
  SUBCASE("counterexample strict dominance holds exactly") {
    const RMat g = fixtures::counterexample_gram_exact();
    DominanceProblem<Rational> prob;
    prob.p = submatrix<Rational>(g, {0, 1, 2}, {0, 1, 2});
    prob.p_kind.assign(3, RowKind::Abs);
    prob.q = submatrix<Rational>(g, {3}, {0, 1, 2});
    prob.q_kind = {RowKind::Abs};
    prob.sign_free = {0, 1, 2};
    CHECK(motzkin_dominance(prob).verdict == Verdict::Holds);

    DominanceProblem<double> fp;
    fp.p = to_double(prob.p);
    fp.p_kind = prob.p_kind;
    fp.q = to_double(prob.q);
    fp.q_kind = prob.q_kind;
    fp.sign_free = prob.sign_free;
    const ConditionReport r = motzkin_dominance(fp);
    CHECK(r.verdict == Verdict::Holds);
    CHECK(r.margins.at("depth").state == MarginState::Boundary);
  }
  SUBCASE("equal rows are not strictly dominated") {
    DominanceProblem<double> prob;
    prob.p = Mat(1, 2);
    prob.p << 1, 0;
    prob.p_kind = {RowKind::Abs};
    prob.q = prob.p;
    prob.q_kind = {RowKind::Abs};
    const ConditionReport r = motzkin_dominance(prob);
    REQUIRE(r.verdict == Verdict::Fails);
    const std::vector<double>& w = r.witness.at("v");
    const Vec v = Vec::Map(w.data(), static_cast<Eigen::Index>(w.size()));
    CHECK(v.minCoeff() > 0.0);
    CHECK(dominance_gap(prob, v) <= 1e-12);
  }
  SUBCASE("nonnegative first-step dominance agrees with dense grid sampling") {
    std::mt19937_64 rng(3);
    int tested = 0;
    while (tested < 5) {
      const Mat a = oracle_ref::random_unit_columns(400, 10, rng);
      const Mat g = gram(a).theta;
      if ((g - Mat::Identity(10, 10)).cwiseAbs().maxCoeff() >= 0.2) continue;
      ++tested;
      DominanceProblem<double> prob;
      prob.p = g.block(0, 0, 2, 2);
      prob.p_kind = {RowKind::Plus, RowKind::Plus};
      prob.q = g.block(2, 0, 8, 2);
      prob.q_kind.assign(8, RowKind::Plus);
      CHECK(motzkin_dominance(prob).verdict == Verdict::Holds);
      double worst = INFINITY;
      for (int i = 1; i <= 1000; ++i)
        for (int j = 1; j <= 1000; ++j) worst = std::min(worst, dominance_gap(prob, vec({i * 1e-3, j * 1e-3})));
      CHECK(worst > 0.0);
    }
  }
  SUBCASE("failure witnesses re-verify on random problems") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    int fails = 0;
    for (int t = 0; t < 200; ++t) {
      DominanceProblem<double> prob;
      prob.p = Mat(2, 2);
      prob.q = Mat(3, 2);
      for (Eigen::Index i = 0; i < 4; ++i) prob.p.data()[i] = g(rng);
      for (Eigen::Index i = 0; i < 6; ++i) prob.q.data()[i] = 0.5 * g(rng);
      prob.p_kind = {RowKind::Abs, RowKind::Plus};
      prob.q_kind = {RowKind::Abs, RowKind::Plus, RowKind::Minus};
      if (t % 2) prob.sign_free = {0};
      DominanceOptions opt;
      opt.throw_on_ambiguous = false;
      opt.compute_depth = false;
      const ConditionReport r = motzkin_dominance(prob, opt);
      if (r.verdict != Verdict::Fails) continue;
      ++fails;
      const std::vector<double>& w = r.witness.at("v");
      const Vec v = Vec::Map(w.data(), 2);
      CHECK(dominance_gap(prob, v) <= 1e-9);
      if (t % 2 == 0) CHECK(v.minCoeff() > 0.0);
      CHECK(v(1) > 0.0);
    }
    CHECK(fails > 0);
  }
}

TEST_CASE("check_fixed_support on the counterexample") {
  const Mat a = fixtures::counterexample_matrix();
  CertifyOptions opt;
  opt.mode = ArithmeticMode::Rational;
  opt.exact_gram = fixtures::counterexample_gram_exact();
  const CertificateBundle b = check_fixed_support(a, {0, 1, 2}, ConstraintModel::free(4), opt);
  CHECK(b.case_id == "free_support_3");
  CHECK(b.scope == "sufficient");
  const ConditionReport& face = condition(b, "face_dominance");
  CHECK(face.verdict == Verdict::Fails);
  CHECK(face.margins.at("erc_slack").exact == "0");
  CHECK(face.margins.at("erc_slack").state == MarginState::Boundary);
  CHECK(condition(b, "injectivity").verdict == Verdict::Holds);
  CHECK(condition(b, "sampled_recovery").verdict == Verdict::UndecidedSampled);
  CHECK(b.aggregate == Verdict::UndecidedSampled);
  CHECK(b.has_boundary());
  CHECK(verify_exact_recovery(a, vec({0.3, -1.1, 1.7, 0.0}), ConstraintModel::free(4)).vector_recovered);
}

TEST_CASE("orthonormal columns satisfy every case") {
  const Mat a = Mat::Identity(6, 6);
  const std::vector<std::pair<IndexSet, ConstraintModel>> cases = {
      {{0}, ConstraintModel::free(6)},
      {{0, 3}, ConstraintModel::free(6)},
      {{0, 1, 2}, ConstraintModel::free(6)},
      {{0, 1, 2, 4}, ConstraintModel::free(6)},
      {{1, 2}, ConstraintModel::nonneg(6)},
      {{1, 2, 5}, ConstraintModel::nonneg(6)},
      {{0, 1, 2, 3}, ConstraintModel::nonneg(6)},
      {{0, 1}, ConstraintModel::box({-kInf, 0, 0, -kInf, -kInf, 0}, {kInf, kInf, kInf, kInf, 0, kInf})},
      {{0, 1, 3, 4}, ConstraintModel::box({-kInf, 0, 0, -kInf, -kInf, 0}, {kInf, kInf, kInf, kInf, 0, kInf})},
  };
  for (ArithmeticMode mode : {ArithmeticMode::Float, ArithmeticMode::Rational}) {
    for (const auto& [s, p] : cases) {
      CertifyOptions opt;
      opt.mode = mode;
      const CertificateBundle b = check_fixed_support(a, s, p, opt);
      CHECK(b.aggregate == Verdict::Holds);
      for (const ConditionReport& r : b.conditions) CHECK(r.verdict == Verdict::Holds);
    }
  }
}

TEST_CASE("fixed-support input validation") {
  const Mat a = Mat::Identity(3, 3);
  CHECK_THROWS_AS(check_fixed_support(a, {0}, ConstraintModel::simplex(Vec::Ones(3), 1.0)), Error);
  CHECK_THROWS_AS(check_fixed_support(a, {0}, ConstraintModel::box({-1, -1, -1}, {1, 1, 1})), Error);
  try {
    check_fixed_support(a, {2}, ConstraintModel::box({0.0, 0.0, 0.0}, {kInf, kInf, 0.0}));
    FAIL("expected UnsupportedCombination");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedCombination);
  }
  CertifyOptions opt;
  opt.max_support = 2;
  try {
    check_fixed_support(a, {0, 1, 2}, ConstraintModel::free(3), opt);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BudgetExceeded);
  }
}

TEST_CASE("nearly parallel support columns fail injectivity or a margin") {
  Mat a = Mat::Identity(4, 5);
  a.col(1) = vec({std::cos(1e-4), std::sin(1e-4), 0.0, 0.0});
  a.col(4) = vec({0.5, 0.5, 0.5, 0.5});
  const CertificateBundle b = check_fixed_support(a, {0, 1}, ConstraintModel::free(5));
  CHECK(b.aggregate == Verdict::Fails);
}

TEST_CASE("nonnegative two-index verdict agrees with grid recovery") {
  std::mt19937_64 rng(5);
  int holds = 0, fails = 0;
  for (int t = 0; t < 30; ++t) {
    const Mat a = oracle_ref::random_unit_columns(6, 12, rng);
    const ConstraintModel p = ConstraintModel::nonneg(12);
    const CertificateBundle b = check_fixed_support(a, {0, 1}, p);
    CHECK(b.case_id == "nonneg_support_2");
    if (b.has_boundary()) continue;
    const bool grid = grid_recovers(a, {0, 1}, p, 50, 10.0);
    if (b.aggregate == Verdict::Holds) {
      CHECK(grid);
      ++holds;
    } else {
      ++fails;
    }
  }
  CHECK(holds + fails > 0);
}

TEST_CASE("exact recovery condition below one implies face dominance") {
  std::mt19937_64 rng(6);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    const Mat a = oracle_ref::random_unit_columns(8, 10, rng);
    const IndexSet s = t % 2 ? IndexSet{0, 1, 2} : IndexSet{0, 1};
    if (erc_norm(a, s) >= 1.0 - 1e-9) continue;
    ++checked;
    CertifyOptions opt;
    opt.sample_on_failure = false;
    CHECK(condition(check_fixed_support(a, s, ConstraintModel::free(10), opt), "face_dominance").verdict ==
          Verdict::Holds);
  }
  CHECK(checked > 20);
}

TEST_CASE("rational and float verdicts agree away from the boundary") {
  std::mt19937_64 rng(7);
  const std::vector<ConstraintModel> models = {
      ConstraintModel::free(7), ConstraintModel::nonneg(7),
      ConstraintModel::box({-kInf, 0, -kInf, 0, -kInf, 0, -kInf}, {kInf, kInf, kInf, kInf, 0, kInf, kInf})};
  for (int t = 0; t < 30; ++t) {
    const Mat a = oracle_ref::random_unit_columns(5, 7, rng);
    for (const ConstraintModel& p : models) {
      const IndexSet s = t % 2 ? IndexSet{0, 1, 3} : IndexSet{0, 1};
      CertifyOptions fo;
      fo.sample_on_failure = false;
      CertifyOptions ro = fo;
      ro.mode = ArithmeticMode::Rational;
      const CertificateBundle fb = check_fixed_support(a, s, p, fo);
      const CertificateBundle rb = check_fixed_support(a, s, p, ro);
      REQUIRE(fb.conditions.size() == rb.conditions.size());
      for (std::size_t i = 0; i < fb.conditions.size(); ++i) {
        bool clear = true;
        for (const auto& [name, m] : fb.conditions[i].margins) clear = clear && std::abs(m.value) > 1e-7;
        if (clear && fb.conditions[i].verdict != Verdict::UndecidedSampled)
          CHECK(fb.conditions[i].verdict == rb.conditions[i].verdict);
      }
    }
  }
}

TEST_CASE("condition H") {
  SUBCASE("identity never violates") {
    const ConditionReport r = condition_H_falsify(Mat::Identity(6, 6), ConstraintModel::free(6), 3, 10000, 1);
    CHECK(r.verdict == Verdict::UndecidedSampled);
  }
  SUBCASE("counterexample tie at the empty index set") {
    const Mat a = fixtures::counterexample_matrix();
    const HEvaluation h = condition_H_at(a, ConstraintModel::free(4), vec({1.0, 1.0, 0.0, 0.0}), {});
    CHECK(std::abs(h.margin) <= 1e-12);
    CHECK(std::abs(h.min_inside - h.min_outside) <= 1e-12);
  }
  SUBCASE("instances failing the nonnegative two-index conditions are falsified") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    int built = 0, found = 0;
    while (built < 100) {
      Mat a = oracle_ref::random_unit_columns(3, 3, rng);
      a.col(2) = a.col(0) + a.col(1) + 0.05 * vec({g(rng), g(rng), g(rng)});
      a.col(2).normalize();
      const ConstraintModel p = ConstraintModel::nonneg(3);
      CertifyOptions opt;
      opt.sample_on_failure = false;
      const CertificateBundle b = check_fixed_support(a, {0, 1}, p, opt);
      if (b.aggregate != Verdict::Fails || b.has_boundary()) continue;
      ++built;
      const ConditionReport r = condition_H_falsify(a, p, 2, 10000, static_cast<std::uint64_t>(built));
      if (r.verdict == Verdict::Fails) {
        ++found;
        const std::vector<double>& u = r.witness.at("u");
        const std::vector<double>& j = r.witness.at("J");
        IndexSet jj;
        for (double x : j) jj.push_back(static_cast<int>(x) - 1);
        CHECK(condition_H_at(a, p, Vec::Map(u.data(), 3), jj).margin < -1e-9);
      }
    }
    CHECK(found >= 95);
  }
}

TEST_CASE("instance certificate") {
  std::mt19937_64 rng(9);
  SUBCASE("free coordinates are all unconstrained") {
    const Mat a = oracle_ref::random_unit_columns(8, 10, rng);
    const InstanceCertificate c =
        instance_certificate(a, ConstraintModel::free(10), vec({1, -2, 0, 0.5, 0, 0, 0, 0, 0, 0}), {0}, 3);
    CHECK(c.l_uc == IndexSet{1, 3});
    CHECK(c.l_minus_a.empty());
    CHECK(c.l_plus_b.empty());
    CHECK(c.l_zero_a.empty());
    CHECK(c.l_zero_b.empty());
    CHECK(c.l_zero.empty());
    CHECK(c.shrink_factor == 1.0);
  }
  SUBCASE("nonnegative orthant uses only the lower-zero and unconstrained sets") {
    const Mat a = oracle_ref::random_unit_columns(8, 10, rng);
    const Vec u = vec({1, 2, 0, 0.5, 0, 0, 0, 0, 0, 0});
    const InstanceCertificate c = instance_certificate(a, ConstraintModel::nonneg(10), u, {1}, 3);
    CHECK(c.l_zero_a.size() + c.l_uc.size() == 2);
    CHECK(c.l_minus_a.empty());
    CHECK(c.l_plus_b.empty());
    CHECK(c.c1_satisfied);
  }
  SUBCASE("bounded box forces truncation") {
    Mat a(3, 4);
    a.col(0) = vec({1, 0, 0});
    a.col(1) = vec({0.5, std::sqrt(0.75), 0});
    a.col(2) = vec({0, 0, 1});
    a.col(3) = vec({0, 1, 0});
    const ConstraintModel p = ConstraintModel::box({-1, -1, -1, -1}, {1, 1, 1, 1});
    const Vec u = vec({1, 1, 0, 0});
    const InstanceCertificate c = instance_certificate(a, p, u, {}, 2);
    CHECK(c.l_plus_b == IndexSet{0, 1});
    CHECK(c.shrink_factor == doctest::Approx(std::sqrt(1.0 / 1.5)));
    CHECK(c.shrink_factor < 1.0);
    for (int j : c.l_plus_b) {
      const CoordinateScore s = coordinate_score(a, a * u, p, c.v, j);
      CHECK(s.t_tilde > 1.0);
      CHECK(s.t_star == doctest::Approx(1.0));
    }
  }
  SUBCASE("irreducibility is required") {
    try {
      instance_certificate(Mat::Identity(3, 3), ConstraintModel::box({0, 0, 0}, {1, 1, 0}), vec({1, 1, 0}), {0});
      FAIL("expected NotIrreducible");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotIrreducible);
    }
  }
}

TEST_CASE("recovery constants") {
  SUBCASE("orthonormal columns") {
    const RecoveryConstants c = recovery_constants(Mat::Identity(6, 6), 2, classify_cone(ConstraintModel::free(6)));
    CHECK(std::abs(c.delta_hat) <= 1e-12);
    CHECK(std::abs(c.theta_hat) <= 1e-12);
    CHECK(c.satisfied);
  }
  SUBCASE("counterexample by enumeration") {
    const Mat a = fixtures::counterexample_matrix();
    const RecoveryConstants c = recovery_constants(a, 3, classify_cone(ConstraintModel::free(4)));
    double lowest = INFINITY;
    const std::vector<IndexSet> supports = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    for (const IndexSet& s : supports) {
      const Mat as = columns(a, s);
      lowest = std::min(lowest, oracle_ref::inverse_power_min_eig(as.transpose() * as));
    }
    CHECK(std::abs(c.delta_hat - (1.0 - lowest)) <= 1e-9);
    const Mat as = columns(a, {0, 1, 2});
    CHECK(std::abs(oracle_ref::inverse_power_min_eig(as.transpose() * as) - 1.0 / 3) <= 1e-9);
    CHECK(c.delta_hat >= 2.0 / 3 - 1e-9);
    CHECK(c.theta_hat_literal >= 1.0);
    CHECK(std::abs(min_restricted_eigenvalue(a, 3) - lowest) <= 1e-9);
  }
  SUBCASE("closed form bounds the sampled supremum") {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 5; ++t) {
      const Mat a = oracle_ref::random_unit_columns(8, 20, rng);
      const ConeClassification cls = classify_cone(ConstraintModel::free(20));
      const double closed = recovery_constants(a, 2, cls).theta_hat;
      const double sampled = sampled_theta(a, 2, cls, 100000, 7 + t);
      CHECK(sampled <= closed + 1e-9);
      CHECK(sampled >= closed - 1e-3);
    }
  }
  SUBCASE("budget") {
    Mat a = Mat::Identity(40, 40);
    try {
      recovery_constants(a, 20, classify_cone(ConstraintModel::free(40)));
      FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
  }
}

TEST_CASE("perturbation stability") {
  const ConeClassification cls = classify_cone(ConstraintModel::free(8));
  const PerturbationReport r = perturbation_stability(Mat::Identity(8, 8), 2, cls, {0.0, 1e-4, 1e-2, 5e-2, 1e-1}, 50, 3);
  REQUIRE(r.points.size() >= 5);
  CHECK(r.points.front().eta == 0.0);
  CHECK(r.points.front().satisfied == r.points.front().trials);
  for (const PerturbationPoint& p : r.points)
    if (p.eta == 1e-4) CHECK(p.satisfied == p.trials);
  for (std::size_t i = 1; i < r.points.size(); ++i) CHECK(r.points[i].mean_margin <= r.points[i - 1].mean_margin + 1e-9);
  CHECK(r.meets_floor);
  CHECK(std::abs(r.lipschitz_c - 3.0) <= 1e-9);
}
