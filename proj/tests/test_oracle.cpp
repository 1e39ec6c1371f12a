#include <doctest.h>

#include <random>

#include "cmp/error.hpp"
#include "cmp/fixtures.hpp"
#include "cmp/oracle.hpp"
#include "cmp/pursuit.hpp"
#include "cmp/random.hpp"
#include "oracles.hpp"

using namespace cmp;

namespace {

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("l0_brute") {
  SUBCASE("zero measurement needs no columns") {
    const oracle::L0Solution s = oracle::l0_brute(Mat::Identity(3, 5), Vec::Zero(3), ConstraintModel::free(5), 3);
    CHECK(s.cardinality == 0);
  }
  SUBCASE("nonconvex example needs both coordinates") {
    const fixtures::NonconvexExample ex = fixtures::nonconvex_example();
    const oracle::L0Solution s = oracle::l0_brute(ex.a, ex.y, ConstraintModel::nonconvex_demo(), 2);
    CHECK(s.cardinality == 2);
    REQUIRE(s.supports.size() == 1);
    CHECK(s.supports[0] == IndexSet{0, 1});
    CHECK(std::abs((ex.a * s.representatives[0])(0) - 1.5) <= 1e-9);
  }
  SUBCASE("planted sparse vectors are recovered at their cardinality") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
      const Mat a = oracle_ref::random_unit_columns(6, 9, rng);
      const ConstraintModel p = t % 2 ? ConstraintModel::nonneg(9) : ConstraintModel::free(9);
      const IndexSet s = random_support(plantable_indices(p), 2, rng);
      const Vec z = planted_vector(p, s, rng);
      const oracle::L0Solution sol = oracle::l0_brute(a, a * z, p, 3);
      CHECK(sol.cardinality == 2);
      REQUIRE(sol.supports.size() == 1);
      CHECK(sol.supports[0] == s);
      CHECK((sol.representatives[0] - z).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
  SUBCASE("an inconsistent system explores every subset") {
    Mat a = Mat::Zero(3, 4);
    a(0, 0) = a(0, 1) = a(1, 2) = a(1, 3) = 1.0;
    Vec y(3);
    y << 0.0, 0.0, 1.0;
    try {
      oracle::l0_brute(a, y, ConstraintModel::free(4), 2);
      FAIL("expected NoSolutionWithinKmax");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoSolutionWithinKmax);
    }
  }
  SUBCASE("subproblem count sums binomials up to the answer") {
    Mat b = Mat::Identity(2, 5);
    b.col(2) = b.col(0);
    b.col(3) = b.col(0);
    b.col(4) = b.col(0);
    Vec y(2);
    y << 1.0, 1.0;
    const oracle::L0Solution s = oracle::l0_brute(b, y, ConstraintModel::free(5), 3);
    CHECK(s.cardinality == 2);
    CHECK(s.supports.size() == 4);
    CHECK(s.subproblems_solved == binomial(5, 0) + binomial(5, 1) + binomial(5, 2));
  }
  SUBCASE("budget") {
    try {
      oracle::l0_brute(Mat::Identity(30, 40), Vec::Ones(30), ConstraintModel::free(40), 10);
      FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BudgetExceeded);
    }
  }
}

TEST_CASE("nonconvex restricted solve") {
  const fixtures::NonconvexExample ex = fixtures::nonconvex_example();
  SUBCASE("second coordinate alone") {
    const oracle::NonconvexSolution s = oracle::nonconvex_line7_solve(ex.a, ex.y, {1});
    CHECK(s.kind == oracle::NonconvexSolution::Kind::Unique);
    CHECK(std::abs(s.p(0)) <= 1e-9);
    CHECK(std::abs(s.p(1) - 1.0) <= 1e-6);
  }
  SUBCASE("both coordinates give the segment") {
    const oracle::NonconvexSolution s = oracle::nonconvex_line7_solve(ex.a, ex.y, {0, 1});
    CHECK(s.kind == oracle::NonconvexSolution::Kind::Segment);
    CHECK((s.p - ex.segment_p).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((s.q - ex.segment_q).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(std::abs((ex.a * s.p)(0) - 1.5) <= 1e-9);
    CHECK(std::abs((ex.a * s.q)(0) - 1.5) <= 1e-9);
    CHECK(s.objective <= 1e-12);
  }
  SUBCASE("empty index set") {
    const oracle::NonconvexSolution s = oracle::nonconvex_line7_solve(ex.a, ex.y, {});
    CHECK(s.p == Vec::Zero(2));
    CHECK(s.objective == doctest::Approx(2.25));
  }
}

TEST_CASE("nonconvex restricted solve matches a dense membership grid") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int t = 0; t < 10; ++t) {
    Mat a(1, 2);
    a << u(rng), u(rng);
    Vec y(1);
    y << u(rng);
    double best = (y).squaredNorm();
    const int steps = 1500;
    for (int i = 0; i <= steps; ++i) {
      const double x1 = 1.0 * i / steps;
      for (int k = 0; k <= steps; ++k) {
        const double x2 = 1.0 * k / steps;
        if (x2 * x2 < x1 && k != 0) continue;
        best = std::min(best, std::pow(a(0, 0) * x1 + a(0, 1) * x2 - y(0), 2));
      }
    }
    const oracle::NonconvexSolution s = oracle::nonconvex_line7_solve(a, y, {0, 1});
    CHECK(s.objective <= best + 1e-9);
    CHECK(s.objective >= best - 1e-2);
    CHECK(contains(ConstraintModel::nonconvex_demo(), s.p, 1e-7));
  }
}
