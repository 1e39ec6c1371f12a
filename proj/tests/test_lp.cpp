#include <doctest.h>

#include <random>

#include "cmp/error.hpp"
#include "cmp/fixtures.hpp"
#include "cmp/lp.hpp"

using namespace cmp;

namespace {

bool witness_satisfies(const Mat& h, const std::vector<int>& sigma, const MotzkinWitness<double>& w) {
  if (w.u.minCoeff() < -1e-12 || w.w.minCoeff() < -1e-12 || w.u.sum() < 1.0 - 1e-9) return false;
  Vec ds = Vec::Zero(3);
  for (int i = 0; i < 3; ++i) ds(i) = sigma[static_cast<std::size_t>(i)];
  const Vec r = w.u + ds.asDiagonal() * (h * w.w);
  return r.cwiseAbs().maxCoeff() <= 1e-9;
}

// Looks for v >= 1 with (D_sigma H)^T v >= 0 through a second feasibility system.
std::optional<Vec> positive_primal(const Mat& h, const std::vector<int>& sigma) {
  Mat dh = h;
  for (int i = 0; i < 3; ++i) dh.row(i) *= sigma[static_cast<std::size_t>(i)];
  const int q = static_cast<int>(h.cols());
  FeasibilitySystem<double> sys;
  sys.e = Mat::Zero(q, 3 + q);
  sys.e.leftCols(3) = dh.transpose();
  sys.e.rightCols(q) = -Mat::Identity(q, q);
  sys.d = -dh.transpose() * Vec::Ones(3);
  const std::optional<Vec> x = feasible_eq_nonneg(sys);
  if (!x) return std::nullopt;
  return Vec(x->head(3) + Vec::Ones(3));
}

std::vector<std::vector<int>> sigmas() {
  std::vector<std::vector<int>> out;
  for (int m = 0; m < 8; ++m) out.push_back({m & 1 ? -1 : 1, m & 2 ? -1 : 1, m & 4 ? -1 : 1});
  return out;
}

}  // namespace

TEST_CASE("feasible_eq_nonneg") {
  FeasibilitySystem<double> sys;
  sys.e = Mat(1, 2);
  sys.e << 1, -1;
  sys.d = Vec::Zero(1);
  sys.strict_group = {0};
  const std::optional<Vec> x = feasible_eq_nonneg(sys);
  REQUIRE(x);
  CHECK(std::abs((*x)(0) - (*x)(1)) <= 1e-9);
  CHECK((*x)(0) >= 1.0 - 1e-9);

  // d = -(column sum) - n lies outside the cone of the nonnegative columns.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int t = 0; t < 50; ++t) {
    FeasibilitySystem<double> s;
    s.e = Mat(3, 5);
    for (Eigen::Index i = 0; i < s.e.size(); ++i) s.e.data()[i] = u(rng);
    s.d = -s.e.rowwise().sum() - Vec::Ones(3);
    CHECK_FALSE(feasible_eq_nonneg(s));
    // Farkas: y = -1 separates, y^T E <= 0 and y^T d > 0.
    CHECK((-Vec::Ones(3)).transpose() * s.e * Vec::Ones(5) < 0);
    CHECK((-Vec::Ones(3)).dot(s.d) > 0);
  }
}

TEST_CASE("rational feasibility is exact") {
  FeasibilitySystem<Rational> sys;
  sys.e = RMat(2, 3);
  sys.e << make_rational(1, 3), make_rational(2, 3), 0, 0, make_rational(1, 7), 1;
  sys.d = RVec(2);
  sys.d << 1, make_rational(3, 7);
  const std::optional<RVec> x = feasible_eq_nonneg(sys);
  REQUIRE(x);
  CHECK(sys.e * *x == sys.d);
  for (Eigen::Index i = 0; i < x->size(); ++i) CHECK((*x)(i) >= 0);
}

TEST_CASE("listed certificate for the all-positive sign pattern") {
  const RMat h = fixtures::counterexample_h_exact();
  RVec w = RVec::Zero(h.cols());
  w(1) = 1;
  w(3) = 1;
  const RVec u = -(h * w);
  CHECK(u(0) == 0);
  CHECK(u(1) == 0);
  CHECK(u(2) == make_rational(1, 3));
}

TEST_CASE("motzkin_alternative") {
  const Mat h = fixtures::counterexample_h();
  const RMat hx = fixtures::counterexample_h_exact();
  for (const std::vector<int>& s : sigmas()) {
    const MotzkinWitness<double> w = motzkin_alternative(h, s);
    REQUIRE(w.exists);
    CHECK(witness_satisfies(h, s, w));
    const MotzkinWitness<Rational> wx = motzkin_alternative(hx, s);
    REQUIRE(wx.exists);
    RVec ds(3);
    for (int i = 0; i < 3; ++i) ds(i) = s[static_cast<std::size_t>(i)];
    CHECK(wx.u + ds.asDiagonal() * (hx * wx.w) == RVec::Zero(3));
  }
  for (const std::vector<int>& s : sigmas()) CHECK_FALSE(motzkin_alternative(Mat(Mat::Zero(3, 6)), s).exists);

  // With every column nonnegative, v = 1 satisfies H^T v >= 0 for sigma = +.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    Mat p(3, 6);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng);
    CHECK((p.transpose() * Vec::Ones(3)).minCoeff() >= 0);
    CHECK_FALSE(motzkin_alternative(p, {1, 1, 1}).exists);
  }
}

TEST_CASE("theorem of the alternative on random systems") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  int ambiguous = 0, primal = 0, dual = 0;
  for (int t = 0; t < 500; ++t) {
    Mat h(3, 6);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = g(rng);
    for (const std::vector<int>& s : sigmas()) {
      try {
        const MotzkinWitness<double> w = motzkin_alternative(h, s);
        const std::optional<Vec> v = positive_primal(h, s);
        CHECK(w.exists != v.has_value());
        if (w.exists) {
          CHECK(witness_satisfies(h, s, w));
          ++dual;
        } else {
          ++primal;
        }
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NumericallyAmbiguous);
        ++ambiguous;
      }
    }
  }
  CHECK(primal > 0);
  CHECK(dual > 0);
  CHECK(ambiguous < 10);
}
