#include <doctest.h>

#include <random>

#include "cmp/dense.hpp"
#include "cmp/error.hpp"
#include "cmp/fixtures.hpp"
#include "cmp/linalg.hpp"
#include "oracles.hpp"

using namespace cmp;

TEST_CASE("normalize_columns") {
  SUBCASE("identity is unchanged") {
    const NormalizedMatrix nm = normalize_columns(MeasurementMatrix(Mat::Identity(2, 2)));
    CHECK(nm.unit.entries().isApprox(Mat::Identity(2, 2)));
    CHECK(nm.scales(0) == doctest::Approx(1.0));
    CHECK(nm.scales(1) == doctest::Approx(1.0));
  }
  SUBCASE("3-4-5 column") {
    Mat a(2, 1);
    a << 3, 4;
    const NormalizedMatrix nm = normalize_columns(MeasurementMatrix(a));
    CHECK(nm.unit.entries()(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(nm.unit.entries()(1, 0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(nm.scales(0) == doctest::Approx(5.0));
  }
  SUBCASE("counterexample matrix already has unit columns") {
    const Mat a = fixtures::counterexample_matrix();
    CHECK((normalize_columns(a) - a).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("reconstruction and unit norms on random input") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    Mat a(5, 7);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = 3.0 * g(rng);
    const NormalizedMatrix nm = normalize_columns(MeasurementMatrix(a));
    for (int j = 0; j < 7; ++j) CHECK(std::abs(nm.unit.entries().col(j).norm() - 1.0) <= 1e-12);
    CHECK((nm.unit.entries() * nm.scales.asDiagonal().toDenseMatrix() - a).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("zero column is rejected") {
    Mat a = Mat::Identity(3, 3);
    a.col(1).setZero();
    try {
      normalize_columns(MeasurementMatrix(a));
      FAIL("expected ZeroColumn");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroColumn);
    }
  }
}

TEST_CASE("gram") {
  CHECK(gram(Mat::Identity(4, 4)).theta.isApprox(Mat::Identity(4, 4)));

  const Mat g = gram(fixtures::counterexample_matrix()).theta;
  CHECK(std::abs(g(0, 1) + 1.0 / 3) <= 1e-12);
  CHECK(std::abs(g(0, 2) + 1.0 / 3) <= 1e-12);
  CHECK(std::abs(g(1, 2) + 1.0 / 3) <= 1e-12);
  CHECK(std::abs(g(3, 0) - 1.0 / 3) <= 1e-12);
  CHECK(std::abs(g(3, 1) - 1.0 / 3) <= 1e-12);
  CHECK(std::abs(g(3, 2) + 1.0 / 2) <= 1e-12);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(g(i, i) - 1.0) <= 1e-12);

  std::mt19937_64 rng(11);
  const Mat a = oracle_ref::random_unit_columns(5, 8, rng);
  const Mat t = gram(a).theta;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      double dot = 0.0;
      for (int r = 0; r < 5; ++r) dot += a(r, i) * a(r, j);
      CHECK(std::abs(t(i, j) - dot) <= 1e-14);
      CHECK(t(i, j) == t(j, i));
    }
}

TEST_CASE("least_squares") {
  Vec y(2);
  y << 1, 2;
  CHECK(least_squares(Mat::Identity(2, 2), y).isApprox(y));

  const Mat a = fixtures::counterexample_matrix();
  const Mat as = a.leftCols(3);
  const Vec w = least_squares(as, as * Vec::Ones(3));
  CHECK((w - Vec::Ones(3)).cwiseAbs().maxCoeff() <= 1e-10);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat b = oracle_ref::random_unit_columns(9, 4, rng);
    Vec x(4);
    x << 1, -2, 0.5, 3;
    Vec noise = oracle_ref::random_unit_columns(9, 1, rng).col(0);
    const Vec rhs = b * x + 0.1 * noise;
    const Vec sol = least_squares(b, rhs);
    CHECK((sol - oracle_ref::normal_equations(b, rhs)).cwiseAbs().maxCoeff() <= 1e-8);
    const double ortho = (b.transpose() * (b * sol - rhs)).cwiseAbs().maxCoeff();
    CHECK(ortho <= 1e-9 * (b.norm() * rhs.norm() + 1.0));
  }

  Mat dep(3, 2);
  dep << 1, 2, 1, 2, 1, 2;
  try {
    least_squares(dep, Vec::Ones(3));
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
  CHECK_FALSE(full_column_rank(dep));
}

TEST_CASE("min_eig_sym") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2;
  d(1, 1) = 5;
  CHECK(min_eig_sym(d) == doctest::Approx(2.0));

  // (4/3) I - (1/3) J has eigenvalues 4/3 (twice) and 4/3 - 1.
  Mat m = Mat::Constant(3, 3, -1.0 / 3);
  m.diagonal().setOnes();
  const double lambda = 1.0 / 3.0;
  // The characteristic polynomial vanishes at the returned value.
  const double mu = min_eig_sym(m);
  CHECK(std::abs(oracle_ref::cofactor_det(m - mu * Mat::Identity(3, 3))) <= 1e-9);
  CHECK(std::abs(mu - lambda) <= 1e-9);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat b = oracle_ref::random_unit_columns(6, 4, rng);
    const Mat s = b.transpose() * b;
    CHECK(std::abs(min_eig_sym(s) - oracle_ref::inverse_power_min_eig(s)) <= 1e-8);
  }
}

TEST_CASE("jacobi eigenvalues reproduce trace and determinant") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    Mat b(n, n);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
    const Mat s = 0.5 * (b + b.transpose());
    const Vec ev = jacobi_eigenvalues(s);
    CHECK(std::is_sorted(ev.data(), ev.data() + ev.size()));
    const double tr = s.trace();
    CHECK(std::abs(ev.sum() - tr) <= 1e-9 * std::max(1.0, std::abs(tr)));
    const double det = oracle_ref::cofactor_det(s);
    CHECK(std::abs(ev.prod() - det) <= 1e-9 * std::max(1.0, std::abs(det)));
  }
}

TEST_CASE("schur_complement") {
  const Mat id = Mat::Identity(4, 4);
  CHECK(schur_complement<double>(id, {1}).isApprox(Mat::Identity(3, 3)));

  const RMat g = fixtures::counterexample_gram_exact();
  const RMat gss = submatrix<Rational>(g, {0, 1, 2}, {0, 1, 2});
  const RMat u1 = schur_complement<Rational>(gss, {0});
  CHECK(u1(0, 0) == make_rational(8, 9));
  CHECK(u1(1, 1) == make_rational(8, 9));
  CHECK(u1(0, 1) == make_rational(-4, 9));
  CHECK(u1(1, 0) == make_rational(-4, 9));

  try {
    Mat sing = Mat::Ones(3, 3);
    schur_complement<double>(sing, {0, 1});
    FAIL("expected SingularBlock");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularBlock);
  }
}

TEST_CASE("schur determinant identity on random positive definite matrices") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 5;
    Mat b(n, n);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
    const Mat m = b * b.transpose() + 0.5 * Mat::Identity(n, n);
    IndexSet j;
    for (int i = 0; i < n; ++i)
      if ((trial >> i) & 1) j.push_back(i);
    if (j.empty() || static_cast<int>(j.size()) == n) j = {0};
    const Mat sc = schur_complement<double>(m, j);
    const double lhs = oracle_ref::cofactor_det(sc) * oracle_ref::cofactor_det(submatrix<double>(m, j, j));
    const double rhs = oracle_ref::cofactor_det(m);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    CHECK(min_eig_sym(sc) > 0.0);
  }
}

TEST_CASE("index set helpers") {
  CHECK(set_union({0, 2}, {1, 2}) == IndexSet{0, 1, 2});
  CHECK(set_difference({0, 1, 2}, {1}) == IndexSet{0, 2});
  CHECK(set_contains({0, 3}, 3));
  Vec x(4);
  x << 0, 1e-3, 0, -2;
  CHECK(support(x) == IndexSet{1, 3});
  CHECK(range_set(3) == IndexSet{0, 1, 2});
}
