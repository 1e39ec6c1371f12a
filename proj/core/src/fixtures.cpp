#include "cmp/fixtures.hpp"

#include <cmath>

#include "cmp/error.hpp"

namespace cmp::fixtures {

Mat counterexample_matrix() {
  const double s2 = std::sqrt(2.0), s6 = std::sqrt(6.0), s10 = std::sqrt(10.0);
  Mat a(4, 4);
  a << 1.0, -1.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0,
       0.0, 2.0 * s2 / 3.0, -s2 / 3.0, s2 / 3.0,
       0.0, 0.0, s6 / 3.0, -s6 / 12.0,
       0.0, 0.0, 0.0, s10 / 4.0;
  return a;
}

RMat counterexample_coefficients() {
  RMat c = RMat::Zero(4, 4);
  c(0, 0) = 1;
  c(0, 1) = make_rational(-1, 3);
  c(0, 2) = make_rational(-1, 3);
  c(0, 3) = make_rational(1, 3);
  c(1, 1) = make_rational(2, 3);
  c(1, 2) = make_rational(-1, 3);
  c(1, 3) = make_rational(1, 3);
  c(2, 2) = make_rational(1, 3);
  c(2, 3) = make_rational(-1, 12);
  c(3, 3) = make_rational(1, 4);
  return c;
}

std::vector<long> counterexample_radicands() { return {1, 2, 6, 10}; }

RMat counterexample_gram_exact() {
  const Rational one(1), third = make_rational(-1, 3), p3 = make_rational(1, 3), half = make_rational(-1, 2);
  RMat g(4, 4);
  g << one, third, third, p3,
       third, one, third, p3,
       third, third, one, half,
       p3, p3, half, one;
  return g;
}

RMat counterexample_h_exact() {
  const RMat g = counterexample_gram_exact();
  const RVec h4 = g.block(0, 3, 3, 1);
  RMat h(3, 6);
  for (int i = 0; i < 3; ++i) {
    const RVec hi = g.block(0, i, 3, 1);
    h.col(2 * i) = h4 + hi;
    h.col(2 * i + 1) = h4 - hi;
  }
  return h;
}

Mat counterexample_h() { return to_double(counterexample_h_exact()); }

Mat counterexample_extension(int m, int n) {
  if (m < 4 || n < 4) fail(ErrorCode::InvalidArgument, "extension needs m >= 4 and n >= 4");
  const Mat a = counterexample_matrix();
  Mat out = Mat::Zero(m, n);
  out.block(0, 0, 4, 4) = a;
  for (int k = 4; k < n; ++k) out.block(0, k, 4, 1) = (k % 2 == 0 ? 1.0 : -1.0) * a.col(3);
  return out;
}

RMat counterexample_extension_gram_exact(int n) {
  if (n < 4) fail(ErrorCode::InvalidArgument, "extension needs n >= 4");
  const RMat g4 = counterexample_gram_exact();
  std::vector<int> base(static_cast<std::size_t>(n));
  std::vector<int> sign(static_cast<std::size_t>(n), 1);
  for (int k = 0; k < n; ++k) {
    base[static_cast<std::size_t>(k)] = k < 4 ? k : 3;
    if (k >= 4 && k % 2 == 1) sign[static_cast<std::size_t>(k)] = -1;
  }
  RMat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = g4(base[i], base[j]) * Rational(sign[i] * sign[j]);
  return g;
}

NonconvexExample nonconvex_example() {
  NonconvexExample ex;
  ex.a = Mat(1, 2);
  ex.a << 0.75, 1.0;
  ex.y = Vec::Constant(1, 1.5);
  ex.segment_p = Vec(2);
  ex.segment_p << 2.0 / 3.0, 1.0;
  // (3/4) s^2 + s = 3/2  =>  s = (sqrt(22) - 2) / 3
  const double s = (std::sqrt(22.0) - 2.0) / 3.0;
  ex.segment_q = Vec(2);
  ex.segment_q << s * s, s;
  ex.a_swapped = Mat(1, 2);
  ex.a_swapped << 1.0, 0.75;
  ex.printed_p = Vec(2);
  ex.printed_p << 0.75, 1.0;
  const double r = std::sqrt(105.0) - 3.0;
  ex.printed_q = Vec(2);
  ex.printed_q << r * r / 64.0, r / 8.0;
  return ex;
}

}  // namespace cmp::fixtures
