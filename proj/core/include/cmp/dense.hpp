#pragma once

// Small dense kernels templated on the scalar so that the same code runs in
// double precision and in exact rational arithmetic.

#include <Eigen/Dense>
#include <cmath>
#include <type_traits>
#include <vector>

#include "cmp/error.hpp"
#include "cmp/rational.hpp"

namespace cmp {

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

template <class T>
T abs_value(const T& x) {
  if constexpr (is_exact_v<T>) {
    return boost::multiprecision::abs(x);
  } else {
    return std::abs(x);
  }
}

template <class T>
using DMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using DVec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
DMat<T> submatrix(const DMat<T>& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  DMat<T> out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows[r], cols[c]);
  return out;
}

// Gauss-Jordan inverse with partial pivoting. In floating point a pivot below
// pivot_tol * max|m| is treated as singular; in exact mode only a zero pivot is.
template <class T>
DMat<T> inverse(const DMat<T>& m, double pivot_tol = 1e-13) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) fail(ErrorCode::InvalidArgument, "inverse of a non-square matrix");
  DMat<T> a = m;
  DMat<T> inv = DMat<T>::Identity(n, n);
  T scale = T(0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (abs_value(a(i, j)) > scale) scale = abs_value(a(i, j));
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (abs_value(a(r, col)) > abs_value(a(piv, col))) piv = r;
    bool singular;
    if constexpr (is_exact_v<T>) {
      singular = a(piv, col) == 0;
    } else {
      singular = abs_value(a(piv, col)) <= pivot_tol * (scale > 0 ? scale : 1.0);
    }
    if (singular) fail(ErrorCode::SingularBlock, "matrix is singular to working precision");
    if (piv != col) {
      a.row(piv).swap(a.row(col));
      inv.row(piv).swap(inv.row(col));
    }
    const T p = a(col, col);
    a.row(col) /= p;
    inv.row(col) /= p;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const T f = a(r, col);
      if (f == T(0)) continue;
      a.row(r) -= f * a.row(col);
      inv.row(r) -= f * inv.row(col);
    }
  }
  return inv;
}

// Determinant by elimination with partial pivoting.
template <class T>
T determinant(const DMat<T>& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return T(1);
  DMat<T> a = m;
  T det = T(1);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (abs_value(a(r, col)) > abs_value(a(piv, col))) piv = r;
    if (a(piv, col) == T(0)) return T(0);
    if (piv != col) {
      a.row(piv).swap(a.row(col));
      det = -det;
    }
    det *= a(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const T f = a(r, col) / a(col, col);
      if (f == T(0)) continue;
      a.row(r) -= f * a.row(col);
    }
  }
  return det;
}

// Indices of {0..n-1} not in the sorted set j.
inline std::vector<int> complement(int n, const std::vector<int>& j) {
  std::vector<int> out;
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    if (k < j.size() && j[k] == i) {
      ++k;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

// M / M_JJ = M_CC - M_CJ M_JJ^{-1} M_JC over the complement C of J (ascending order).
template <class T>
DMat<T> schur_complement(const DMat<T>& m, const std::vector<int>& j) {
  const std::vector<int> c = complement(static_cast<int>(m.rows()), j);
  if (j.empty()) return submatrix(m, c, c);
  const DMat<T> mjj_inv = inverse(submatrix(m, j, j));
  return submatrix(m, c, c) - submatrix(m, c, j) * mjj_inv * submatrix(m, j, c);
}

}  // namespace cmp
