#include "cmp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmp/error.hpp"
#include "cmp/rational.hpp"

namespace cmp {

RMat to_rational(const Eigen::MatrixXd& m) {
  RMat out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_rational(m(i, j));
  return out;
}

Eigen::MatrixXd to_double(const RMat& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

MeasurementMatrix::MeasurementMatrix(Mat entries) : entries_(std::move(entries)) {
  column_norms_ = entries_.colwise().norm().transpose();
  for (int j = 0; j < n(); ++j)
    if (!(column_norms_(j) >= 1e-14))
      fail(ErrorCode::ZeroColumn, "column " + std::to_string(j + 1) + " is zero");
}

NormalizedMatrix normalize_columns(const MeasurementMatrix& a) {
  Mat u = a.entries();
  const Vec& s = a.column_norms();
  for (int j = 0; j < a.n(); ++j) u.col(j) /= s(j);
  return NormalizedMatrix{MeasurementMatrix(std::move(u)), s};
}

Mat normalize_columns(const Mat& a) { return normalize_columns(MeasurementMatrix(a)).unit.entries(); }

GramCache gram(const Mat& a) {
  const Eigen::Index n = a.cols();
  Mat t(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = a.col(i).dot(a.col(j));
      t(i, j) = v;
      t(j, i) = v;
    }
  return GramCache{std::move(t)};
}

Mat columns(const Mat& a, const IndexSet& j) {
  Mat out(a.rows(), static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = a.col(j[k]);
  return out;
}

namespace {

bool qr_full_rank(const Eigen::ColPivHouseholderQR<Mat>& qr, double norm, const NumericPolicy& policy) {
  const Eigen::Index k = std::min(qr.matrixQR().rows(), qr.matrixQR().cols());
  if (qr.matrixQR().cols() > qr.matrixQR().rows()) return false;
  const double thresh = policy.rank_tol * norm;
  for (Eigen::Index i = 0; i < k; ++i)
    if (std::abs(qr.matrixQR()(i, i)) <= thresh) return false;
  return true;
}

}  // namespace

bool full_column_rank(const Mat& a_j, const NumericPolicy& policy) {
  if (a_j.cols() == 0) return true;
  Eigen::ColPivHouseholderQR<Mat> qr(a_j);
  return qr_full_rank(qr, a_j.norm(), policy);
}

Vec least_squares(const Mat& a_j, const Vec& y, const NumericPolicy& policy) {
  if (a_j.cols() == 0) return Vec(0);
  Eigen::ColPivHouseholderQR<Mat> qr(a_j);
  if (!qr_full_rank(qr, a_j.norm(), policy))
    fail(ErrorCode::RankDeficient, "column submatrix is rank deficient");
  return qr.solve(y);
}

Vec min_norm_least_squares(const Mat& a_j, const Vec& y) {
  if (a_j.cols() == 0) return Vec(0);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(a_j);
  return cod.solve(y);
}

Vec jacobi_eigenvalues(const Mat& m_in, double tol) {
  const Eigen::Index n = m_in.rows();
  Mat m = 0.5 * (m_in + m_in.transpose());
  const double scale = std::max(m.norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = 0; q < n; ++q)
        if (p != q) off += m(p, q) * m(p, q);
    if (std::sqrt(off) < tol * scale) break;
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (m(p, q) == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
  }
  Vec ev = m.diagonal();
  std::sort(ev.data(), ev.data() + ev.size());
  return ev;
}

double min_eig_sym(const Mat& m, double tol) {
  if (m.rows() == 0) fail(ErrorCode::InvalidArgument, "eigenvalue of an empty matrix");
  return jacobi_eigenvalues(m, tol)(0);
}

double spectral_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool set_contains(const IndexSet& a, int i) { return std::binary_search(a.begin(), a.end(), i); }

IndexSet support(const Vec& x, double tol) {
  IndexSet out;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (std::abs(x(i)) > tol) out.push_back(static_cast<int>(i));
  return out;
}

IndexSet range_set(int n) {
  IndexSet out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

}  // namespace cmp
