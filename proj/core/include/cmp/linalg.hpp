#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cmp/numeric_policy.hpp"

namespace cmp {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
// Sorted, duplicate-free, 0-based coordinate indices.
using IndexSet = std::vector<int>;

// Dense m x N matrix with nonzero columns and their cached norms.
class MeasurementMatrix {
 public:
  explicit MeasurementMatrix(Mat entries);

  const Mat& entries() const { return entries_; }
  const Vec& column_norms() const { return column_norms_; }
  int m() const { return static_cast<int>(entries_.rows()); }
  int n() const { return static_cast<int>(entries_.cols()); }

 private:
  Mat entries_;
  Vec column_norms_;
};

struct NormalizedMatrix {
  MeasurementMatrix unit;
  Vec scales;
};

// A = A_unit * diag(scales). Throws ZeroColumn for a column with norm < 1e-14.
NormalizedMatrix normalize_columns(const MeasurementMatrix& a);
Mat normalize_columns(const Mat& a);

struct GramCache {
  Mat theta;
};

// Symmetric Gram matrix computed on the upper triangle and mirrored.
GramCache gram(const Mat& a);

Mat columns(const Mat& a, const IndexSet& j);

// Unique minimizer of ||A_J w - y||; throws RankDeficient when
// min |R_ii| <= rank_tol * ||A_J||_F.
Vec least_squares(const Mat& a_j, const Vec& y, const NumericPolicy& policy = {});
bool full_column_rank(const Mat& a_j, const NumericPolicy& policy = {});
// Minimum-norm minimizer, defined for any rank.
Vec min_norm_least_squares(const Mat& a_j, const Vec& y);

// Cyclic Jacobi; returns eigenvalues in ascending order.
Vec jacobi_eigenvalues(const Mat& m, double tol = 1e-12);
double min_eig_sym(const Mat& m, double tol = 1e-12);
double spectral_norm(const Mat& a);

// Index-set helpers.
IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);
bool set_contains(const IndexSet& a, int i);
IndexSet support(const Vec& x, double tol = 0.0);
IndexSet range_set(int n);

}  // namespace cmp
