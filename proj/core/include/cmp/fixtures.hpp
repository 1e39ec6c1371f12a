#pragma once

#include "cmp/linalg.hpp"
#include "cmp/rational.hpp"

#include <vector>

namespace cmp::fixtures {

// The 4x4 unit-column matrix for which OMP recovers every vector supported on
// S = {1,2,3} although the exact recovery condition holds only with equality.
Mat counterexample_matrix();
// A = diag(sqrt(r)) C with rational C and integer radicands r = (1, 2, 6, 10),
// so that A^T A = C^T diag(r) C is computable exactly.
RMat counterexample_coefficients();
std::vector<long> counterexample_radicands();
// Its Gram matrix with exact rational entries (1 on the diagonal), as printed.
RMat counterexample_gram_exact();
// H = [h4+h1, h4-h1, h4+h2, h4-h2, h4+h3, h4-h3] with h_i the columns of A_S^T A.
RMat counterexample_h_exact();
Mat counterexample_h();

// Extension to m x n: B = [A, B_5, ..., B_n] with B_k = +A_4 for odd k and -A_4
// for even k, padded with m - 4 zero rows. Requires m >= 4 and n >= 4.
Mat counterexample_extension(int m, int n);
RMat counterexample_extension_gram_exact(int n);

// The one-row instance of the nonconvex two-dimensional demo set.
struct NonconvexExample {
  Mat a;           // 1 x 2, entries (3/4, 1)
  Vec y;           // (3/2)
  Vec segment_p;   // (2/3, 1): intersection of Ax = y with x2 = 1
  Vec segment_q;   // intersection of Ax = y with x1 = x2^2
  Mat a_swapped;   // 1 x 2, entries (1, 3/4)
  Vec printed_p;   // (3/4, 1)
  Vec printed_q;   // ((sqrt(105)-3)^2/64, (sqrt(105)-3)/8)
};
NonconvexExample nonconvex_example();

}  // namespace cmp::fixtures
