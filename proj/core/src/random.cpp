#include "cmp/random.hpp"

#include <algorithm>

#include "cmp/error.hpp"

namespace cmp {

Mat gaussian_unit_matrix(int m, int n, std::mt19937_64& rng) {
  if (m < 1 || n < 1) fail(ErrorCode::InvalidArgument, "matrix dimensions must be positive");
  std::normal_distribution<double> gauss;
  Mat a(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) a(i, j) = gauss(rng);
  return normalize_columns(a);
}

IndexSet random_support(const IndexSet& pool, int k, std::mt19937_64& rng) {
  if (k < 0 || k > static_cast<int>(pool.size()))
    fail(ErrorCode::InvalidArgument, "cannot draw " + std::to_string(k) + " indices from " +
                                         std::to_string(pool.size()));
  IndexSet v = pool;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(v.size()) - 1);
    std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(pick(rng))]);
  }
  v.resize(static_cast<std::size_t>(k));
  std::sort(v.begin(), v.end());
  return v;
}

IndexSet plantable_indices(const ConstraintModel& p) {
  const BoxProduct* b = p.as_box();
  if (!b) return range_set(p.dimension());
  IndexSet out;
  for (int i = 0; i < p.dimension(); ++i)
    if (b->lower[static_cast<std::size_t>(i)] < ExtendedReal(0.0) ||
        b->upper[static_cast<std::size_t>(i)] > ExtendedReal(0.0))
      out.push_back(i);
  return out;
}

Vec planted_vector(const ConstraintModel& p, const IndexSet& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Uniform on (0.1 c, 2 c] with c = min(1, bound / 2).
  auto magnitude = [&](double bound) {
    const double c = std::min(1.0, bound / 2.0);
    return c * (2.0 - 1.9 * unit(rng));
  };
  Vec z = Vec::Zero(p.dimension());
  if (const BoxProduct* b = p.as_box()) {
    for (int i : s) {
      const double lo = b->lower[static_cast<std::size_t>(i)].as_double();
      const double hi = b->upper[static_cast<std::size_t>(i)].as_double();
      if (lo == 0.0 && hi == 0.0) fail(ErrorCode::InvalidArgument, "cannot plant on a coordinate frozen at zero");
      const bool neg = lo < 0.0 && (hi == 0.0 || unit(rng) < 0.5);
      z(i) = neg ? -magnitude(-lo) : magnitude(hi);
    }
    return z;
  }
  if (const WeightedSimplex* w = p.as_simplex()) {
    for (int i : s) z(i) = magnitude(2.0);
    const double load = w->weights.dot(z);
    if (load > w->cap) z *= w->cap / load;
    return z;
  }
  fail(ErrorCode::UnsupportedCombination, "planting needs a box product or a weighted simplex");
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t t) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace cmp
