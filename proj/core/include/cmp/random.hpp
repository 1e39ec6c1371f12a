#pragma once

#include <cstdint>
#include <random>

#include "cmp/constraint.hpp"
#include "cmp/linalg.hpp"

namespace cmp {

// Gaussian entries followed by column normalization.
Mat gaussian_unit_matrix(int m, int n, std::mt19937_64& rng);

// k distinct indices drawn uniformly from pool, returned sorted.
IndexSet random_support(const IndexSet& pool, int k, std::mt19937_64& rng);

// z with supp(z) = s and z in P: magnitudes uniform on (0.1, 2] (scaled to a
// finite bound when the interval is shorter), sign drawn from the directions P allows.
Vec planted_vector(const ConstraintModel& p, const IndexSet& s, std::mt19937_64& rng);

// Coordinates that P allows to be nonzero.
IndexSet plantable_indices(const ConstraintModel& p);

// Independent stream for trial t of a run seeded with seed.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t t);

}  // namespace cmp
