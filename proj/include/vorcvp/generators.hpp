#pragma once

#include <cstdint>
#include <vector>

#include "vorcvp/errors.hpp"
#include "vorcvp/lattice.hpp"
#include "vorcvp/random.hpp"
#include "vorcvp/scalar.hpp"

namespace vorcvp {

struct RandomBasisParams {
  std::int64_t num_range = 4;   // numerators uniform in [-num_range, num_range]
  std::int64_t den_bound = 4;   // denominators uniform in [1, den_bound]
};

inline Scalar random_rational(Rng& rng, std::int64_t num_range, std::int64_t den_bound) {
  const auto span = static_cast<std::uint64_t>(2 * num_range + 1);
  const std::int64_t p = static_cast<std::int64_t>(rng.below(span)) - num_range;
  const std::int64_t q = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den_bound)));
  Scalar r(to_integer(p), to_integer(q));
  r.canonicalize();
  return r;
}

// Redraws until the matrix is nonsingular; the same seed always yields the
// same basis.
inline LatticeBasis random_rational_basis(std::size_t n, std::uint64_t seed, const RandomBasisParams& params = {},
                                          const Limits& limits = {}) {
  if (n == 0 || static_cast<int>(n) > limits.dim_cap) throw SizeError("dimension outside the configured cap");
  if (params.num_range < 1 || params.den_bound < 1) throw InputError("random basis ranges must be positive");
  Rng rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Vec> cols(n, Vec(n));
    for (auto& c : cols)
      for (auto& x : c) x = random_rational(rng, params.num_range, params.den_bound);
    if (rank_of(cols) == n) return LatticeBasis(std::move(cols));
  }
  throw InputError("could not draw a nonsingular basis");
}

inline Vec random_rational_target(std::size_t n, Rng& rng, std::int64_t num_range, std::int64_t den_bound) {
  Vec t(n);
  for (auto& x : t) x = random_rational(rng, num_range, den_bound);
  return t;
}

}  // namespace vorcvp
