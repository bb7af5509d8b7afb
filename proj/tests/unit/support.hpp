#pragma once

// Independent reference computations for the tests. These share no code
// with the enumeration in oracles.hpp: they scan plain coefficient boxes.

#include <algorithm>
#include <cmath>
#include <optional>
#include <cstdint>
#include <vector>

#include "vorcvp/cvpp.hpp"
#include "vorcvp/generators.hpp"
#include "vorcvp/lattice.hpp"
#include "vorcvp/oracles.hpp"
#include "vorcvp/scalar.hpp"
#include "vorcvp/voronoi.hpp"

namespace testing_support {

using namespace vorcvp;

inline Scalar q(long p, long d = 1) { return make_rational(Integer(p), Integer(d)); }

inline Vec vec(std::initializer_list<Scalar> xs) { return Vec(xs); }

inline LatticeBasis rows(std::initializer_list<std::initializer_list<Scalar>> r) {
  std::vector<Vec> m;
  for (const auto& row : r) m.emplace_back(row);
  return LatticeBasis::from_rows(m);
}

// Calls f(a) for every a in [-k, k]^n.
template <class F>
void for_each_coeff(std::size_t n, std::int64_t k, F&& f) {
  IntVec a(n, -k);
  for (;;) {
    f(a);
    std::size_t j = 0;
    while (j < n && a[j] == k) a[j++] = -k;
    if (j == n) return;
    ++a[j];
  }
}

struct NaiveCvp {
  Scalar dist_sq;
  std::vector<IntVec> minimizers;  // sorted
  bool touches_box = false;        // a minimizer sits on the box boundary
};

inline NaiveCvp naive_cvp(const LatticeBasis& b, std::span<const Scalar> t, std::int64_t k) {
  NaiveCvp out;
  bool first = true;
  for_each_coeff(b.dim(), k, [&](const IntVec& a) {
    const Scalar d = norm_sq(sub(t, b.apply(a)));
    if (first || d < out.dist_sq) {
      first = false;
      out.dist_sq = d;
      out.minimizers.assign(1, a);
    } else if (d == out.dist_sq) {
      out.minimizers.push_back(a);
    }
  });
  std::sort(out.minimizers.begin(), out.minimizers.end());
  for (const auto& a : out.minimizers)
    for (auto x : a)
      if (x == k || x == -k) out.touches_box = true;
  return out;
}

// Coefficient box that provably contains every lattice point within
// distance^2 r2 of t: |a_j - (B^-1 t)_j| <= r |row_j(B^-1)|, widened by one
// to absorb floating error. Empty when the box has more than `cap` points.
inline std::optional<std::vector<std::pair<std::int64_t, std::int64_t>>> safe_box(const LatticeBasis& b,
                                                                                  std::span<const Scalar> t,
                                                                                  const Scalar& r2,
                                                                                  double cap = 3e6) {
  const Vec m = b.solve(t);
  std::vector<std::pair<std::int64_t, std::int64_t>> box;
  double count = 1;
  for (std::size_t j = 0; j < b.dim(); ++j) {
    const double w = std::sqrt(r2.get_d() * norm_sq(b.inverse()[j]).get_d());
    const double c = m[j].get_d();
    box.emplace_back(static_cast<std::int64_t>(std::floor(c - w)) - 1, static_cast<std::int64_t>(std::ceil(c + w)) + 1);
    count *= static_cast<double>(box.back().second - box.back().first + 1);
  }
  if (count > cap) return std::nullopt;
  return box;
}

// Closest vectors by scanning the safe box around the basis-rounded point.
inline std::optional<NaiveCvp> reference_cvp(const LatticeBasis& b, std::span<const Scalar> t) {
  const Vec m = b.solve(t);
  IntVec r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) r[i] = to_int64(floor_of(m[i] + q(1, 2)));
  const Scalar r2 = norm_sq(sub(t, b.apply(r)));
  const auto box = safe_box(b, t, r2);
  if (!box) return std::nullopt;
  NaiveCvp out;
  out.dist_sq = r2;
  const std::size_t n = b.dim();
  IntVec a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = (*box)[i].first;
  for (;;) {
    const Scalar d = norm_sq(sub(t, b.apply(a)));
    if (d < out.dist_sq) {
      out.dist_sq = d;
      out.minimizers.assign(1, a);
    } else if (d == out.dist_sq) {
      out.minimizers.push_back(a);
    }
    std::size_t j = 0;
    while (j < n && a[j] == (*box)[j].second) {
      a[j] = (*box)[j].first;
      ++j;
    }
    if (j == n) break;
    ++a[j];
  }
  std::sort(out.minimizers.begin(), out.minimizers.end());
  return out;
}

// Relevant vectors by the coset characterization, one coset at a time:
// the shortest elements of Bp + 2L are Bp + (closest points of 2L to -Bp).
inline std::vector<IntVec> vr_by_cosets(const LatticeBasis& b) {
  const LatticeBasis twice = b.scaled(2);
  std::vector<IntVec> out;
  for (const auto& p : coset_reps_mod2(b.dim())) {
    const Vec bp = b.apply(p);
    const Vec neg = scale(Scalar(-1), bp);
    const CvpSolutionSet s = cvp_bruteforce(twice, neg);
    if (s.minimizers.size() != 2) continue;
    for (const auto& y : s.minimizers) {
      IntVec a(p.size());
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = p[i] + 2 * y.coeffs[i];
      out.push_back(a);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<IntVec> sorted_coeffs(const VoronoiCellData& cell) {
  std::vector<IntVec> out;
  for (const auto& r : cell.vr()) out.push_back(r.coeffs);
  std::sort(out.begin(), out.end());
  return out;
}

inline LatticeBasis random_lattice(std::size_t n, std::uint64_t seed) {
  return random_rational_basis(n, seed * 7919 + n);
}

// Coordinates p/d with |p/d| <= 3 and d <= max_den.
inline Vec random_target(std::size_t n, Rng& rng, std::int64_t max_den = 64) {
  const std::int64_t d = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(max_den)));
  Vec t(n);
  for (auto& x : t) {
    const std::int64_t p = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(6 * d + 1))) - 3 * d;
    x = q(p, d);
  }
  return t;
}

}  // namespace testing_support
