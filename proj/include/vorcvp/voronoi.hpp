#pragma once

// Voronoi cell of a lattice, described by its relevant vectors.
//
// V = { x : <x, v> <= <v, v>/2 for all v in VR }.
// v is relevant iff {+v, -v} is the full set of shortest vectors of the
// coset v + 2L. Every relevant vector has |v| <= 2 mu, and mu is at most
// sqrt(sum |b_i|^2)/2, so one ball enumeration of radius^2 = sum |b_i|^2
// meets every coset that could contain a relevant vector. A coset that
// meets the ball has all its minimizers inside it.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vorcvp/errors.hpp"
#include "vorcvp/lattice.hpp"
#include "vorcvp/oracles.hpp"
#include "vorcvp/scalar.hpp"

namespace vorcvp {

struct RelevantVector {
  IntVec coeffs;
  Vec v;
  Scalar norm_sq;
  Scalar half_norm_sq;
};

// Preprocessing advice for a lattice. Immutable once built.
class VoronoiCellData {
 public:
  VoronoiCellData() = default;

  VoronoiCellData(LatticeBasis basis, std::vector<RelevantVector> vr)
      : basis_(std::move(basis)), vr_(std::move(vr)) {
    if (vr_.empty()) throw ContractError("empty relevant vector set");
    lambda1_sq_ = vr_[0].norm_sq;
    max_norm_sq_ = vr_[0].norm_sq;
    vr_d_.reserve(vr_.size());
    half_d_.reserve(vr_.size());
    for (const auto& r : vr_) {
      if (r.norm_sq < lambda1_sq_) lambda1_sq_ = r.norm_sq;
      if (r.norm_sq > max_norm_sq_) max_norm_sq_ = r.norm_sq;
      vr_d_.push_back(to_doubles(r.v));
      half_d_.push_back(r.half_norm_sq.get_d());
    }
  }

  const LatticeBasis& basis() const noexcept { return basis_; }
  std::size_t dim() const noexcept { return basis_.dim(); }
  const std::vector<RelevantVector>& vr() const noexcept { return vr_; }
  std::size_t size() const noexcept { return vr_.size(); }
  const RelevantVector& operator[](std::size_t i) const { return vr_[i]; }

  const Scalar& lambda1_sq() const noexcept { return lambda1_sq_; }
  const Scalar& max_vr_norm_sq() const noexcept { return max_norm_sq_; }

  // Floating shadows for sampler filters; borderline cases go to the exact test.
  const std::vector<std::vector<double>>& vr_double() const noexcept { return vr_d_; }
  const std::vector<double>& half_norm_sq_double() const noexcept { return half_d_; }

 private:
  LatticeBasis basis_;
  std::vector<RelevantVector> vr_;
  Scalar lambda1_sq_;
  Scalar max_norm_sq_;
  std::vector<std::vector<double>> vr_d_;
  std::vector<double> half_d_;
};

namespace detail {

inline RelevantVector make_relevant(const LatticeBasis& basis, IntVec coeffs) {
  RelevantVector r;
  r.v = basis.apply(coeffs);
  r.coeffs = std::move(coeffs);
  r.norm_sq = norm_sq(r.v);
  r.half_norm_sq = r.norm_sq / 2;
  return r;
}

inline bool first_nonzero_positive(const IntVec& a) {
  for (auto x : a)
    if (x != 0) return x > 0;
  return false;
}

inline std::size_t parity_mask(const IntVec& a) {
  std::size_t mask = 0;
  for (auto x : a) mask = (mask << 1) | static_cast<std::size_t>(x & 1);
  return mask;
}

}  // namespace detail

// VR ordered by coset (lexicographic on the 0/1 parity vector), then sign
// with the first-nonzero-coefficient-positive representative first.
inline VoronoiCellData compute_relevant_vectors(const LatticeBasis& basis, const Limits& limits = {}) {
  const std::size_t n = basis.dim();
  (void)coset_reps_mod2(n, limits);  // dimension cap
  const std::size_t cosets = std::size_t{1} << n;

  std::vector<Scalar> best(cosets);
  std::vector<std::vector<IntVec>> arg(cosets);
  std::vector<bool> seen(cosets, false);

  // |v| <= 2 mu for every relevant v, and 4 mu^2 <= sum |c_i|^2 for any basis.
  const ReducedBasis reduced = lll_reduce(basis);
  const Scalar radius = covering_radius_upper(reduced.basis.columns());
  const Vec origin = zeros(n);
  for_each_in_ball(reduced, origin, radius, limits, [&](const IntVec& a, const Scalar& d) {
    const std::size_t mask = detail::parity_mask(a);
    if (mask == 0) return;
    if (!seen[mask] || d < best[mask]) {
      seen[mask] = true;
      best[mask] = d;
      arg[mask].clear();
      arg[mask].push_back(a);
    } else if (d == best[mask]) {
      arg[mask].push_back(a);
    }
  });

  std::vector<RelevantVector> vr;
  for (std::size_t mask = 1; mask < cosets; ++mask) {
    if (!seen[mask] || arg[mask].size() != 2) continue;
    IntVec plus = arg[mask][0];
    if (!detail::first_nonzero_positive(plus))
      for (auto& x : plus) x = -x;
    IntVec minus = plus;
    for (auto& x : minus) x = -x;
    vr.push_back(detail::make_relevant(basis, std::move(plus)));
    vr.push_back(detail::make_relevant(basis, std::move(minus)));
  }
  return VoronoiCellData(basis, std::move(vr));
}

// Rebuilds cell data from stored coefficient vectors (e.g. a cache file),
// recomputing coordinates and checking the structural invariants.
inline VoronoiCellData cell_from_coeffs(const LatticeBasis& basis, const std::vector<IntVec>& coeffs) {
  const std::size_t n = basis.dim();
  if (coeffs.empty()) throw InputError("relevant vector list is empty");
  if (coeffs.size() > 2 * ((std::size_t{1} << n) - 1))
    throw InputError("too many relevant vectors for dimension " + std::to_string(n));
  std::vector<IntVec> sorted = coeffs;
  std::sort(sorted.begin(), sorted.end());
  std::vector<RelevantVector> vr;
  for (const auto& a : coeffs) {
    if (a.size() != n) throw InputError("relevant vector has wrong length");
    if (std::all_of(a.begin(), a.end(), [](std::int64_t x) { return x == 0; }))
      throw InputError("zero vector in relevant vector list");
    IntVec neg = a;
    for (auto& x : neg) x = -x;
    if (!std::binary_search(sorted.begin(), sorted.end(), neg))
      throw InputError("relevant vector list is not closed under negation");
    vr.push_back(detail::make_relevant(basis, a));
  }
  return VoronoiCellData(basis, std::move(vr));
}

// max over VR of 2<v,x>/<v,v>; VR is symmetric so this is >= 0.
inline Scalar voronoi_norm(const VoronoiCellData& cell, std::span<const Scalar> x) {
  Scalar best = 0;
  Scalar q;
  for (const auto& r : cell.vr()) {
    q = dot(r.v, x) / r.half_norm_sq;
    if (q > best) best = q;
  }
  return best;
}

inline bool membership(const VoronoiCellData& cell, std::span<const Scalar> x) {
  for (const auto& r : cell.vr())
    if (dot(r.v, x) > r.half_norm_sq) return false;
  return true;
}

struct SandwichRadii {
  Scalar inner_sq;  // r^2 = lambda1^2 / 4, r B is inside V
  Scalar outer_sq;  // R^2 = (n/4) max |v|^2, V is inside R B
};

inline SandwichRadii sandwich_radii(const VoronoiCellData& cell) {
  return SandwichRadii{cell.lambda1_sq() / 4, Scalar(static_cast<long>(cell.dim())) * cell.max_vr_norm_sq() / 4};
}

}  // namespace vorcvp
