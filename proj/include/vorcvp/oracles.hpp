#pragma once

// Brute-force ground truth: bounded enumeration of lattice points in a
// ball, shortest vectors and closest vectors. These favour being obviously
// correct over being fast; there is no pruning.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vorcvp/errors.hpp"
#include "vorcvp/lattice.hpp"
#include "vorcvp/scalar.hpp"

namespace vorcvp {

struct CvpSolutionSet {
  Scalar dist_sq;
  std::vector<LatticePoint> minimizers;
};

namespace detail {

inline Integer from_i128(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  Integer hi, lo;
  mpz_set_ui(hi.get_mpz_t(), static_cast<unsigned long>(u >> 64));
  mpz_set_ui(lo.get_mpz_t(), static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFULL));
  Integer r = (hi << 64) + lo;
  return neg ? Integer(-r) : r;
}

inline __int128 to_i128(const Integer& z) {
  Integer a = abs(z);
  Integer lo_part = a & Integer("18446744073709551615");
  Integer hi_part = a >> 64;
  unsigned __int128 u = (static_cast<unsigned __int128>(mpz_get_ui(hi_part.get_mpz_t())) << 64) |
                        mpz_get_ui(lo_part.get_mpz_t());
  return z < 0 ? -static_cast<__int128>(u) : static_cast<__int128>(u);
}

// The ball problem rescaled by q = lcm of all denominators so that every
// quantity in the inner loop is an integer.
struct ScaledBall {
  std::size_t n = 0;
  std::vector<std::vector<Integer>> cols;  // cols[j][i] = q * B_ij
  std::vector<Integer> center;             // q * c
  Integer bound;                           // floor(q^2 r^2)
  Integer scale_sq;                        // q^2
  IntVec lo, hi;
};

// Coefficient range for one axis: a in [m - W, m + W] where W^2 = r^2 |row|^2.
// Found from a floating estimate, then corrected with exact predicates.
inline std::pair<std::int64_t, std::int64_t> axis_range(const Scalar& m, const Scalar& w_sq) {
  // k >= m - W  and  k <= m + W, decided exactly.
  auto above_lo = [&](const Integer& k) {
    Scalar d = m - Scalar(k);
    return d <= 0 || d * d <= w_sq;
  };
  auto below_hi = [&](const Integer& k) {
    Scalar d = Scalar(k) - m;
    return d <= 0 || d * d <= w_sq;
  };
  const double est_w = std::sqrt(w_sq.get_d());
  const double md = m.get_d();
  if (!std::isfinite(md + est_w) || std::fabs(md) + est_w > 4.0e18)
    throw SizeError("enumeration box coordinates exceed 64-bit range");
  Integer lo(static_cast<long>(std::ceil(md - est_w)));
  while (above_lo(lo - 1)) lo -= 1;
  while (!above_lo(lo)) lo += 1;
  Integer hi(static_cast<long>(std::floor(md + est_w)));
  while (below_hi(hi + 1)) hi += 1;
  while (!below_hi(hi)) hi -= 1;
  return {to_int64(lo), to_int64(hi)};
}

inline ScaledBall prepare_ball(const LatticeBasis& basis, std::span<const Scalar> center,
                               const Scalar& radius_sq, const Limits& limits) {
  if (radius_sq < 0) throw InputError("negative radius");
  const std::size_t n = basis.dim();
  Integer q = lcm_of_denominators(center);
  for (const auto& c : basis.columns()) q = lcm_of_denominators(c, q);

  ScaledBall ball;
  ball.n = n;
  ball.scale_sq = q * q;
  ball.cols.assign(n, std::vector<Integer>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      Scalar v = basis.column(j)[i] * Scalar(q);
      ball.cols[j][i] = v.get_num();
    }
  ball.center.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Scalar v = center[i] * Scalar(q);
    ball.center[i] = v.get_num();
  }
  ball.bound = floor_of(radius_sq * Scalar(ball.scale_sq));

  const Vec m = basis.solve(center);
  ball.lo.resize(n);
  ball.hi.resize(n);
  long double count = 1;
  for (std::size_t j = 0; j < n; ++j) {
    const Scalar w_sq = radius_sq * norm_sq(basis.inverse()[j]);
    auto [lo, hi] = axis_range(m[j], w_sq);
    ball.lo[j] = lo;
    ball.hi[j] = hi;
    count *= static_cast<long double>(std::max<std::int64_t>(hi - lo + 1, 0));
  }
  if (count > static_cast<long double>(limits.enum_cap))
    throw SizeError("enumeration box has " + std::to_string(static_cast<double>(count)) +
                    " candidates, cap is " + std::to_string(limits.enum_cap));
  return ball;
}

// Odometer walk over the coefficient box with incremental component
// updates. Visit(a, norm) is called for points with norm <= bound, where
// norm is the squared distance scaled by q^2.
template <class Int, class Convert, class Visit>
void walk_box(const ScaledBall& ball, Convert&& convert, Visit&& visit) {
  const std::size_t n = ball.n;
  std::vector<std::vector<Int>> col(n, std::vector<Int>(n));
  std::vector<std::vector<Int>> wrap(n, std::vector<Int>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      col[j][i] = convert(ball.cols[j][i]);
      wrap[j][i] = convert(ball.cols[j][i] * to_integer(ball.hi[j] - ball.lo[j]));
    }
  for (std::size_t j = 0; j < n; ++j)
    if (ball.lo[j] > ball.hi[j]) return;
  const Int bound = convert(ball.bound);
  IntVec a = ball.lo;
  std::vector<Int> comp(n);
  for (std::size_t i = 0; i < n; ++i) {
    Integer s = -ball.center[i];
    for (std::size_t j = 0; j < n; ++j) s += ball.cols[j][i] * to_integer(a[j]);
    comp[i] = convert(s);
  }
  Int norm;
  for (;;) {
    norm = 0;
    for (std::size_t i = 0; i < n; ++i) norm += comp[i] * comp[i];
    if (norm <= bound) visit(a, norm);
    std::size_t j = 0;
    for (; j < n; ++j) {
      if (a[j] < ball.hi[j]) {
        ++a[j];
        for (std::size_t i = 0; i < n; ++i) comp[i] += col[j][i];
        break;
      }
      a[j] = ball.lo[j];
      for (std::size_t i = 0; i < n; ++i) comp[i] -= wrap[j][i];
    }
    if (j == n) return;
  }
}

}  // namespace detail

// Calls f(coeffs, dist_sq) for every lattice point y = B*coeffs with
// |y - center|^2 <= radius_sq. The box is laid out in the reduced basis
// and coefficients are mapped back to the original one; visiting order is
// unspecified.
template <class F>
void for_each_in_ball(const ReducedBasis& reduced, std::span<const Scalar> center, const Scalar& radius_sq,
                      const Limits& limits, F&& f) {
  const detail::ScaledBall ball = detail::prepare_ball(reduced.basis, center, radius_sq, limits);
  const std::size_t n = ball.n;

  // Largest |component| anywhere in the box decides the integer width.
  Integer max_mag = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Integer m = abs(ball.center[i]);
    for (std::size_t j = 0; j < n; ++j)
      m += abs(ball.cols[j][i]) * to_integer(std::max(std::abs(ball.lo[j]), std::abs(ball.hi[j])));
    if (m > max_mag) max_mag = m;
  }
  const Integer limit = Integer(1) << 60;
  const bool narrow = max_mag < limit && Integer(max_mag * max_mag * static_cast<unsigned long>(n)) <
                                             (Integer(1) << 125);
  if (narrow) {
    detail::ScaledBall b = ball;
    const Integer cap = Integer(1) << 125;
    if (b.bound > cap) b.bound = cap;
    detail::walk_box<__int128>(
        b, [](const Integer& z) { return detail::to_i128(z); },
        [&](const IntVec& c, __int128 norm) {
          f(reduced.to_original(c), make_rational(detail::from_i128(norm), ball.scale_sq));
        });
  } else {
    detail::walk_box<Integer>(
        ball, [](const Integer& z) { return z; },
        [&](const IntVec& c, const Integer& norm) { f(reduced.to_original(c), make_rational(norm, ball.scale_sq)); });
  }
}

template <class F>
void for_each_in_ball(const LatticeBasis& basis, std::span<const Scalar> center, const Scalar& radius_sq,
                      const Limits& limits, F&& f) {
  for_each_in_ball(lll_reduce(basis), center, radius_sq, limits, std::forward<F>(f));
}

inline std::vector<LatticePoint> enumerate_ball(const LatticeBasis& basis, std::span<const Scalar> center,
                                                const Scalar& radius_sq, const Limits& limits = {}) {
  std::vector<LatticePoint> out;
  for_each_in_ball(basis, center, radius_sq, limits,
                   [&](const IntVec& a, const Scalar&) { out.push_back(LatticePoint::from_coeffs(basis, a)); });
  return out;
}

// lambda_1^2 and every vector attaining it (closed under negation).
inline std::pair<Scalar, std::vector<LatticePoint>> shortest_vector(const LatticeBasis& basis,
                                                                   const Limits& limits = {}) {
  const ReducedBasis reduced = lll_reduce(basis);
  Scalar radius = norm_sq(reduced.basis.column(0));
  for (const auto& c : reduced.basis.columns()) radius = std::min(radius, norm_sq(c));
  Scalar best = radius;
  std::vector<IntVec> arg;
  const Vec origin = zeros(basis.dim());
  for_each_in_ball(reduced, origin, radius, limits, [&](const IntVec& a, const Scalar& d) {
    if (std::all_of(a.begin(), a.end(), [](std::int64_t x) { return x == 0; })) return;
    const int c = cmp(d, best);
    if (c < 0) {
      best = d;
      arg.clear();
    }
    if (c <= 0) arg.push_back(a);
  });
  std::sort(arg.begin(), arg.end());
  std::vector<LatticePoint> pts;
  for (auto& a : arg) pts.push_back(LatticePoint::from_coeffs(basis, std::move(a)));
  return {best, std::move(pts)};
}

// Every closest lattice vector to t. The search radius is the distance to
// the point rounded in the reduced basis, which is always attained, so the set is nonempty.
inline CvpSolutionSet cvp_bruteforce(const LatticeBasis& basis, std::span<const Scalar> t,
                                     const Limits& limits = {}) {
  const ReducedBasis reduced = lll_reduce(basis);
  const Vec coeff = reduced.basis.solve(t);
  IntVec rounded(coeff.size());
  for (std::size_t i = 0; i < coeff.size(); ++i) rounded[i] = to_int64(round_half_even(coeff[i]));
  const Vec x0 = reduced.basis.apply(rounded);
  Scalar best = norm_sq(sub(t, x0));
  std::vector<IntVec> arg;
  for_each_in_ball(reduced, t, best, limits, [&](const IntVec& a, const Scalar& d) {
    const int c = cmp(d, best);
    if (c < 0) {
      best = d;
      arg.clear();
    }
    if (c <= 0) arg.push_back(a);
  });
  std::sort(arg.begin(), arg.end());
  CvpSolutionSet out{best, {}};
  for (auto& a : arg) out.minimizers.push_back(LatticePoint::from_coeffs(basis, std::move(a)));
  return out;
}

}  // namespace vorcvp
