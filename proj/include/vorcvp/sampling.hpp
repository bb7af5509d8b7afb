#pragma once

// Random points in the Voronoi cell, and the Gamma / Laplace(V, theta)
// draws used to study the second phase of the randomized walk.
//
// Emitted points are dyadic rationals, so the walks that consume them stay
// in exact arithmetic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vorcvp/errors.hpp"
#include "vorcvp/random.hpp"
#include "vorcvp/scalar.hpp"
#include "vorcvp/voronoi.hpp"

namespace vorcvp {

enum class SamplerMethod { rejection, hit_and_run };

inline const char* method_name(SamplerMethod m) {
  return m == SamplerMethod::rejection ? "rejection" : "hit_and_run";
}

struct SamplerConfig {
  std::uint64_t seed = 0;
  unsigned precision_bits = 128;
  // Unset: rejection up to dimension 6, hit-and-run above.
  std::optional<SamplerMethod> method;
  // Hit-and-run steps per sample; 0 selects default_step_budget().
  std::size_t step_budget = 0;
  double tv_epsilon = 0.25;
  std::uint64_t attempt_cap = 50'000'000;

  void validate() const {
    if (precision_bits < 32) throw InputError("precision_bits must be at least 32");
    if (!(tv_epsilon > 0.0 && tv_epsilon < 1.0)) throw InputError("tv_epsilon must lie in (0, 1)");
  }

  SamplerMethod resolved_method(std::size_t n) const {
    if (method) return *method;
    return n <= 6 ? SamplerMethod::rejection : SamplerMethod::hit_and_run;
  }
};

namespace detail {

// Dyadic h = H / 2^20 with h >= R, where R^2 is the outer sandwich radius.
inline Scalar dyadic_outer_halfwidth(const VoronoiCellData& cell) {
  const Scalar outer_sq = sandwich_radii(cell).outer_sq;
  const Integer scale = Integer(1) << 20;
  Integer h_num(static_cast<long>(std::ceil(std::sqrt(outer_sq.get_d()) * 1048576.0)) + 1);
  Scalar h = make_rational(h_num, scale);
  while (h * h < outer_sq) {
    h_num += 1;
    h = make_rational(h_num, scale);
  }
  return h;
}

// Conservative floating test: false only when x is certainly outside V.
inline bool maybe_inside(const VoronoiCellData& cell, const std::vector<double>& x) {
  const auto& vd = cell.vr_double();
  const auto& hd = cell.half_norm_sq_double();
  for (std::size_t k = 0; k < vd.size(); ++k) {
    double s = 0, mag = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += vd[k][i] * x[i];
      mag += std::fabs(vd[k][i] * x[i]);
    }
    if (s > hd[k] + 1e-9 * (mag + hd[k])) return false;
  }
  return true;
}

// Exact membership of a double point, decided in floating point when the
// margin is clear and by the exact test otherwise.
inline bool inside(const VoronoiCellData& cell, const std::vector<double>& x) {
  const auto& vd = cell.vr_double();
  const auto& hd = cell.half_norm_sq_double();
  bool unsure = false;
  for (std::size_t k = 0; k < vd.size(); ++k) {
    double s = 0, mag = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      s += vd[k][i] * x[i];
      mag += std::fabs(vd[k][i] * x[i]);
    }
    const double tol = 1e-9 * (mag + hd[k]);
    if (s > hd[k] + tol) return false;
    if (s >= hd[k] - tol) unsure = true;
  }
  return !unsure || membership(cell, from_doubles(x));
}

// Rounds each coordinate down onto the grid 2^-bits.
inline Vec to_grid(const std::vector<double>& x, unsigned bits) {
  Vec out(x.size());
  const Integer den = Integer(1) << bits;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Scalar exact(x[i]);
    Scalar scaled = exact * Scalar(den);
    out[i] = make_rational(floor_of(scaled), den);
  }
  return out;
}

}  // namespace detail

// Exactly uniform over V up to the dyadic grid: uniform proposals from the
// cube [-h, h]^n with h >= R, accepted by the exact membership test.
inline Vec uniform_voronoi_rejection(const VoronoiCellData& cell, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n = cell.dim();
  const Scalar h = detail::dyadic_outer_halfwidth(cell);
  const double hd = h.get_d();
  const unsigned bits = cfg.precision_bits;
  const unsigned top = std::min(64U, bits);
  const unsigned rest = bits - top;
  const Integer full = Integer(1) << bits;
  const double top_scale = std::ldexp(1.0, -static_cast<int>(top));

  std::vector<std::uint64_t> lead(n);
  std::vector<double> xd(n);
  Vec x(n);
  for (std::uint64_t attempt = 0; attempt < cfg.attempt_cap; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t w = rng.next();
      if (top < 64) w >>= (64 - top);
      lead[i] = w;
      xd[i] = hd * (2.0 * ((static_cast<double>(w) + 0.5) * top_scale) - 1.0);
    }
    if (!detail::maybe_inside(cell, xd)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      Integer k;
      mpz_set_ui(k.get_mpz_t(), static_cast<unsigned long>(lead[i]));
      if (rest > 0) k = (k << rest) + rng.bits(rest);
      // Midpoint of the k-th of 2^bits equal cells of [-h, h].
      x[i] = h * make_rational(Integer(2 * k + 1 - full), full);
    }
    if (membership(cell, x)) return x;
  }
  throw SizeError("rejection sampler exceeded " + std::to_string(cfg.attempt_cap) +
                  " attempts; use the hit_and_run method");
}

inline std::size_t default_step_budget(const VoronoiCellData& cell, double tv_epsilon) {
  const auto radii = sandwich_radii(cell);
  const double n = static_cast<double>(cell.dim());
  const double ratio = std::sqrt(radii.outer_sq.get_d() / radii.inner_sq.get_d());
  const double l = 1.0 + std::log2(std::max(ratio, 1.0));
  const double steps = 4.0 * n * n * l * l * std::log2(2.0 / tv_epsilon);
  return static_cast<std::size_t>(std::max(100.0, std::ceil(steps)));
}

// Hit-and-run from the origin. Chords come from the facet description in
// floating point. Each iterate is a double vector, hence exactly dyadic,
// and is kept only if it lies in V exactly; otherwise the step is halved
// back toward the previous iterate. The emitted point is moved onto the
// 2^-bits grid and checked again, shrinking toward the origin if needed.
inline Vec hit_and_run_uniform(const VoronoiCellData& cell, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n = cell.dim();
  const std::size_t steps = cfg.step_budget ? cfg.step_budget : default_step_budget(cell, cfg.tv_epsilon);
  const auto& vd = cell.vr_double();
  const auto& hd = cell.half_norm_sq_double();

  std::vector<double> x(n, 0.0), dir(n), cand(n);
  for (std::size_t step = 0; step < steps; ++step) {
    double len = 0;
    for (auto& c : dir) {
      c = rng.normal();
      len += c * c;
    }
    len = std::sqrt(len);
    for (auto& c : dir) c /= len;
    double lo = -HUGE_VAL, hi = HUGE_VAL;
    for (std::size_t k = 0; k < vd.size(); ++k) {
      double s = 0, px = 0;
      for (std::size_t i = 0; i < n; ++i) {
        s += vd[k][i] * dir[i];
        px += vd[k][i] * x[i];
      }
      const double slack = std::max(0.0, hd[k] - px);
      if (s > 0) hi = std::min(hi, slack / s);
      else if (s < 0) lo = std::max(lo, slack / s);
    }
    if (!(lo < hi)) continue;
    double u = rng.uniform(lo, hi);
    for (int halvings = 0; halvings < 64; ++halvings, u *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) cand[i] = x[i] + u * dir[i];
      if (detail::inside(cell, cand)) {
        x.swap(cand);
        break;
      }
    }
  }

  Vec out = detail::to_grid(x, cfg.precision_bits);
  for (int tries = 0; tries < 200 && !membership(cell, out); ++tries) {
    for (auto& c : x) c *= 0.5;
    out = detail::to_grid(x, cfg.precision_bits);
  }
  if (!membership(cell, out)) out = zeros(n);
  return out;
}

inline Vec sample_voronoi(const VoronoiCellData& cell, const SamplerConfig& cfg, Rng& rng) {
  return cfg.resolved_method(cell.dim()) == SamplerMethod::rejection ? uniform_voronoi_rejection(cell, cfg, rng)
                                                                     : hit_and_run_uniform(cell, cfg, rng);
}

// Gamma(k, theta) for integer shape as a sum of k exponential(theta) draws.
inline double gamma_sample(unsigned k, double theta, Rng& rng) {
  if (k < 1 || !(theta > 0)) throw InputError("gamma_sample needs k >= 1 and theta > 0");
  double r = 0;
  for (unsigned i = 0; i < k; ++i) r -= std::log(rng.uniform_open01());
  return theta * r;
}

// theta_n = 1 / ((n+1) - sqrt(2(n+1))), which places most of the mass of
// Gamma(n+1, theta_n) in [1, 1/gamma_n].
inline double laplace_theta_n(std::size_t n) {
  const double m = static_cast<double>(n + 1);
  return 1.0 / (m - std::sqrt(2.0 * m));
}

inline double laplace_gamma_n(std::size_t n) {
  const double m = static_cast<double>(n + 1);
  return 1.0 / (1.0 + 2.0 * std::sqrt(2.0) / (std::sqrt(m) - std::sqrt(2.0)));
}

struct LaplaceParams {
  double theta = 1.0;

  static LaplaceParams for_dimension(std::size_t n) { return LaplaceParams{laplace_theta_n(n)}; }
};

// X = r U with r ~ Gamma(n+1, theta) and U uniform on V, independent.
// r is a double and hence dyadic, so X is exact.
struct LaplaceSample {
  double r = 0;
  Vec u;

  Vec point() const { return scale(Scalar(r), u); }
};

inline LaplaceSample laplace_voronoi_sample(const VoronoiCellData& cell, const LaplaceParams& params,
                                            const SamplerConfig& cfg, Rng& rng) {
  if (!(params.theta > 0)) throw InputError("Laplace theta must be positive");
  LaplaceSample s;
  s.u = sample_voronoi(cell, cfg, rng);
  s.r = gamma_sample(static_cast<unsigned>(cell.dim() + 1), params.theta, rng);
  return s;
}

}  // namespace vorcvp
