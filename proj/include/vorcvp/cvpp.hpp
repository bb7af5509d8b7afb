#pragma once

// Closest vector with preprocessing. The advice is the relevant-vector set;
// a query rounds the target to a nearby lattice point, runs the randomized
// straight line truncated at t + alpha Z with alpha = 1/(4 qbar mu)^2, and
// restarts with a fresh perturbation whenever the walk exceeds its edge
// budget or meets a tie. Only exactly certified answers are returned.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "vorcvp/errors.hpp"
#include "vorcvp/lattice.hpp"
#include "vorcvp/navigation.hpp"
#include "vorcvp/random.hpp"
#include "vorcvp/sampling.hpp"
#include "vorcvp/scalar.hpp"
#include "vorcvp/voronoi.hpp"

namespace vorcvp {

// e^2 / (sqrt(2) - 1), the constant in the expected phase-C crossing bound.
inline constexpr double kPhaseCConstant = 7.38905609893065 / (1.4142135623730951 - 1.0);

inline double phase_b_bound(std::size_t n, const Scalar& start_distance_v) {
  return 0.5 * static_cast<double>(n) * start_distance_v.get_d();
}

inline double log_of(const Integer& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::numbers::ln2;
}

// (e^2/(sqrt(2)-1)) n (2 + ln(4/alpha)); the log is taken from the exact
// numerator and denominator so tiny alphas do not underflow.
inline double phase_c_bound(std::size_t n, const Scalar& alpha) {
  const double log_alpha = log_of(alpha.get_num()) - log_of(alpha.get_den());
  return kPhaseCConstant * static_cast<double>(n) * (2.0 + std::log(4.0) - log_alpha);
}

struct PreprocessedLattice {
  VoronoiCellData cell;
  std::vector<std::size_t> selected;  // indices into VR, linearly independent
  LatticeBasis selected_matrix;       // columns v_1..v_n, for coefficient solves
  Scalar mu_upper_sq;                 // (sum |v_i|^2) / 4 >= mu^2
  std::uint64_t bits_basis = 0;
  Integer qbar_basis = 1;

  const LatticeBasis& basis() const { return cell.basis(); }
  std::size_t dim() const { return cell.dim(); }
};

inline PreprocessedLattice preprocess_cell(VoronoiCellData cell) {
  PreprocessedLattice pre;
  const std::size_t n = cell.dim();
  std::vector<Vec> chosen;
  for (std::size_t k = 0; k < cell.size() && chosen.size() < n; ++k) {
    chosen.push_back(cell[k].v);
    if (rank_of(chosen) == chosen.size()) pre.selected.push_back(k);
    else chosen.pop_back();
  }
  if (chosen.size() != n) throw ContractError("relevant vectors do not span the space");
  pre.mu_upper_sq = covering_radius_upper(chosen) / 4;
  pre.selected_matrix = LatticeBasis(chosen);
  pre.bits_basis = encoding_length(cell.basis());
  pre.qbar_basis = qbar(cell.basis(), std::span<const Scalar>{});
  pre.cell = std::move(cell);
  return pre;
}

inline PreprocessedLattice preprocess(const LatticeBasis& basis, const Limits& limits = {}) {
  return preprocess_cell(compute_relevant_vectors(basis, limits));
}

// x = sum round(a_i) v_i where t = sum a_i v_i; |t - x|_V <= n.
inline LatticePoint round_to_start(const PreprocessedLattice& pre, std::span<const Scalar> t) {
  const Vec a = pre.selected_matrix.solve(t);
  IntVec coeffs(pre.dim(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t r = to_int64(round_half_even(a[i]));
    if (r == 0) continue;
    const auto& v = pre.cell[pre.selected[i]].coeffs;
    for (std::size_t j = 0; j < coeffs.size(); ++j) coeffs[j] += r * v[j];
  }
  return LatticePoint::from_coeffs(pre.basis(), std::move(coeffs));
}

struct QueryParams {
  Integer qbar;
  Scalar alpha;                  // 1 / (4 qbar mu_upper)^2
  double expected_edges = 0;     // n^2/2 + K n (2 + ln(4/alpha))
  std::size_t edge_threshold = 0;
  std::uint64_t bits_target = 0;
};

inline QueryParams query_params(const PreprocessedLattice& pre, std::span<const Scalar> t,
                                double restart_constant = 8.0) {
  if (!(restart_constant >= 1.0)) throw InputError("restart constant must be at least 1");
  QueryParams qp;
  qp.qbar = lcm_of_denominators(t, pre.qbar_basis);
  qp.alpha = Scalar(1) / (Scalar(16) * Scalar(qp.qbar * qp.qbar) * pre.mu_upper_sq);
  qp.bits_target = encoding_length(t);
  const double n = static_cast<double>(pre.dim());
  qp.expected_edges = n * n / 2.0 + phase_c_bound(pre.dim(), qp.alpha);
  qp.edge_threshold = static_cast<std::size_t>(std::max(1.0, std::ceil(restart_constant * qp.expected_edges)));
  return qp;
}

struct SolverConfig {
  SamplerConfig sampler;
  double restart_constant = 8.0;
  std::size_t restart_cap = 64;
};

struct SolveResult {
  LatticePoint y;
  bool certified = false;
  std::size_t restarts = 0;
  std::size_t ties = 0;
  std::size_t truncations = 0;
  std::size_t uncertified = 0;  // completed walks whose endpoint failed the exact check
  std::size_t total_edges = 0;  // over every attempt
  std::size_t phase_b = 0;      // successful attempt only
  std::size_t phase_c = 0;
  std::uint64_t seed = 0;
  QueryParams params;
  LatticePoint start;
  PathTrace trace;
};

inline bool certify(const PreprocessedLattice& pre, std::span<const Scalar> t, const LatticePoint& y) {
  return membership(pre.cell, sub(t, y.coords));
}

inline SolveResult query(const PreprocessedLattice& pre, std::span<const Scalar> t, const SolverConfig& cfg = {}) {
  if (t.size() != pre.dim()) throw InputError("target dimension does not match the lattice");
  SolveResult out;
  out.seed = cfg.sampler.seed;
  out.params = query_params(pre, t, cfg.restart_constant);
  out.start = round_to_start(pre, t);
  Rng rng(cfg.sampler.seed);
  for (std::size_t attempt = 0; attempt <= cfg.restart_cap; ++attempt) {
    const Vec z = sample_voronoi(pre.cell, cfg.sampler, rng);
    try {
      RslResult run = randomized_straight_line(pre.cell, out.start, t, z, out.params.alpha,
                                               out.params.edge_threshold);
      out.total_edges += run.trace.edges();
      if (run.status == RslStatus::truncated) {
        ++out.truncations;
        continue;
      }
      if (!run.certified) {
        ++out.uncertified;
        continue;
      }
      out.y = std::move(run.y);
      out.certified = true;
      out.restarts = attempt;
      out.phase_b = run.trace.phase_b;
      out.phase_c = run.trace.phase_c;
      out.trace = std::move(run.trace);
      return out;
    } catch (const TieDetected&) {
      ++out.ties;
    }
  }
  throw RestartCapExceeded("no certified answer after " + std::to_string(cfg.restart_cap) + " restarts (" +
                           std::to_string(out.truncations) + " truncated, " + std::to_string(out.ties) + " ties)");
}

}  // namespace vorcvp
