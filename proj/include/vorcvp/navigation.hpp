#pragma once

// Walks on the Voronoi graph.
//
// The core primitive follows the segment [a, b] through the Voronoi tiling:
// inside cell w + V the segment leaves through the facet of the v that
// minimizes <v, v/2 + w - a> / <v, b - a> over v with <v, b - a> > 0, at
// that ratio's value of the segment parameter. Ratios are compared by
// cross-multiplication, so one edge costs O(n |VR|) exact operations.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vorcvp/errors.hpp"
#include "vorcvp/lattice.hpp"
#include "vorcvp/scalar.hpp"
#include "vorcvp/voronoi.hpp"

namespace vorcvp {

enum class Phase { B, C };

inline const char* phase_name(Phase p) { return p == Phase::B ? "B" : "C"; }

// What to do when several facets are exited at the same parameter value.
// `report` raises TieDetected; `lexicographic` takes the lowest VR index,
// which leaves the generic-position setting the randomized analysis assumes.
enum class TiePolicy { report, lexicographic };

struct CrossingEvent {
  Scalar alpha;      // position on the segment being followed, in [0, 1)
  std::size_t edge;  // index into the VR list
  LatticePoint before;
  LatticePoint after;
  Phase phase = Phase::B;
};

struct PathTrace {
  LatticePoint start;
  std::vector<CrossingEvent> events;
  std::size_t phase_b = 0;
  std::size_t phase_c = 0;
  LatticePoint final_point;

  std::size_t edges() const noexcept { return events.size(); }
};

struct PerturbedSegment {
  Vec a;
  Vec b;
  Phase purpose = Phase::B;
};

namespace detail {

// Follows [a, b] starting in cell w + V (caller guarantees a is in it).
// Returns false when `budget` edges have been recorded without reaching b.
inline bool follow_segment(const VoronoiCellData& cell, const PerturbedSegment& seg, LatticePoint& w,
                           PathTrace& trace, TiePolicy policy, std::size_t budget) {
  const Vec d = sub(seg.b, seg.a);
  struct Facet {
    std::size_t index;
    Scalar slope;  // <v, b - a> > 0
    Scalar num;    // <v, v/2 + w - a>
  };
  std::vector<Facet> active;
  for (std::size_t k = 0; k < cell.size(); ++k) {
    const auto& r = cell[k];
    Scalar slope = dot(r.v, d);
    if (slope <= 0) continue;
    Scalar num = r.half_norm_sq + dot(r.v, w.coords) - dot(r.v, seg.a);
    active.push_back(Facet{k, std::move(slope), std::move(num)});
  }
  if (active.empty()) return true;

  std::optional<Scalar> prev_alpha;
  std::size_t prev_edge = 0;
  std::vector<std::size_t> ties;
  Scalar lhs, rhs;
  for (;;) {
    std::size_t best = 0;
    ties.assign(1, active[0].index);
    for (std::size_t i = 1; i < active.size(); ++i) {
      lhs = active[i].num * active[best].slope;
      rhs = active[best].num * active[i].slope;
      const int c = cmp(lhs, rhs);
      if (c < 0) {
        best = i;
        ties.assign(1, active[i].index);
      } else if (c == 0) {
        ties.push_back(active[i].index);
      }
    }
    Scalar alpha = active[best].num / active[best].slope;
    if (alpha >= 1) return true;
    if (ties.size() > 1 && policy == TiePolicy::report) throw TieDetected(ties, to_string(alpha));
    if (prev_alpha && alpha <= *prev_alpha && policy == TiePolicy::report)
      throw TieDetected({prev_edge, active[best].index}, to_string(alpha));
    if (trace.events.size() >= budget) return false;

    const std::size_t e = active[best].index;
    const auto& step = cell[e];
    LatticePoint next{w.coeffs, add(w.coords, step.v)};
    for (std::size_t i = 0; i < next.coeffs.size(); ++i) next.coeffs[i] += step.coeffs[i];
    for (auto& f : active) f.num += dot(cell[f.index].v, step.v);
    trace.events.push_back(CrossingEvent{alpha, e, w, next, seg.purpose});
    if (seg.purpose == Phase::B) ++trace.phase_b;
    else ++trace.phase_c;
    w = std::move(next);
    prev_alpha = std::move(alpha);
    prev_edge = e;
  }
}

}  // namespace detail

struct LineFollowResult {
  LatticePoint w;
  PathTrace trace;
};

// Cells met by [a, b] starting from z + V, which must contain a.
// Postcondition: b is in w + V.
inline LineFollowResult line_follow(const VoronoiCellData& cell, std::span<const Scalar> a,
                                    std::span<const Scalar> b, const LatticePoint& z,
                                    TiePolicy policy = TiePolicy::report, Phase phase = Phase::B) {
  if (!membership(cell, sub(a, z.coords))) throw ContractError("line_follow: start point is not in z + V");
  LineFollowResult out{z, PathTrace{}};
  out.trace.start = z;
  PerturbedSegment seg{Vec(a.begin(), a.end()), Vec(b.begin(), b.end()), phase};
  detail::follow_segment(cell, seg, out.w, out.trace, policy, SIZE_MAX);
  out.trace.final_point = out.w;
  return out;
}

struct SlicerResult {
  LatticePoint y;
  std::size_t steps = 0;
};

// Greedy descent: repeatedly add the relevant vector giving the largest
// strict decrease of |z - t|^2. Stops exactly when t is in z + V.
inline SlicerResult iterative_slicer(const VoronoiCellData& cell, std::span<const Scalar> t, const LatticePoint& z) {
  SlicerResult out{z, 0};
  Vec diff = sub(t, z.coords);  // t - z
  Scalar gain, best_gain;
  for (;;) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < cell.size(); ++k) {
      // |z + v - t|^2 = |z - t|^2 - (2<v, t - z> - |v|^2)
      gain = 2 * dot(cell[k].v, diff) - cell[k].norm_sq;
      if (gain > 0 && (!best || gain > best_gain)) {
        best = k;
        best_gain = gain;
      }
    }
    if (!best) return out;
    const auto& r = cell[*best];
    for (std::size_t i = 0; i < diff.size(); ++i) {
      diff[i] -= r.v[i];
      out.y.coords[i] += r.v[i];
      out.y.coeffs[i] += r.coeffs[i];
    }
    ++out.steps;
  }
}

struct MvResult {
  LatticePoint y;
  PathTrace trace;
};

// On-graph variant of the Micciancio-Voulgaris walk. [x, t] is cut into
// k = ceil(|t - x|_V / 2) pieces; for each waypoint p the walk repeatedly
// traces [z, p] from the current centre z and crosses the facet it exits
// through, until p is in z + V. Each step strictly decreases |z - p|.
inline MvResult mv_walk(const VoronoiCellData& cell, std::span<const Scalar> t, const LatticePoint& x,
                        TiePolicy policy = TiePolicy::report) {
  MvResult out{x, PathTrace{}};
  out.trace.start = x;
  const Vec span_vec = sub(t, x.coords);
  const Scalar dist = voronoi_norm(cell, span_vec);
  if (dist <= 1) {
    out.trace.final_point = x;
    return out;
  }
  const Integer pieces = std::max(Integer(1), ceil_of(dist / 2));
  const std::int64_t k = to_int64(pieces);
  for (std::int64_t j = 1; j <= k; ++j) {
    const Vec p = add(x.coords, scale(make_rational(to_integer(j), pieces), span_vec));
    while (!membership(cell, sub(p, out.y.coords))) {
      PerturbedSegment seg{out.y.coords, p, Phase::B};
      const std::size_t before = out.trace.events.size();
      LatticePoint w = out.y;
      detail::follow_segment(cell, seg, w, out.trace, policy, before + 1);
      if (out.trace.events.size() == before) throw ContractError("mv_walk: no facet crossed toward waypoint");
      out.y = std::move(w);
    }
  }
  out.trace.final_point = out.y;
  return out;
}

enum class RslStatus { completed, truncated };

struct RslResult {
  RslStatus status = RslStatus::completed;
  LatticePoint y;          // cell centre reached (partial when truncated)
  bool certified = false;  // t in y + V, decided exactly
  PathTrace trace;
};

// Randomized straight line from x toward t with perturbation z_sample in V:
// phase A is the trivial path x, phase B follows [x + Z, t + Z] from x,
// phase C follows [t + Z, t + alpha Z] from where phase B ended.
inline RslResult randomized_straight_line(const VoronoiCellData& cell, const LatticePoint& x,
                                          std::span<const Scalar> t, std::span<const Scalar> z_sample,
                                          const Scalar& alpha, std::size_t max_edges,
                                          TiePolicy policy = TiePolicy::report) {
  if (!membership(cell, z_sample)) throw ContractError("perturbation is not in V");
  if (alpha <= 0 || alpha > 1) throw ContractError("alpha must lie in (0, 1]");
  RslResult out{RslStatus::completed, x, false, PathTrace{}};
  out.trace.start = x;

  const Vec start = add(x.coords, z_sample);
  const Vec mid = add(t, z_sample);
  const Vec end = add(t, scale(alpha, z_sample));
  if (!detail::follow_segment(cell, PerturbedSegment{start, mid, Phase::B}, out.y, out.trace, policy, max_edges) ||
      !detail::follow_segment(cell, PerturbedSegment{mid, end, Phase::C}, out.y, out.trace, policy, max_edges)) {
    out.status = RslStatus::truncated;
    out.trace.final_point = out.y;
    return out;
  }
  out.trace.final_point = out.y;
  out.certified = membership(cell, sub(t, out.y.coords));
  return out;
}

inline std::pair<std::size_t, std::size_t> count_crossings(const PathTrace& trace) {
  return {trace.phase_b, trace.phase_c};
}

}  // namespace vorcvp
