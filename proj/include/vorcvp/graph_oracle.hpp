#pragma once

// Breadth-first search on the Voronoi graph, where x ~ y iff x - y is in VR.
// The graph is translation invariant, so every search runs from the origin
// in coefficient space.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vorcvp/lattice.hpp"
#include "vorcvp/voronoi.hpp"

namespace vorcvp {

struct IntVecHash {
  std::size_t operator()(const IntVec& a) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : a) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

// Every lattice point within graph distance `cap` of the origin, with its
// distance, in BFS order.
inline std::vector<std::pair<IntVec, std::size_t>> graph_ball(const VoronoiCellData& cell, std::size_t cap) {
  std::unordered_map<IntVec, std::size_t, IntVecHash> dist;
  std::vector<std::pair<IntVec, std::size_t>> order;
  std::deque<IntVec> frontier;
  IntVec origin(cell.dim(), 0);
  dist.emplace(origin, 0);
  order.emplace_back(origin, 0);
  frontier.push_back(origin);
  while (!frontier.empty()) {
    IntVec cur = std::move(frontier.front());
    frontier.pop_front();
    const std::size_t d = dist.at(cur);
    if (d == cap) continue;
    for (const auto& r : cell.vr()) {
      IntVec next = cur;
      for (std::size_t i = 0; i < next.size(); ++i) next[i] += r.coeffs[i];
      if (dist.emplace(next, d + 1).second) {
        order.emplace_back(next, d + 1);
        frontier.push_back(std::move(next));
      }
    }
  }
  return order;
}

// d_G(x, y), or nullopt if it exceeds cap.
inline std::optional<std::size_t> graph_distance_bfs(const VoronoiCellData& cell, const LatticePoint& x,
                                                     const LatticePoint& y, std::size_t cap) {
  IntVec goal(cell.dim());
  for (std::size_t i = 0; i < goal.size(); ++i) goal[i] = y.coeffs[i] - x.coeffs[i];
  if (std::all_of(goal.begin(), goal.end(), [](std::int64_t v) { return v == 0; })) return 0;

  std::unordered_map<IntVec, std::size_t, IntVecHash> dist;
  std::deque<IntVec> frontier;
  IntVec origin(cell.dim(), 0);
  dist.emplace(origin, 0);
  frontier.push_back(origin);
  while (!frontier.empty()) {
    IntVec cur = std::move(frontier.front());
    frontier.pop_front();
    const std::size_t d = dist.at(cur);
    if (d == cap) continue;
    for (const auto& r : cell.vr()) {
      IntVec next = cur;
      for (std::size_t i = 0; i < next.size(); ++i) next[i] += r.coeffs[i];
      if (next == goal) return d + 1;
      if (dist.emplace(next, d + 1).second) frontier.push_back(std::move(next));
    }
  }
  return std::nullopt;
}

}  // namespace vorcvp
