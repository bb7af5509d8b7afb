#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "support.hpp"
#include "vorcvp/graph_oracle.hpp"
#include "vorcvp/oracles.hpp"
#include "vorcvp/voronoi.hpp"

using namespace vorcvp;
using namespace testing_support;

namespace {

std::set<IntVec> coeff_set(const std::vector<LatticePoint>& pts) {
  std::set<IntVec> s;
  for (const auto& p : pts) s.insert(p.coeffs);
  return s;
}

std::set<IntVec> naive_ball(const LatticeBasis& b, std::span<const Scalar> c, const Scalar& r2, std::int64_t k) {
  std::set<IntVec> s;
  for_each_coeff(b.dim(), k, [&](const IntVec& a) {
    if (norm_sq(sub(b.apply(a), c)) <= r2) s.insert(a);
  });
  return s;
}

}  // namespace

TEST(EnumerateBall, UnitBallOfZ2) {
  const auto pts = enumerate_ball(LatticeBasis::identity(2), zeros(2), q(1));
  EXPECT_EQ(coeff_set(pts), (std::set<IntVec>{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}));
}

TEST(EnumerateBall, BoundaryPointsIncluded) {
  const auto pts = enumerate_ball(LatticeBasis::identity(2), vec({q(1, 2), q(0)}), q(1, 4));
  EXPECT_EQ(coeff_set(pts), (std::set<IntVec>{{0, 0}, {1, 0}}));
}

TEST(EnumerateBall, SkewBasisAgainstCoefficientScan) {
  const LatticeBasis b = rows({{q(2), q(1)}, {q(0), q(1)}});
  for (const Scalar& r2 : {q(1), q(2), q(5), q(37, 4)}) {
    const auto pts = enumerate_ball(b, zeros(2), r2);
    EXPECT_EQ(coeff_set(pts), naive_ball(b, zeros(2), r2, 12)) << to_string(r2);
  }
}

TEST(EnumerateBall, RandomLatticesAgainstCoefficientScan) {
  Rng rng(4);
  int compared = 0;
  for (std::uint64_t s = 0; s < 16; ++s) {
    const std::size_t n = 2 + s % 2;
    const LatticeBasis b = random_lattice(n, s);
    const Vec c = random_target(n, rng, 8);
    const Scalar r2 = q(static_cast<long>(1 + s % 5));
    const auto box = safe_box(b, c, r2);
    if (!box) continue;
    std::set<IntVec> ref;
    IntVec a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = (*box)[i].first;
    for (;;) {
      if (norm_sq(sub(b.apply(a), c)) <= r2) ref.insert(a);
      std::size_t j = 0;
      while (j < n && a[j] == (*box)[j].second) {
        a[j] = (*box)[j].first;
        ++j;
      }
      if (j == n) break;
      ++a[j];
    }
    ++compared;
    EXPECT_EQ(coeff_set(enumerate_ball(b, c, r2)), ref) << "seed " << s;
  }
  EXPECT_GE(compared, 10);
}

TEST(EnumerateBall, Errors) {
  EXPECT_THROW(enumerate_ball(LatticeBasis::identity(2), zeros(2), q(-1)), InputError);
  EXPECT_THROW(enumerate_ball(LatticeBasis::identity(4), zeros(4), q(10000), Limits{14, 1000}), SizeError);
}

TEST(ShortestVector, IntegerLattice) {
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto [l1, pts] = shortest_vector(LatticeBasis::identity(n));
    EXPECT_EQ(l1, q(1));
    EXPECT_EQ(pts.size(), 2 * n);
  }
}

TEST(ShortestVector, SkewBasis) {
  const LatticeBasis b = rows({{q(2), q(1)}, {q(0), q(1)}});
  const auto [l1, pts] = shortest_vector(b);
  // Reference: smallest nonzero norm over a wide coefficient box.
  Scalar best = -1;
  std::set<IntVec> arg;
  for_each_coeff(2, 10, [&](const IntVec& a) {
    if (a == IntVec{0, 0}) return;
    const Scalar d = norm_sq(b.apply(a));
    if (best < 0 || d < best) {
      best = d;
      arg = {a};
    } else if (d == best) {
      arg.insert(a);
    }
  });
  EXPECT_EQ(l1, best);
  EXPECT_EQ(coeff_set(pts), arg);
  // Columns (2,0) and (1,1) generate {x = y mod 2}, so lambda1^2 = 2.
  EXPECT_EQ(l1, q(2));
  // Read with rows as the generators instead, (0,1) is in the lattice.
  EXPECT_EQ(shortest_vector(rows({{q(2), q(0)}, {q(1), q(1)}})).first, q(1));
}

TEST(ShortestVector, OneDimensional) {
  const auto [l1, pts] = shortest_vector(rows({{q(5, 2)}}));
  EXPECT_EQ(l1, q(25, 4));
  EXPECT_EQ(coeff_set(pts), (std::set<IntVec>{{1}, {-1}}));
}

TEST(CvpBruteforce, Z2Examples) {
  const LatticeBasis z2 = LatticeBasis::identity(2);
  const auto a = cvp_bruteforce(z2, vec({q(3, 10), q(7, 10)}));
  EXPECT_EQ(a.dist_sq, q(9, 50));
  ASSERT_EQ(a.minimizers.size(), 1u);
  EXPECT_EQ(a.minimizers[0].coeffs, (IntVec{0, 1}));

  const auto h = cvp_bruteforce(z2, vec({q(1, 2), q(1, 2)}));
  EXPECT_EQ(h.dist_sq, q(1, 2));
  EXPECT_EQ(coeff_set(h.minimizers), (std::set<IntVec>{{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
}

TEST(CvpBruteforce, AgainstCoefficientScan) {
  Rng rng(21);
  int compared = 0;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const std::size_t n = 2 + s % 3;
    const LatticeBasis b = random_lattice(n, s);
    const Vec t = random_target(n, rng);
    const auto ref = reference_cvp(b, t);
    if (!ref) continue;
    ++compared;
    const auto fast = cvp_bruteforce(b, t);
    EXPECT_EQ(fast.dist_sq, ref->dist_sq) << "seed " << s;
    std::vector<IntVec> got;
    for (const auto& p : fast.minimizers) got.push_back(p.coeffs);
    EXPECT_EQ(got, ref->minimizers) << "seed " << s;
  }
  EXPECT_GE(compared, 25);
}

TEST(CvpBruteforce, MinimizersAreVoronoiMembersAndStrictlyBest) {
  Rng rng(8);
  for (std::uint64_t s = 0; s < 15; ++s) {
    const std::size_t n = 2 + s % 3;
    const LatticeBasis b = random_lattice(n, s);
    const VoronoiCellData cell = compute_relevant_vectors(b);
    const Vec t = random_target(n, rng);
    const auto sol = cvp_bruteforce(b, t);
    for (const auto& y : sol.minimizers) {
      EXPECT_EQ(norm_sq(sub(t, y.coords)), sol.dist_sq);
      EXPECT_LE(voronoi_norm(cell, sub(t, y.coords)), 1);
    }
    // Every other point within twice the distance is strictly farther.
    const auto around = enumerate_ball(b, t, sol.dist_sq * 4);
    const auto best = coeff_set(sol.minimizers);
    for (const auto& p : around)
      if (!best.count(p.coeffs)) EXPECT_GT(norm_sq(sub(t, p.coords)), sol.dist_sq);
  }
}

TEST(GraphDistance, Examples) {
  for (std::size_t n = 2; n <= 5; ++n) {
    const LatticeBasis b = LatticeBasis::identity(n);
    const VoronoiCellData cell = compute_relevant_vectors(b);
    const auto d = graph_distance_bfs(cell, LatticePoint::origin(b), LatticePoint::from_coeffs(b, IntVec(n, 1)), 10);
    ASSERT_TRUE(d);
    EXPECT_EQ(*d, n);
  }
  const LatticeBasis z2 = LatticeBasis::identity(2);
  const VoronoiCellData cell = compute_relevant_vectors(z2);
  const LatticePoint x = LatticePoint::from_coeffs(z2, {4, -2});
  EXPECT_EQ(graph_distance_bfs(cell, x, x, 0), std::optional<std::size_t>(0));
  EXPECT_EQ(graph_distance_bfs(cell, LatticePoint::origin(z2), LatticePoint::from_coeffs(z2, {2, 1}), 10),
            std::optional<std::size_t>(3));
  EXPECT_FALSE(graph_distance_bfs(cell, LatticePoint::origin(z2), LatticePoint::from_coeffs(z2, {2, 1}), 2));
}

TEST(GraphDistance, IntegerLatticeIsL1) {
  const LatticeBasis z3 = LatticeBasis::identity(3);
  const VoronoiCellData cell = compute_relevant_vectors(z3);
  for (const auto& [a, d] : graph_ball(cell, 4)) {
    std::size_t l1 = 0;
    for (auto x : a) l1 += static_cast<std::size_t>(std::abs(x));
    EXPECT_EQ(d, l1);
  }
}

TEST(GraphDistance, SandwichOnRandomLattices) {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const LatticeBasis b = random_lattice(3, s);
    const VoronoiCellData cell = compute_relevant_vectors(b);
    const Scalar n(3);
    for (const auto& [a, d] : graph_ball(cell, 3)) {
      const Scalar nv = voronoi_norm(cell, b.apply(a));
      const Scalar dg(static_cast<long>(d));
      EXPECT_LE(nv / 2, dg);
      EXPECT_LE(dg, n / 2 * nv);
    }
  }
}

TEST(GraphDistance, BallAgreesWithPairwiseSearch) {
  const LatticeBasis b = random_lattice(2, 3);
  const VoronoiCellData cell = compute_relevant_vectors(b);
  for (const auto& [a, d] : graph_ball(cell, 3)) {
    const auto e = graph_distance_bfs(cell, LatticePoint::origin(b), LatticePoint::from_coeffs(b, a), 3);
    ASSERT_TRUE(e);
    EXPECT_EQ(*e, d);
  }
}
