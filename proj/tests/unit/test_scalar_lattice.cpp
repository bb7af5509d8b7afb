#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "vorcvp/lattice.hpp"
#include "vorcvp/scalar.hpp"

using namespace vorcvp;
using namespace testing_support;

namespace {

// 1 + ceil(log2(|z| + 1)) by counting doublings, no bit tricks.
std::uint64_t reference_bits(long z) {
  const unsigned long m = static_cast<unsigned long>(std::labs(z)) + 1;
  std::uint64_t k = 0;
  unsigned long p = 1;
  while (p < m) {
    p *= 2;
    ++k;
  }
  return 1 + k;
}

}  // namespace

TEST(EncodingLength, IntegerExamples) {
  EXPECT_EQ(encoding_length_int(0), 1u);
  EXPECT_EQ(encoding_length_int(3), 3u);
  EXPECT_EQ(encoding_length_int(100), 8u);
}

TEST(EncodingLength, IntegerMatchesFormulaOnRange) {
  for (long z = -5000; z <= 5000; ++z) ASSERT_EQ(encoding_length_int(Integer(z)), reference_bits(z)) << z;
}

TEST(EncodingLength, LargeIntegers) {
  // |z| + 1 = 2^200 exactly: 1 + 200.
  const Integer z = (Integer(1) << 200) - 1;
  EXPECT_EQ(encoding_length_int(z), 201u);
  EXPECT_EQ(encoding_length_int(-z), 201u);
  EXPECT_EQ(encoding_length_int(z + 1), 202u);
}

TEST(EncodingLength, RationalsFollowTheFormula) {
  // <0/1> = <0> + <1> = 1 + 2.
  EXPECT_EQ(encoding_length(q(0)), 3u);
  // <1/2> + <3/1> = (2 + 3) + (3 + 2).
  const Vec v = vec({q(1, 2), q(3)});
  EXPECT_EQ(encoding_length(v), 10u);
  // Identity 2x2: two entries 1/1 (4 each) and two entries 0/1 (3 each).
  EXPECT_EQ(encoding_length(LatticeBasis::identity(2)), 14u);
}

TEST(EncodingLength, AdditiveAndSignInvariant) {
  Rng rng(11);
  for (int it = 0; it < 200; ++it) {
    const Vec a = random_rational_target(3, rng, 1000, 97);
    const Vec b = random_rational_target(2, rng, 1000, 97);
    Vec ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    EXPECT_EQ(encoding_length(ab), encoding_length(a) + encoding_length(b));
    EXPECT_EQ(encoding_length(scale(Scalar(-1), a)), encoding_length(a));
  }
}

TEST(ScalarParse, CanonicalForms) {
  EXPECT_EQ(to_string(parse_scalar("2/4")), "1/2");
  EXPECT_EQ(to_string(parse_scalar("-6/3")), "-2");
  EXPECT_EQ(to_string(parse_scalar("+5")), "5");
  EXPECT_EQ(to_string(parse_scalar("0/7")), "0");
  EXPECT_EQ(parse_scalar("10/4").get_den(), 2);
}

TEST(ScalarParse, RejectsMalformed) {
  for (const char* bad : {"", "1/0", "abc", "1/-2", "1.5", "1//2", "/3", "3/", " 1"})
    EXPECT_THROW(parse_scalar(bad), InputError) << bad;
}

TEST(ScalarParse, RoundTrip) {
  Rng rng(5);
  for (int it = 0; it < 500; ++it) {
    const Scalar x = random_rational(rng, 100000, 1000);
    EXPECT_EQ(parse_scalar(to_string(x)), x);
  }
}

TEST(Scalar, MakeRationalIsReduced) {
  const Scalar a = make_rational(Integer(1296), Integer(5776));
  EXPECT_EQ(a, q(81, 361));
  EXPECT_EQ(a.get_den(), 361);
}

TEST(Scalar, RoundHalfEven) {
  EXPECT_EQ(round_half_even(q(1, 2)), 0);
  EXPECT_EQ(round_half_even(q(3, 2)), 2);
  EXPECT_EQ(round_half_even(q(5, 2)), 2);
  EXPECT_EQ(round_half_even(q(-1, 2)), 0);
  EXPECT_EQ(round_half_even(q(-3, 2)), -2);
  EXPECT_EQ(round_half_even(q(7, 10)), 1);
  EXPECT_EQ(round_half_even(q(-7, 10)), -1);
  EXPECT_EQ(round_half_even(q(4)), 4);
}

TEST(Scalar, FloorCeil) {
  EXPECT_EQ(floor_of(q(-1, 3)), -1);
  EXPECT_EQ(ceil_of(q(-1, 3)), 0);
  EXPECT_EQ(floor_of(q(7, 2)), 3);
  EXPECT_EQ(ceil_of(q(7, 2)), 4);
}

TEST(Qbar, Examples) {
  EXPECT_EQ(qbar(LatticeBasis::identity(2), vec({q(1, 2), q(1, 3)})), 6);
  EXPECT_EQ(qbar(rows({{q(2), q(1)}, {q(0), q(3)}}), vec({q(4), q(-1)})), 1);
  EXPECT_EQ(qbar(rows({{q(1), q(1, 2)}, {q(0), q(1, 2)}}), vec({q(1, 4), q(0)})), 4);
}

TEST(Qbar, LeastClearingInteger) {
  Rng rng(3);
  for (int it = 0; it < 60; ++it) {
    const LatticeBasis b = random_rational_basis(2, 100 + it, RandomBasisParams{5, 6});
    const Vec t = random_rational_target(2, rng, 9, 8);
    const Integer qb = qbar(b, t);
    auto clears = [&](const Integer& k) {
      for (const auto& c : b.columns())
        for (const auto& x : c)
          if (Scalar(x * Scalar(k)).get_den() != 1) return false;
      for (const auto& x : t)
        if (Scalar(x * Scalar(k)).get_den() != 1) return false;
      return true;
    };
    EXPECT_TRUE(clears(qb));
    for (long d = 1; d < qb.get_si(); ++d) EXPECT_FALSE(clears(Integer(d))) << d;
  }
}

TEST(CosetReps, LexicographicOrder) {
  EXPECT_EQ(coset_reps_mod2(1), (std::vector<IntVec>{{1}}));
  EXPECT_EQ(coset_reps_mod2(2), (std::vector<IntVec>{{0, 1}, {1, 0}, {1, 1}}));
  const auto r3 = coset_reps_mod2(3);
  EXPECT_EQ(r3.size(), 7u);
  EXPECT_TRUE(std::is_sorted(r3.begin(), r3.end()));
}

TEST(CosetReps, DimensionCap) {
  EXPECT_THROW(coset_reps_mod2(15), SizeError);
  EXPECT_NO_THROW(coset_reps_mod2(15, Limits{15, 10}));
  EXPECT_THROW(coset_reps_mod2(4, Limits{3, 10}), SizeError);
}

TEST(CoveringRadius, Examples) {
  for (std::size_t n = 1; n <= 6; ++n)
    EXPECT_EQ(covering_radius_upper(LatticeBasis::identity(n).columns()), Scalar(static_cast<long>(n)));
  EXPECT_EQ(covering_radius_upper({vec({q(7, 3)})}), q(49, 9));
  EXPECT_EQ(covering_radius_upper(LatticeBasis::identity(2).scaled(3).columns()), q(18));
}

TEST(CoveringRadius, DependentVectorsRejected) {
  EXPECT_THROW(covering_radius_upper({vec({q(1), q(2)}), vec({q(2), q(4)})}), InputError);
  EXPECT_THROW(covering_radius_upper({vec({q(1), q(2)})}), InputError);
}

TEST(LatticeBasis, Validation) {
  EXPECT_THROW(LatticeBasis::from_rows({vec({q(1), q(2)}), vec({q(2), q(4)})}), InputError);
  EXPECT_THROW(LatticeBasis::from_rows({vec({q(1), q(2)}), vec({q(2)})}), InputError);
  EXPECT_THROW(LatticeBasis(std::vector<Vec>{}), InputError);
}

TEST(LatticeBasis, RowsAndColumns) {
  const LatticeBasis b = rows({{q(1), q(1, 2)}, {q(0), q(1, 2)}});
  EXPECT_EQ(b.column(1), vec({q(1, 2), q(1, 2)}));
  EXPECT_EQ(LatticeBasis::from_rows(b.rows()), b);
}

TEST(LatticeBasis, GramIsSymmetricPositiveDefinite) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const LatticeBasis b = random_lattice(2 + s % 4, s);
    const auto& g = b.gram();
    const std::size_t n = b.dim();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(g[i][j], g[j][i]);
    // Leading principal minors by exact elimination.
    std::vector<Vec> m = g;
    for (std::size_t k = 0; k < n; ++k) {
      ASSERT_GT(m[k][k], 0) << "minor " << k;
      for (std::size_t r = k + 1; r < n; ++r) {
        const Scalar f = m[r][k] / m[k][k];
        for (std::size_t c = k; c < n; ++c) m[r][c] -= f * m[k][c];
      }
    }
  }
}

TEST(LatticeBasis, InverseAndSolve) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const LatticeBasis b = random_lattice(3, s);
    IntVec a{3, -1, 2};
    EXPECT_EQ(b.solve(b.apply(a)), (Vec{q(3), q(-1), q(2)}));
  }
}

TEST(LatticePoint, FromCoords) {
  const LatticeBasis b = rows({{q(2), q(1)}, {q(0), q(1)}});
  const LatticePoint p = LatticePoint::from_coords(b, vec({q(3), q(1)}));
  EXPECT_EQ(p.coeffs, (IntVec{1, 1}));
  EXPECT_THROW(LatticePoint::from_coords(b, vec({q(1), q(0)})), ContractError);
  EXPECT_EQ(p.plus(p).minus(p), p);
}

TEST(Lll, SameLatticeAndReduced) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const LatticeBasis b = random_lattice(2 + s % 5, s);
    const ReducedBasis r = lll_reduce(b);
    const std::size_t n = b.dim();
    // Each reduced column is B u_j, and the transform is unimodular.
    std::vector<Vec> u(n, Vec(n));
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_EQ(r.basis.column(j), b.apply(r.transform[j]));
      for (std::size_t i = 0; i < n; ++i) u[j][i] = Scalar(to_integer(r.transform[j][i]));
    }
    const LatticeBasis um(u);  // throws if singular
    for (const auto& row : um.inverse())
      for (const auto& x : row) EXPECT_EQ(x.get_den(), 1);
    // The first reduced vector is no longer than the longest input vector.
    Scalar longest_in = 0;
    for (const auto& c : b.columns()) longest_in = std::max(longest_in, norm_sq(c));
    EXPECT_LE(norm_sq(r.basis.column(0)), longest_in);
  }
}

TEST(BitBound, QbarTimesMuUpperBelowEncodingLength) {
  Rng rng(17);
  for (std::uint64_t s = 0; s < 40; ++s) {
    const LatticeBasis b = random_lattice(2 + s % 4, s);
    const Vec t = random_target(b.dim(), rng);
    const Scalar mu_sq = covering_radius_upper(b.columns()) / 4;
    const double lhs = std::log2(qbar(b, t).get_d()) + 0.5 * std::log2(mu_sq.get_d());
    EXPECT_LE(lhs, static_cast<double>(encoding_length(b) + encoding_length(t)));
  }
}
