#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vorcvp/errors.hpp"
#include "vorcvp/scalar.hpp"

namespace vorcvp {

// Caps on exponential-size work. Exceeding either raises SizeError.
struct Limits {
  int dim_cap = 14;
  std::uint64_t enum_cap = 10'000'000;
};

// L = B Z^n for a full-rank rational n x n matrix B whose columns are the
// basis vectors. Immutable after construction.
class LatticeBasis {
 public:
  LatticeBasis() = default;

  // columns[j] is b_j.
  explicit LatticeBasis(std::vector<Vec> columns) : columns_(std::move(columns)) {
    const std::size_t n = columns_.size();
    if (n == 0) throw InputError("basis must have at least one vector");
    for (const auto& c : columns_)
      if (c.size() != n) throw InputError("basis must be square");
    gram_.assign(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        gram_[i][j] = dot(columns_[i], columns_[j]);
        gram_[j][i] = gram_[i][j];
      }
    invert();
  }

  // Row-major matrix, as stored in basis files.
  static LatticeBasis from_rows(const std::vector<Vec>& rows) {
    const std::size_t n = rows.size();
    std::vector<Vec> cols(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw InputError("basis must be square");
      for (std::size_t j = 0; j < n; ++j) cols[j][i] = rows[i][j];
    }
    return LatticeBasis(std::move(cols));
  }

  static LatticeBasis identity(std::size_t n) {
    std::vector<Vec> cols(n, zeros(n));
    for (std::size_t i = 0; i < n; ++i) cols[i][i] = 1;
    return LatticeBasis(std::move(cols));
  }

  std::size_t dim() const noexcept { return columns_.size(); }
  const std::vector<Vec>& columns() const noexcept { return columns_; }
  const Vec& column(std::size_t j) const { return columns_[j]; }
  const std::vector<Vec>& gram() const noexcept { return gram_; }
  // Rows of B^{-1}.
  const std::vector<Vec>& inverse() const noexcept { return inverse_; }

  std::vector<Vec> rows() const {
    const std::size_t n = dim();
    std::vector<Vec> r(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) r[i][j] = columns_[j][i];
    return r;
  }

  Vec apply(std::span<const std::int64_t> coeffs) const {
    Vec x = zeros(dim());
    for (std::size_t j = 0; j < dim(); ++j) {
      if (coeffs[j] == 0) continue;
      const Scalar c(to_integer(coeffs[j]));
      for (std::size_t i = 0; i < dim(); ++i) x[i] += c * columns_[j][i];
    }
    return x;
  }

  // Coordinates of x in the basis, B^{-1} x.
  Vec solve(std::span<const Scalar> x) const {
    Vec a(dim());
    for (std::size_t i = 0; i < dim(); ++i) a[i] = dot(inverse_[i], x);
    return a;
  }

  // A new basis for the scaled lattice kL.
  LatticeBasis scaled(const Scalar& k) const {
    std::vector<Vec> cols;
    cols.reserve(dim());
    for (const auto& c : columns_) cols.push_back(scale(k, c));
    return LatticeBasis(std::move(cols));
  }

  bool operator==(const LatticeBasis& o) const { return columns_ == o.columns_; }

 private:
  void invert() {
    const std::size_t n = dim();
    // Gauss-Jordan on [B | I], B stored by rows.
    std::vector<Vec> m = rows();
    std::vector<Vec> inv(n, zeros(n));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      while (p < n && m[p][c] == 0) ++p;
      if (p == n) throw InputError("basis vectors are linearly dependent");
      std::swap(m[p], m[c]);
      std::swap(inv[p], inv[c]);
      const Scalar piv = m[c][c];
      for (std::size_t k = 0; k < n; ++k) {
        m[c][k] /= piv;
        inv[c][k] /= piv;
      }
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c || m[r][c] == 0) continue;
        const Scalar f = m[r][c];
        for (std::size_t k = 0; k < n; ++k) {
          m[r][k] -= f * m[c][k];
          inv[r][k] -= f * inv[c][k];
        }
      }
    }
    inverse_ = std::move(inv);
  }

  std::vector<Vec> columns_;
  std::vector<Vec> gram_;
  std::vector<Vec> inverse_;
};

// A lattice vector: integer coefficients plus the ambient coordinates B a.
struct LatticePoint {
  IntVec coeffs;
  Vec coords;

  static LatticePoint from_coeffs(const LatticeBasis& basis, IntVec a) {
    Vec x = basis.apply(a);
    return LatticePoint{std::move(a), std::move(x)};
  }

  static LatticePoint origin(const LatticeBasis& basis) {
    return from_coeffs(basis, IntVec(basis.dim(), 0));
  }

  // Coefficients of an ambient point known to lie in the lattice.
  static LatticePoint from_coords(const LatticeBasis& basis, Vec x) {
    Vec a = basis.solve(x);
    IntVec coeffs(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].get_den() != 1) throw ContractError("point is not in the lattice");
      coeffs[i] = to_int64(a[i].get_num());
    }
    return LatticePoint{std::move(coeffs), std::move(x)};
  }

  LatticePoint plus(const LatticePoint& o) const {
    LatticePoint r{coeffs, add(coords, o.coords)};
    for (std::size_t i = 0; i < coeffs.size(); ++i) r.coeffs[i] += o.coeffs[i];
    return r;
  }

  LatticePoint minus(const LatticePoint& o) const {
    LatticePoint r{coeffs, sub(coords, o.coords)};
    for (std::size_t i = 0; i < coeffs.size(); ++i) r.coeffs[i] -= o.coeffs[i];
    return r;
  }

  bool operator==(const LatticePoint& o) const { return coeffs == o.coeffs; }
};

// An LLL-reduced basis of the same lattice. transform[j] holds the
// coefficients of reduced column j in the original basis, so original
// coefficients are a = sum_j c_j transform[j].
struct ReducedBasis {
  LatticeBasis basis;
  std::vector<IntVec> transform;

  IntVec to_original(std::span<const std::int64_t> c) const {
    const std::size_t n = c.size();
    IntVec a(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
      if (c[j] == 0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const __int128 v = static_cast<__int128>(a[i]) + static_cast<__int128>(c[j]) * transform[j][i];
        if (v > INT64_MAX || v < INT64_MIN) throw SizeError("coefficient exceeds 64-bit range");
        a[i] = static_cast<std::int64_t>(v);
      }
    }
    return a;
  }
};

// Exact LLL with delta = 3/4. Gram-Schmidt data is recomputed after each
// swap, which is cheap at the dimensions where enumeration is feasible.
inline ReducedBasis lll_reduce(const LatticeBasis& basis) {
  const std::size_t n = basis.dim();
  std::vector<Vec> b = basis.columns();
  std::vector<IntVec> u(n, IntVec(n, 0));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;

  std::vector<Vec> star(n);
  std::vector<Scalar> star_sq(n);
  std::vector<Vec> mu(n, zeros(n));
  auto gso = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      star[i] = b[i];
      for (std::size_t j = 0; j < i; ++j) {
        mu[i][j] = dot(b[i], star[j]) / star_sq[j];
        for (std::size_t k = 0; k < n; ++k) star[i][k] -= mu[i][j] * star[j][k];
      }
      star_sq[i] = norm_sq(star[i]);
    }
  };
  gso();
  const Scalar delta = make_rational(3, 4);
  std::size_t k = 1;
  while (k < n) {
    for (std::size_t jj = k; jj-- > 0;) {
      const Integer q = round_half_even(mu[k][jj]);
      if (q == 0) continue;
      const Scalar qs(q);
      const std::int64_t qi = to_int64(q);
      for (std::size_t i = 0; i < n; ++i) {
        b[k][i] -= qs * b[jj][i];
        u[k][i] -= qi * u[jj][i];
      }
      for (std::size_t l = 0; l < jj; ++l) mu[k][l] -= qs * mu[jj][l];
      mu[k][jj] -= qs;
    }
    if (star_sq[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * star_sq[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      std::swap(u[k], u[k - 1]);
      gso();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  return ReducedBasis{LatticeBasis(std::move(b)), std::move(u)};
}

// Targets are plain rational points; the alias documents intent.
using Target = Vec;

struct EncodingStats {
  std::uint64_t bits_basis = 0;
  std::uint64_t bits_target = 0;
  Integer qbar = 1;
};

inline std::uint64_t encoding_length(const LatticeBasis& basis) {
  return encoding_length(basis.rows());
}

// Least qbar with qbar*L in Z^n and qbar*t in Z^n: the lcm of all reduced
// denominators (B has integer entries times 1/qbar iff qbar*L is integral).
inline Integer qbar(const LatticeBasis& basis, std::span<const Scalar> target) {
  Integer acc = 1;
  for (const auto& c : basis.columns()) acc = lcm_of_denominators(c, acc);
  return lcm_of_denominators(target, acc);
}

inline EncodingStats encoding_stats(const LatticeBasis& basis, std::span<const Scalar> target) {
  return EncodingStats{encoding_length(basis), encoding_length(target), qbar(basis, target)};
}

// The 2^n - 1 nonzero 0/1 vectors in lexicographic order.
inline std::vector<IntVec> coset_reps_mod2(std::size_t n, const Limits& limits = {}) {
  if (n == 0 || static_cast<int>(n) > limits.dim_cap)
    throw SizeError("dimension " + std::to_string(n) + " exceeds the cap of " +
                    std::to_string(limits.dim_cap));
  std::vector<IntVec> reps;
  const std::uint64_t count = (std::uint64_t{1} << n) - 1;
  reps.reserve(count);
  for (std::uint64_t mask = 1; mask <= count; ++mask) {
    IntVec p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = (mask >> (n - 1 - i)) & 1U;
    reps.push_back(std::move(p));
  }
  return reps;
}

// Sum of squared norms of n independent lattice vectors; the covering
// radius satisfies mu <= sqrt(sum)/2. Kept squared to stay in Q.
inline Scalar covering_radius_upper(const std::vector<Vec>& vectors) {
  if (vectors.empty() || rank_of(vectors) != vectors.size() || vectors.size() != vectors[0].size())
    throw InputError("covering radius bound needs n linearly independent vectors");
  Scalar total = 0;
  for (const auto& v : vectors) total += norm_sq(v);
  return total;
}

}  // namespace vorcvp
