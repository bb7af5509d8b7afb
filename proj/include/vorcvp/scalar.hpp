#pragma once

// Exact rational scalars and small dense vector helpers.
//
// Everything geometric in this library is decided over Q. The only
// floating point lives in the samplers and in prefilters that are always
// followed by an exact check.

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vorcvp/errors.hpp"

namespace vorcvp {

using Scalar = mpq_class;
using Integer = mpz_class;
using Vec = std::vector<Scalar>;
using IntVec = std::vector<std::int64_t>;

inline Integer to_integer(std::int64_t v) {
  Integer z;
  mpz_set_si(z.get_mpz_t(), static_cast<long>(v));
  return z;
}

inline std::int64_t to_int64(const Integer& z) {
  if (!mpz_fits_slong_p(z.get_mpz_t())) throw SizeError("integer does not fit in 64 bits");
  return static_cast<std::int64_t>(mpz_get_si(z.get_mpz_t()));
}

// Accepts "p" or "p/q" with optional leading '-'; q must be nonzero.
// The result is always reduced with a positive denominator.
inline Scalar parse_scalar(std::string_view text) {
  auto digits = [](std::string_view s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!digits(num, true) || !digits(den, false))
    throw InputError("malformed rational '" + std::string(text) + "'");
  std::string num_str(num);
  if (!num_str.empty() && num_str[0] == '+') num_str.erase(0, 1);
  Integer p(num_str, 10);
  Integer q(std::string(den), 10);
  if (q == 0) throw InputError("zero denominator in '" + std::string(text) + "'");
  Scalar r(p, q);
  r.canonicalize();
  return r;
}

// num / den in lowest terms. gmpxx does not reduce on construction, and
// operator== on unreduced values compares representations.
inline Scalar make_rational(const Integer& num, const Integer& den) {
  Scalar r(num, den);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Scalar& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

inline double to_double(const Scalar& x) { return x.get_d(); }

// <z> = 1 + ceil(log2(|z|+1)). For m >= 1, ceil(log2(m+1)) is the bit length of m.
inline std::uint64_t encoding_length_int(const Integer& z) {
  if (z == 0) return 1;
  return 1 + mpz_sizeinbase(z.get_mpz_t(), 2);
}

inline std::uint64_t encoding_length(const Scalar& x) {
  return encoding_length_int(x.get_num()) + encoding_length_int(x.get_den());
}

inline std::uint64_t encoding_length(std::span<const Scalar> xs) {
  std::uint64_t total = 0;
  for (const auto& x : xs) total += encoding_length(x);
  return total;
}

inline std::uint64_t encoding_length(const std::vector<Vec>& rows) {
  std::uint64_t total = 0;
  for (const auto& r : rows) total += encoding_length(std::span<const Scalar>(r));
  return total;
}

inline Integer floor_of(const Scalar& x) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

inline Integer ceil_of(const Scalar& x) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

// Nearest integer, exact halves go to the even neighbour.
inline Integer round_half_even(const Scalar& x) {
  Integer f = floor_of(x);
  Scalar frac = x - Scalar(f);
  const int c = cmp(frac, Scalar(1, 2));
  if (c < 0) return f;
  if (c > 0) return f + 1;
  return mpz_even_p(f.get_mpz_t()) ? f : Integer(f + 1);
}

inline Scalar dot(std::span<const Scalar> a, std::span<const Scalar> b) {
  Scalar s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Scalar norm_sq(std::span<const Scalar> a) { return dot(a, a); }

inline Vec add(std::span<const Scalar> a, std::span<const Scalar> b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(std::span<const Scalar> a, std::span<const Scalar> b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scale(const Scalar& s, std::span<const Scalar> a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline Vec zeros(std::size_t n) { return Vec(n, Scalar(0)); }

inline std::vector<double> to_doubles(std::span<const Scalar> a) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i].get_d();
  return r;
}

// Doubles are dyadic rationals, so this conversion is exact.
inline Vec from_doubles(std::span<const double> a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = Scalar(a[i]);
  return r;
}

inline Integer lcm_of_denominators(std::span<const Scalar> xs, Integer acc = 1) {
  for (const auto& x : xs) mpz_lcm(acc.get_mpz_t(), acc.get_mpz_t(), x.get_den_mpz_t());
  return acc;
}

// Rank of a list of vectors by exact Gaussian elimination.
inline std::size_t rank_of(const std::vector<Vec>& vectors) {
  std::vector<Vec> m = vectors;
  if (m.empty()) return 0;
  const std::size_t cols = m[0].size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < m.size() && m[pivot][c] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t r = rank + 1; r < m.size(); ++r) {
      if (m[r][c] == 0) continue;
      Scalar f = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

}  // namespace vorcvp
