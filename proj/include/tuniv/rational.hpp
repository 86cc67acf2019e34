#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tuniv {

using bigint = boost::multiprecision::cpp_int;

/// Exact rational with 64-bit components, reduced, denominator positive.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return double(num) / double(den); }
  bool is_zero() const { return num == 0; }
  Rational negated() const {
    Rational r;
    r.num = -num;
    r.den = den;
    return r;
  }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator!=(const Rational& o) const { return !(*this == o); }

  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

/// Breadth-first index of a positive rational in the Calkin-Wilf tree
/// (root 1/1 has index 1; node a/b has children a/(a+b) and (a+b)/b).
/// The binary expansion of the index, after its leading 1, spells the
/// root-to-node path: 0 = left, 1 = right.
inline bigint calkin_wilf_index(const Rational& r) {
  if (r.num <= 0) throw std::invalid_argument("calkin_wilf_index: needs a positive rational");
  std::int64_t a = r.num, b = r.den;
  // Walk up to the root with Euclid-sized strides, collecting path bits
  // bottom-up.
  std::string bits;
  while (!(a == 1 && b == 1)) {
    if (a > b) {
      std::int64_t q = (a - 1) / b;  // number of consecutive right-steps
      bits.append(std::size_t(q), '1');
      a -= q * b;
    } else {
      std::int64_t q = (b - 1) / a;
      bits.append(std::size_t(q), '0');
      b -= q * a;
    }
  }
  bigint n = 1;
  for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
    n <<= 1;
    if (*it == '1') n += 1;
  }
  return n;
}

inline Rational calkin_wilf_value(bigint n) {
  if (n < 1) throw std::invalid_argument("calkin_wilf_value: index must be >= 1");
  // Read the path bits top-down (most significant first, leading 1 skipped).
  unsigned bits = 0;
  for (bigint t = n; t > 1; t >>= 1) ++bits;
  std::int64_t a = 1, b = 1;
  for (int i = int(bits) - 1; i >= 0; --i) {
    const bool right = boost::multiprecision::bit_test(n, unsigned(i));
    if (right)
      a += b;
    else
      b += a;
    if (a < 0 || b < 0) throw std::overflow_error("calkin_wilf_value: rational overflow");
  }
  return Rational(a, b);
}

/// Signed enumeration of all rationals: r_1 = 0, r_{2n} = c_n, r_{2n+1} = -c_n
/// with c the Calkin-Wilf sequence.
inline Rational rational_value(const bigint& i) {
  if (i < 1) throw std::invalid_argument("rational_value: index must be >= 1");
  if (i == 1) return Rational(0);
  const bigint half = i / 2;
  Rational c = calkin_wilf_value(half);
  return (i % 2 == 0) ? c : c.negated();
}

inline bigint rational_index(const Rational& r) {
  if (r.is_zero()) return 1;
  if (r.num > 0) return 2 * calkin_wilf_index(r);
  return 2 * calkin_wilf_index(r.negated()) + 1;
}

}  // namespace tuniv
