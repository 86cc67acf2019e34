#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tuniv/common.hpp"
#include "tuniv/curves.hpp"
#include "tuniv/rational.hpp"

namespace tuniv {

// ---------------------------------------------------------------------------
// Dyadic sequence d_k and derived boundary points
// ---------------------------------------------------------------------------

/// d_k = (2b+1)/2^{a+1} where k = 2^a + b, 0 <= b < 2^a. Enumerates every
/// dyadic rational in (0,1) exactly once, by increasing depth.
inline Rational scale_fraction(std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("scale: index must be >= 1");
  int a = 63;
  while (!(k >> a & 1u)) --a;
  const std::uint64_t b = k - (std::uint64_t(1) << a);
  if (a + 1 > 52) throw std::invalid_argument("scale: depth exceeds exact double range");
  Rational r;
  r.num = std::int64_t(2 * b + 1);
  r.den = std::int64_t(1) << (a + 1);
  return r;
}

inline double scale(std::uint64_t k) {
  const Rational r = scale_fraction(k);
  return double(r.num) / double(r.den);  // exact: dyadic with depth <= 52
}

/// Turn fraction of the p-th boundary point: 0 for p = 1, d_{p-1} otherwise.
inline Rational boundary_turn(std::uint64_t p) {
  if (p < 1) throw std::invalid_argument("boundary_point: index must be >= 1");
  if (p == 1) return Rational(0);
  return scale_fraction(p - 1);
}

/// zeta_p = e^{2 pi i turn}: a dense sequence on the unit circle.
inline cplx boundary_point(std::uint64_t p) {
  const Rational turn = boundary_turn(p);
  if (turn.is_zero()) return cplx(1.0, 0.0);
  const double theta = 2.0 * pi * turn.value();
  return cplx(std::cos(theta), std::sin(theta));
}

// ---------------------------------------------------------------------------
// Cantor pairing on naturals >= 1
// ---------------------------------------------------------------------------

inline bigint cantor_pair(const bigint& x, const bigint& y) {
  if (x < 1 || y < 1) throw std::invalid_argument("cantor_pair: arguments must be >= 1");
  const bigint s = x + y;
  return (s - 2) * (s - 1) / 2 + x;
}

inline std::pair<bigint, bigint> cantor_unpair(const bigint& z) {
  if (z < 1) throw std::invalid_argument("cantor_unpair: argument must be >= 1");
  // Find s = x + y with (s-2)(s-1)/2 < z <= (s-2)(s-1)/2 + (s-1).
  bigint s = boost::multiprecision::sqrt(bigint(2 * z)) + 1;
  while ((s - 2) * (s - 1) / 2 >= z) --s;
  while ((s - 1) * s / 2 < z) ++s;
  const bigint x = z - (s - 2) * (s - 1) / 2;
  return {x, s - x};
}

// ---------------------------------------------------------------------------
// Polynomials with Gaussian-rational coefficients and their enumeration
// ---------------------------------------------------------------------------

/// Exact polynomial over Q + iQ, coefficients low to high. Empty list is the
/// zero polynomial; otherwise the leading coefficient is nonzero.
struct GaussPoly {
  std::vector<std::pair<Rational, Rational>> coeffs;

  bool is_zero() const { return coeffs.empty(); }
  int degree() const { return is_zero() ? -1 : int(coeffs.size()) - 1; }

  void normalize() {
    while (!coeffs.empty() && coeffs.back().first.is_zero() && coeffs.back().second.is_zero())
      coeffs.pop_back();
  }

  static GaussPoly constant(Rational re, Rational im = Rational(0)) {
    GaussPoly g;
    g.coeffs.push_back({re, im});
    g.normalize();
    return g;
  }

  std::vector<cplx> to_complex() const {
    std::vector<cplx> c;
    c.reserve(coeffs.size());
    for (const auto& [re, im] : coeffs) c.push_back(cplx(re.value(), im.value()));
    return c;
  }
};

namespace detail {

inline bigint gauss_code(const Rational& re, const Rational& im) {
  return cantor_pair(rational_index(re), rational_index(im));
}

inline std::pair<Rational, Rational> gauss_value(const bigint& code) {
  auto [ir, ii] = cantor_unpair(code);
  return {rational_value(ir), rational_value(ii)};
}

}  // namespace detail

/// Index -> polynomial decoder: 1 is the zero polynomial; larger indices
/// decode degree and coefficients through iterated Cantor pairing, with the
/// leading coefficient drawn from the nonzero Gaussian rationals.
inline GaussPoly poly(const bigint& j) {
  if (j < 1) throw std::invalid_argument("poly: index must be >= 1");
  GaussPoly g;
  if (j == 1) return g;
  const bigint e = j - 1;
  auto [d1, payload] = cantor_unpair(e);
  const std::int64_t d = d1.convert_to<std::int64_t>() - 1;  // degree
  bigint lead_code, rest;
  if (d == 0) {
    lead_code = payload + 1;
  } else {
    auto [u, r] = cantor_unpair(payload);
    lead_code = u + 1;
    rest = r;
  }
  std::vector<std::pair<Rational, Rational>> low(static_cast<std::size_t>(d));
  for (std::int64_t i = d - 1; i >= 1; --i) {
    auto [gi, r2] = cantor_unpair(rest);
    low[std::size_t(i)] = detail::gauss_value(gi);
    rest = r2;
  }
  if (d >= 1) low[0] = detail::gauss_value(rest);
  g.coeffs = std::move(low);
  g.coeffs.push_back(detail::gauss_value(lead_code));
  g.normalize();
  return g;
}

/// Inverse of poly(): unique index of an exact Gaussian-rational polynomial.
inline bigint poly_index(const GaussPoly& q) {
  if (q.is_zero()) return 1;
  const auto& cs = q.coeffs;
  const std::size_t d = cs.size() - 1;
  const bigint lead_code = detail::gauss_code(cs[d].first, cs[d].second);
  if (lead_code == 1) throw std::invalid_argument("poly_index: leading coefficient is zero");
  bigint payload;
  if (d == 0) {
    payload = lead_code - 1;
  } else {
    bigint rest = detail::gauss_code(cs[0].first, cs[0].second);
    for (std::size_t i = 1; i < d; ++i)
      rest = cantor_pair(detail::gauss_code(cs[i].first, cs[i].second), rest);
    payload = cantor_pair(lead_code - 1, rest);
  }
  return cantor_pair(bigint(d + 1), payload) + 1;
}

// ---------------------------------------------------------------------------
// Diagonal schedule over 6-tuples (m, j, p, s, t, l)
// ---------------------------------------------------------------------------

namespace detail {

inline bigint binom(std::uint64_t n, unsigned k) {
  if (k > n) return 0;
  bigint r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= bigint(n - i);
    r /= bigint(i + 1);
  }
  return r;
}

}  // namespace detail

/// i-th tuple of the exhaustive schedule: 6-tuples of naturals ordered by
/// coordinate sum, then lexicographically.
inline std::array<std::uint64_t, 6> tuple_at(const bigint& i) {
  if (i < 1) throw std::invalid_argument("tuple_at: index must be >= 1");
  bigint rem = i - 1;
  std::uint64_t sum = 6;
  while (true) {
    const bigint block = detail::binom(sum - 1, 5);
    if (rem < block) break;
    rem -= block;
    ++sum;
  }
  std::array<std::uint64_t, 6> out{};
  std::uint64_t left = sum;
  for (unsigned pos = 0; pos < 5; ++pos) {
    const unsigned parts_after = 5 - pos;
    for (std::uint64_t v = 1;; ++v) {
      const bigint cnt = detail::binom(left - v - 1, parts_after - 1);
      if (rem < cnt) {
        out[pos] = v;
        left -= v;
        break;
      }
      rem -= cnt;
    }
  }
  out[5] = left;
  return out;
}

inline bigint tuple_index(const std::array<std::uint64_t, 6>& t) {
  std::uint64_t sum = 0;
  for (auto v : t) {
    if (v < 1) throw std::invalid_argument("tuple_index: components must be >= 1");
    sum += v;
  }
  bigint idx = 0;
  for (std::uint64_t s = 6; s < sum; ++s) idx += detail::binom(s - 1, 5);
  std::uint64_t left = sum;
  for (unsigned pos = 0; pos < 5; ++pos) {
    const unsigned parts_after = 5 - pos;
    for (std::uint64_t v = 1; v < t[pos]; ++v)
      idx += detail::binom(left - v - 1, parts_after - 1);
    left -= t[pos];
  }
  return idx + 1;
}

// ---------------------------------------------------------------------------
// Canonical subfamily curves C_{pl} and anchors b_{nlp}
// ---------------------------------------------------------------------------

struct SubfamilyOptions {
  int max_depth = 36;                     // dyadic depth bound inside J
  std::uint64_t max_candidates = 200000;  // exact endpoint tests per query
  int base_grid = 4096;                   // endpoint-proxy grid floor
  double endpoint_tol = 1e-10;
};

struct SubfamilyCurve {
  CurveSpec spec;
  double alpha = 0.0;
  bool exact = true;  // l-th qualifying member found (false: nearest fallback)
};

namespace detail {

// Cheap endpoint proxy: curve point at u = 1 - 2^-16, radially projected to
// the circle. Used only to locate candidate parameter windows; every
// candidate is confirmed with the real endpoint() iteration.
inline cplx endpoint_proxy(const CurveSpec& c) {
  const cplx z = c.eval(c.domain.from_unit(1.0 - std::ldexp(1.0, -16)));
  const double r = std::abs(z);
  return r > 0.0 ? z / r : z;
}

struct JTildeScan {
  // Candidate parameter windows where the endpoint may be close to zeta.
  std::vector<std::pair<double, double>> windows;
  bool unbounded = false;
};

inline JTildeScan locate_windows(const CurveFamily& family, cplx zeta, double rho,
                                 std::uint64_t l, const SubfamilyOptions& opt) {
  JTildeScan scan;
  const Interval& J = family.param_interval;
  if (!J.bounded()) {
    scan.unbounded = true;
    return scan;
  }
  const std::int64_t g =
      std::min<std::int64_t>(std::max<std::int64_t>(opt.base_grid, 64 * std::int64_t(l)),
                             std::int64_t(1) << 22);
  const double span = J.hi - J.lo;
  const double cell = span / double(g);
  std::int64_t run_start = -1;
  for (std::int64_t i = 0; i < g; ++i) {
    const double a = J.lo + (double(i) + 0.5) * cell;
    const bool ok = std::abs(endpoint_proxy(family.generator(a)) - zeta) < 1.75 * rho;
    if (ok && run_start < 0) run_start = i;
    if ((!ok || i == g - 1) && run_start >= 0) {
      const double wlo = J.lo + double(run_start - 2) * cell;
      const double whi = J.lo + double((ok ? i : i - 1) + 3) * cell;
      if (!scan.windows.empty() && wlo <= scan.windows.back().second)
        scan.windows.back().second = whi;
      else
        scan.windows.push_back({wlo, whi});
      run_start = -1;
    }
  }
  return scan;
}

}  // namespace detail

/// C_{pl}: the l-th member of the canonical enumeration of J~ whose endpoint
/// lies within 1/l of zeta_p; when fewer than l such members exist inside the
/// search budget, the scanned member with endpoint nearest zeta_p.
/// Accumulating families return their single curve.
///
/// Canonical order of J~: interval endpoints belonging to J first (lo, then
/// hi); then dyadic rationals by increasing depth and, within a depth,
/// increasing value. For unbounded J the dyadics n/2^a (reduced) are ordered
/// by a + |n| instead, so every prefix is finite.
inline SubfamilyCurve subfamily_curve(const CurveFamily& family, std::uint64_t p,
                                      std::uint64_t l, const SubfamilyOptions& opt = {}) {
  if (p < 1 || l < 1) throw std::invalid_argument("subfamily_curve: indices must be >= 1");
  if (family.coverage == Coverage::Accumulating) {
    SubfamilyCurve out;
    out.alpha = family.param_interval.lo;
    out.spec = family.generator(out.alpha);
    return out;
  }

  const cplx zeta = boundary_point(p);
  const double rho = 1.0 / double(l);
  const Interval& J = family.param_interval;

  std::uint64_t found = 0;
  std::uint64_t tested = 0;
  bool have_best = false;
  double best_alpha = 0.0;
  double best_dist = 0.0;

  auto consider = [&](double alpha) -> std::optional<double> {
    ++tested;
    EndpointResult e = endpoint(family, alpha, opt.endpoint_tol);
    const double dist = std::abs(e.value - zeta);
    if (!have_best || dist < best_dist) {
      have_best = true;
      best_dist = dist;
      best_alpha = alpha;
    }
    if (dist < rho) {
      ++found;
      if (found == l) return alpha;
    }
    return std::nullopt;
  };

  // Interval endpoints in J come first in the canonical order.
  std::vector<double> d_members;
  if (J.lo_closed) d_members.push_back(J.lo);
  if (J.hi_closed && !J.is_singleton()) d_members.push_back(J.hi);
  for (double a : d_members)
    if (auto hit = consider(a)) return SubfamilyCurve{family.generator(*hit), *hit, true};

  auto is_d_member = [&](double v) {
    for (double a : d_members)
      if (v == a) return true;
    return false;
  };

  if (J.bounded() && !J.is_singleton()) {
    const auto scan = detail::locate_windows(family, zeta, rho, l, opt);
    for (int depth = 0; depth <= opt.max_depth && tested < opt.max_candidates; ++depth) {
      const double sc = std::ldexp(1.0, depth);
      for (const auto& [wlo, whi] : scan.windows) {
        const double clo = std::max(wlo, J.lo), chi = std::min(whi, J.hi);
        std::int64_t n0 = std::int64_t(std::ceil(clo * sc));
        std::int64_t n1 = std::int64_t(std::floor(chi * sc));
        for (std::int64_t n = n0; n <= n1 && tested < opt.max_candidates; ++n) {
          if (depth > 0 && n % 2 == 0) continue;  // already listed at lower depth
          const double cand = double(n) / sc;
          if (!J.contains(cand) || is_d_member(cand)) continue;
          if (auto hit = consider(cand))
            return SubfamilyCurve{family.generator(*hit), *hit, true};
        }
      }
    }
    // Nearest-endpoint fallback: refine dyadically toward the proxy argmin.
    double target = best_alpha;
    {
      const int g = opt.base_grid;
      double best_proxy = 1e300;
      for (int i = 0; i < g; ++i) {
        const double a = J.lo + (double(i) + 0.5) * (J.hi - J.lo) / double(g);
        const double d = std::abs(detail::endpoint_proxy(family.generator(a)) - zeta);
        if (d < best_proxy) {
          best_proxy = d;
          target = a;
        }
      }
    }
    for (int depth = 0; depth <= opt.max_depth; ++depth) {
      const double sc = std::ldexp(1.0, depth);
      const double cand = std::round(target * sc) / sc;
      if (!J.contains(cand) || is_d_member(cand)) continue;
      if (auto hit = consider(cand)) return SubfamilyCurve{family.generator(*hit), *hit, true};
    }
  } else if (!J.is_singleton()) {
    // Unbounded J: diagonal order over reduced dyadics n / 2^a by a + |n|.
    for (std::uint64_t s = 0; tested < opt.max_candidates; ++s) {
      bool any_in_j = s == 0;
      for (std::uint64_t a = 0; a <= s; ++a) {
        const std::int64_t mag = std::int64_t(s - a);
        if (a > 0 && (mag % 2 == 0 || mag == 0)) continue;
        const double sc = std::ldexp(1.0, int(a));
        for (const std::int64_t n : {-mag, mag}) {
          if (n == 0 && mag != 0) continue;
          const double cand = double(n) / sc;
          if (!J.contains(cand) || is_d_member(cand)) continue;
          any_in_j = true;
          if (auto hit = consider(cand))
            return SubfamilyCurve{family.generator(*hit), *hit, true};
          if (mag == 0) break;  // 0 only once
        }
      }
      if (!any_in_j && s > 128) break;  // numerators left J for good
    }
  }

  if (!have_best)
    throw certification_error("subfamily_curve: no J~ member reachable for p=" +
                              std::to_string(p) + " l=" + std::to_string(l));
  SubfamilyCurve out;
  out.alpha = best_alpha;
  out.spec = family.generator(best_alpha);
  out.exact = false;
  return out;
}

/// b_{nlp}: the n-th canonical dense point of C_{pl}. Accumulating curves use
/// the n-th tail pass nearest zeta_p instead (t = arg zeta_p + 2 pi n).
inline cplx curve_anchor(const CurveFamily& family, std::uint64_t p, std::uint64_t l,
                         std::uint64_t n, const SubfamilyOptions& opt = {}) {
  if (n < 1) throw std::invalid_argument("curve_anchor: n must be >= 1");
  if (family.coverage == Coverage::Accumulating) {
    const cplx zeta = boundary_point(p);
    double theta = std::atan2(zeta.imag(), zeta.real());
    if (theta < 0.0) theta += 2.0 * pi;
    const CurveSpec c = family.generator(family.param_interval.lo);
    return c.eval(theta + 2.0 * pi * double(n));
  }
  const SubfamilyCurve c = subfamily_curve(family, p, l, opt);
  return c.spec.eval(c.spec.domain.from_unit(scale(n)));
}

/// Memoizing wrapper: C_{pl} lookups repeat heavily during builds and
/// verification.
class SubfamilyCache {
 public:
  SubfamilyCache(const CurveFamily& family, SubfamilyOptions opt = {})
      : family_(family), opt_(opt) {}

  const SubfamilyCurve& curve(std::uint64_t p, std::uint64_t l) {
    const auto key = std::make_pair(p, l);
    auto it = memo_.find(key);
    if (it == memo_.end())
      it = memo_.emplace(key, subfamily_curve(family_, p, l, opt_)).first;
    return it->second;
  }

  cplx anchor(std::uint64_t p, std::uint64_t l, std::uint64_t n) {
    if (family_.coverage == Coverage::Accumulating)
      return curve_anchor(family_, p, l, n, opt_);
    const SubfamilyCurve& c = curve(p, l);
    return c.spec.eval(c.spec.domain.from_unit(scale(n)));
  }

  const CurveFamily& family() const { return family_; }
  const SubfamilyOptions& options() const { return opt_; }

 private:
  CurveFamily family_;
  SubfamilyOptions opt_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, SubfamilyCurve> memo_;
};

}  // namespace tuniv
