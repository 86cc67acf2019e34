#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tuniv/common.hpp"
#include "tuniv/interval.hpp"

namespace tuniv {

// ---------------------------------------------------------------------------
// Curve specifications
// ---------------------------------------------------------------------------

enum class CurveKind { Radius, LogSpiral, SingleSpiral, Polyline };

/// One parametrized curve t -> z(t) on a real domain interval.
///   Radius:       z(t) = t * e^{i*phi}
///   LogSpiral:    z(t) = e^{(1+i*alpha) t}
///   SingleSpiral: z(t) = (1 - e^{-t}) e^{i t}
///   Polyline:     piecewise-linear interpolation of (knot, point) pairs
struct CurveSpec {
  CurveKind kind = CurveKind::Radius;
  double param = 0.0;  // phi for Radius, alpha for LogSpiral
  std::vector<double> knots;
  std::vector<cplx> points;
  Interval domain = Interval::closed_open(0.0, 1.0);

  static CurveSpec radius(double phi, Interval dom = Interval::closed_open(0.0, 1.0)) {
    CurveSpec c;
    c.kind = CurveKind::Radius;
    c.param = phi;
    c.domain = dom;
    return c;
  }

  static CurveSpec log_spiral(double alpha,
                              Interval dom = Interval::make(
                                  -std::numeric_limits<double>::infinity(), 0.0, false, false)) {
    CurveSpec c;
    c.kind = CurveKind::LogSpiral;
    c.param = alpha;
    c.domain = dom;
    return c;
  }

  static CurveSpec single_spiral() {
    CurveSpec c;
    c.kind = CurveKind::SingleSpiral;
    c.domain = Interval::make(0.0, std::numeric_limits<double>::infinity(), false, false);
    return c;
  }

  static CurveSpec polyline(std::vector<double> ts, std::vector<cplx> zs) {
    if (ts.size() != zs.size() || ts.size() < 2)
      throw std::invalid_argument("CurveSpec::polyline: need >= 2 matching knots/points");
    for (std::size_t i = 1; i < ts.size(); ++i)
      if (!(ts[i] > ts[i - 1]))
        throw std::invalid_argument("CurveSpec::polyline: knots must strictly increase");
    CurveSpec c;
    c.kind = CurveKind::Polyline;
    c.domain = Interval::closed(ts.front(), ts.back());
    c.knots = std::move(ts);
    c.points = std::move(zs);
    return c;
  }

  cplx eval(double t) const {
    switch (kind) {
      case CurveKind::Radius:
        return cplx(t * std::cos(param), t * std::sin(param));
      case CurveKind::LogSpiral: {
        const double r = std::exp(t);
        return cplx(r * std::cos(param * t), r * std::sin(param * t));
      }
      case CurveKind::SingleSpiral: {
        const double r = 1.0 - std::exp(-t);
        return cplx(r * std::cos(t), r * std::sin(t));
      }
      case CurveKind::Polyline: {
        auto it = std::upper_bound(knots.begin(), knots.end(), t);
        std::size_t i = (it == knots.begin()) ? 1 : std::size_t(it - knots.begin());
        if (i >= knots.size()) i = knots.size() - 1;
        const double t0 = knots[i - 1], t1 = knots[i];
        const double w = (t - t0) / (t1 - t0);
        return points[i - 1] + w * (points[i] - points[i - 1]);
      }
    }
    return cplx(0.0, 0.0);
  }
};

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

enum class FamilyFlavor { UnitDisc, ZeroToInfinity };

/// Boundary coverage of a unit-disc family: every boundary point is a curve
/// endpoint (Full), endpoints exist but do not cover the circle (Partial),
/// or curves have no endpoint and instead accumulate on the circle
/// (Accumulating).
enum class Coverage { Full, Partial, Accumulating };

/// Family of curves alpha -> z_alpha sharing one curve interval I. The base
/// point is the common limit of z_alpha(t) as t tends to inf(I): a point of
/// the unit disc for unit-disc families and 0 for zero-to-infinity ones.
struct CurveFamily {
  std::string name;  // "radii", "log_spirals", "single_spiral", "rays", "custom"
  FamilyFlavor flavor = FamilyFlavor::UnitDisc;
  Coverage coverage = Coverage::Full;
  Interval param_interval = Interval::closed_open(0.0, 2.0 * pi);
  Interval curve_interval = Interval::closed_open(0.0, 1.0);
  cplx base_point = cplx(0.0, 0.0);
  std::function<CurveSpec(double)> generator;

  CurveSpec curve(double alpha) const {
    if (!param_interval.contains(alpha))
      throw std::domain_error("CurveFamily: parameter outside J");
    return generator(alpha);
  }
};

/// The family of all radii of the unit disc.
inline CurveFamily radii_family() {
  CurveFamily f;
  f.name = "radii";
  f.flavor = FamilyFlavor::UnitDisc;
  f.coverage = Coverage::Full;
  f.param_interval = Interval::closed_open(0.0, 2.0 * pi);
  f.curve_interval = Interval::closed_open(0.0, 1.0);
  f.generator = [](double a) { return CurveSpec::radius(a); };
  return f;
}

/// Logarithmic spirals e^{(1+i*alpha)t} restricted to the disc (t < 0).
/// Every member approaches the boundary point 1, so the family covers only
/// part of the circle.
inline CurveFamily log_spiral_family() {
  CurveFamily f;
  f.name = "log_spirals";
  f.flavor = FamilyFlavor::UnitDisc;
  f.coverage = Coverage::Partial;
  f.param_interval = Interval::real_line();
  f.curve_interval =
      Interval::make(-std::numeric_limits<double>::infinity(), 0.0, false, false);
  f.generator = [](double a) { return CurveSpec::log_spiral(a); };
  return f;
}

/// Single-curve family holding the spiral (1-e^{-t}) e^{it}, which has no
/// boundary limit point and instead accumulates on the whole circle.
inline CurveFamily single_spiral_family() {
  CurveFamily f;
  f.name = "single_spiral";
  f.flavor = FamilyFlavor::UnitDisc;
  f.coverage = Coverage::Accumulating;
  f.param_interval = Interval::singleton(0.0);
  f.curve_interval = Interval::make(0.0, std::numeric_limits<double>::infinity(), false, false);
  f.generator = [](double) { return CurveSpec::single_spiral(); };
  return f;
}

/// Rays t*e^{i*alpha}, t in (0, inf): the basic zero-to-infinity family.
inline CurveFamily ray_family() {
  CurveFamily f;
  f.name = "rays";
  f.flavor = FamilyFlavor::ZeroToInfinity;
  f.coverage = Coverage::Full;
  f.param_interval = Interval::closed_open(0.0, 2.0 * pi);
  f.curve_interval = Interval::make(0.0, std::numeric_limits<double>::infinity(), false, false);
  f.generator = [](double a) {
    return CurveSpec::radius(a, Interval::make(0.0, std::numeric_limits<double>::infinity(),
                                               false, false));
  };
  return f;
}

inline CurveFamily family_by_name(const std::string& name) {
  if (name == "radii") return radii_family();
  if (name == "log_spirals") return log_spiral_family();
  if (name == "single_spiral") return single_spiral_family();
  if (name == "rays") return ray_family();
  throw std::invalid_argument("unknown curve family: " + name);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

inline cplx eval_curve(const CurveFamily& family, double alpha, double t) {
  if (!family.param_interval.contains(alpha))
    throw std::domain_error("eval_curve: parameter outside J");
  if (!family.curve_interval.contains(t))
    throw std::domain_error("eval_curve: t outside I");
  return family.generator(alpha).eval(t);
}

/// z_alpha(sigma_I(u)) for u in (0,1): position along the curve by relative
/// arc parameter, independent of how I is laid out on the real line.
inline cplx curve_point(const CurveFamily& family, double alpha, double u) {
  if (!family.param_interval.contains(alpha))
    throw std::domain_error("curve_point: parameter outside J");
  return family.generator(alpha).eval(family.curve_interval.from_unit(u));
}

struct EndpointResult {
  bool accumulating = false;
  cplx value = cplx(0.0, 0.0);
};

/// Numerical limit of z_alpha(t) as t -> sup(I), normalized to the unit
/// circle. Families flagged Accumulating have no endpoint by construction.
inline EndpointResult endpoint(const CurveFamily& family, double alpha, double tol = 1e-9,
                               int max_iter = 64) {
  if (family.coverage == Coverage::Accumulating) return EndpointResult{true, cplx()};
  if (!family.param_interval.contains(alpha))
    throw std::domain_error("endpoint: parameter outside J");
  const CurveSpec c = family.generator(alpha);
  cplx prev = c.eval(c.domain.from_unit(0.5));
  for (int k = 1; k <= max_iter; ++k) {
    const double u = 1.0 - std::ldexp(1.0, -k - 1);
    if (!(u < 1.0)) break;  // double precision exhausted short of sup(I)
    const cplx z = c.eval(c.domain.from_unit(u));
    if (std::abs(z - prev) < tol) {
      const double r = std::abs(z);
      if (r == 0.0) break;
      return EndpointResult{false, z / r};
    }
    prev = z;
  }
  throw certification_error("endpoint: no convergence (curve may accumulate)");
}

// ---------------------------------------------------------------------------
// Sampled curves and the r-distance
// ---------------------------------------------------------------------------

/// Discretization of a curve on a strictly increasing parameter grid.
struct SampledCurve {
  std::vector<double> params;
  std::vector<cplx> points;
};

inline SampledCurve sample_curve(const CurveSpec& spec, const std::vector<double>& params) {
  SampledCurve s;
  s.params = params;
  s.points.reserve(params.size());
  for (double t : params) s.points.push_back(spec.eval(t));
  return s;
}

/// n interior parameters of the interval, u_i = (i + 1/2)/n through sigma_I.
inline std::vector<double> interior_params(const Interval& iv, int n) {
  std::vector<double> ts;
  ts.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) ts.push_back(iv.from_unit((i + 0.5) / n));
  return ts;
}

inline std::vector<double> linear_params(double a, double b, int n) {
  std::vector<double> ts;
  ts.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) ts.push_back(a + (b - a) * i / (n - 1));
  return ts;
}

inline void require_common_grid(const SampledCurve& c1, const SampledCurve& c2) {
  if (c1.params != c2.params)
    throw std::invalid_argument("r_distance: curves sampled on different grids");
  if (c1.params.empty()) throw std::invalid_argument("r_distance: empty grid");
}

/// max_i |z1(t_i) - z2(t_i)| over a common parameter grid.
inline double r_distance(const SampledCurve& c1, const SampledCurve& c2) {
  require_common_grid(c1, c2);
  double m = 0.0;
  for (std::size_t i = 0; i < c1.points.size(); ++i)
    m = std::max(m, std::abs(c1.points[i] - c2.points[i]));
  return m;
}

/// Same maximum restricted to grid indices where either curve point has
/// modulus <= j. An empty index set gives 0, keeping the value monotone in j.
inline double truncated_r_distance(const SampledCurve& c1, const SampledCurve& c2,
                                   unsigned j) {
  require_common_grid(c1, c2);
  double m = 0.0;
  for (std::size_t i = 0; i < c1.points.size(); ++i) {
    if (std::abs(c1.points[i]) <= double(j) || std::abs(c2.points[i]) <= double(j))
      m = std::max(m, std::abs(c1.points[i] - c2.points[i]));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Continuity certification
// ---------------------------------------------------------------------------

/// A member of the countable subfamily J~ = (J intersect Q) union {endpoints
/// of J belonging to J}. Witnesses found by search are dyadic rationals
/// num/2^k; interval endpoints are carried as plain values (they need not be
/// rational themselves, but they belong to J~ by definition).
struct SubfamilyMember {
  double value = 0.0;
  bool is_endpoint = false;
  std::int64_t num = 0;
  std::int64_t den = 1;  // power of two when !is_endpoint
};

struct ContinuityOptions {
  int n_samples = 512;   // parameter grid size for r-distance measurement
  int max_depth = 32;    // dyadic search depth bound
};

namespace detail {

inline double family_distance(const CurveFamily& family, const SampledCurve& base,
                              double alpha_tilde, const std::vector<double>& grid,
                              unsigned j) {
  const SampledCurve other = sample_curve(family.generator(alpha_tilde), grid);
  return family.flavor == FamilyFlavor::UnitDisc ? r_distance(base, other)
                                                 : truncated_r_distance(base, other, j);
}

}  // namespace detail

/// Searches dyadic rationals around alpha with shrinking radius for a member
/// of J~ whose curve is r-close (truncated r-distance for zero-to-infinity
/// families) to z_alpha. Returns nothing when the depth budget is exhausted.
inline std::optional<SubfamilyMember> find_subfamily_member(
    const CurveFamily& family, double alpha, double delta, unsigned j,
    const ContinuityOptions& opt = {}) {
  if (!(delta > 0.0)) throw std::invalid_argument("find_subfamily_member: delta <= 0");
  const Interval& J = family.param_interval;
  if (!J.contains(alpha)) throw std::domain_error("find_subfamily_member: alpha outside J");

  // Interval endpoints belonging to J are members of J~; if alpha is one of
  // them it is its own witness.
  if (J.is_singleton() || (alpha == J.lo && J.lo_closed) || (alpha == J.hi && J.hi_closed)) {
    SubfamilyMember m;
    m.value = alpha;
    m.is_endpoint = true;
    return m;
  }

  const std::vector<double> grid = interior_params(family.curve_interval, opt.n_samples);
  const SampledCurve base = sample_curve(family.generator(alpha), grid);

  for (int depth = 0; depth <= opt.max_depth; ++depth) {
    const double sc = std::ldexp(1.0, depth);
    const double k0 = std::round(alpha * sc);
    for (double k : {k0, k0 - 1.0, k0 + 1.0}) {
      if (std::abs(k) >= 9.007199254740992e15) continue;  // 2^53: exactness bound
      const double cand = k / sc;
      if (!J.contains(cand)) continue;
      if (detail::family_distance(family, base, cand, grid, j) < delta) {
        SubfamilyMember m;
        m.value = cand;
        m.num = std::int64_t(k);
        m.den = std::int64_t(sc);
        while (m.den > 1 && m.num % 2 == 0) {
          m.num /= 2;
          m.den /= 2;
        }
        return m;
      }
    }
  }
  return std::nullopt;
}

/// Same search, but certification failure is an error.
inline SubfamilyMember nearest_subfamily_member(const CurveFamily& family, double alpha,
                                                double delta, unsigned j,
                                                const ContinuityOptions& opt = {}) {
  auto m = find_subfamily_member(family, alpha, delta, j, opt);
  if (!m)
    throw certification_error("nearest_subfamily_member: search exhausted at depth " +
                              std::to_string(opt.max_depth));
  return *m;
}

struct ContinuityEntry {
  double alpha = 0.0;
  bool ok = false;
  SubfamilyMember witness;
};

struct ContinuityReport {
  double delta = 0.0;
  unsigned j = 0;
  bool pass = false;
  std::vector<ContinuityEntry> entries;
};

/// Empirical continuity certificate: for every alpha in the grid, locate a
/// J~-member within delta in the family's r-metric.
inline ContinuityReport certify_continuous(const CurveFamily& family, double delta, unsigned j,
                                           const std::vector<double>& alpha_grid,
                                           const ContinuityOptions& opt = {}) {
  ContinuityReport rep;
  rep.delta = delta;
  rep.j = j;
  rep.pass = true;
  rep.entries.reserve(alpha_grid.size());
  for (double a : alpha_grid) {
    ContinuityEntry e;
    e.alpha = a;
    auto m = find_subfamily_member(family, a, delta, j, opt);
    if (m) {
      e.ok = true;
      e.witness = *m;
    } else {
      e.ok = false;
      rep.pass = false;
    }
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace tuniv
