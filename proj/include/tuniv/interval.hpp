#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tuniv/common.hpp"

namespace tuniv {

/// Real interval with possibly infinite endpoints. Infinite endpoints are
/// always open. A degenerate singleton [a,a] is allowed so that families
/// consisting of a single curve can carry a parameter interval.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = true;
  bool hi_closed = false;

  static Interval closed(double a, double b) { return make(a, b, true, true); }
  static Interval open(double a, double b) { return make(a, b, false, false); }
  static Interval closed_open(double a, double b) { return make(a, b, true, false); }
  static Interval open_closed(double a, double b) { return make(a, b, false, true); }
  static Interval singleton(double a) { return make(a, a, true, true); }
  static Interval real_line() {
    return make(-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(), false, false);
  }

  static Interval make(double a, double b, bool ac, bool bc) {
    if (std::isnan(a) || std::isnan(b)) throw std::invalid_argument("Interval: NaN endpoint");
    if (a > b) throw std::invalid_argument("Interval: lo > hi");
    if (a == b && !(ac && bc)) throw std::invalid_argument("Interval: empty interval");
    Interval iv;
    iv.lo = a;
    iv.hi = b;
    iv.lo_closed = ac && std::isfinite(a);
    iv.hi_closed = bc && std::isfinite(b);
    return iv;
  }

  bool lo_finite() const { return std::isfinite(lo); }
  bool hi_finite() const { return std::isfinite(hi); }
  bool bounded() const { return lo_finite() && hi_finite(); }
  bool is_singleton() const { return lo == hi; }

  bool contains(double t) const {
    if (t < lo || t > hi) return false;
    if (t == lo && !lo_closed) return false;
    if (t == hi && !hi_closed) return false;
    return true;
  }

  /// Monotone parameter map sigma : (0,1) -> interior of the interval.
  /// Affine for bounded intervals, logarithmic for half-infinite ones and
  /// tangent-based for the whole line.
  double from_unit(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("Interval::from_unit: u outside (0,1)");
    if (is_singleton()) return lo;
    if (bounded()) return lo + u * (hi - lo);
    if (lo_finite()) return lo - std::log1p(-u);     // (lo, +inf)
    if (hi_finite()) return hi + std::log(u);        // (-inf, hi)
    return std::tan(pi * (u - 0.5));                 // whole line
  }
};

}  // namespace tuniv
