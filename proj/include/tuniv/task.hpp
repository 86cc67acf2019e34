#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tuniv/curves.hpp"
#include "tuniv/enumeration.hpp"
#include "tuniv/polynomial.hpp"

namespace tuniv {

/// One universality goal: approximate the target on the window disk a L_m + b
/// to accuracy 1/s, with the anchor b on the prescribed curve and within 1/t
/// of the boundary point.
///
/// The target is either an index into the polynomial enumeration or explicit
/// monomial coefficients. The boundary point is either an index into the
/// boundary enumeration or an explicit unit-circle point. The curve is the
/// enumerated subfamily member C_{pl} (l fixed, or left to the builder),
/// or an explicit member z_alpha of the family.
struct Task {
  std::uint64_t m = 1;
  std::optional<bigint> target_index;
  std::optional<std::vector<cplx>> target_coeffs;
  std::uint64_t s = 1;
  std::optional<std::uint64_t> zeta_index;
  std::optional<cplx> zeta_point;
  std::optional<std::uint64_t> curve_l;
  std::optional<double> curve_alpha;
  std::uint64_t t = 1;

  void validate(const CurveFamily& family) const {
    if (m < 1 || s < 1 || t < 1) throw std::invalid_argument("Task: m, s, t must be >= 1");
    if (target_index.has_value() == target_coeffs.has_value())
      throw std::invalid_argument("Task: exactly one of target index / coefficients");
    if (target_index && *target_index < 1)
      throw std::invalid_argument("Task: target index must be >= 1");
    if (zeta_index.has_value() == zeta_point.has_value())
      throw std::invalid_argument("Task: exactly one of zeta index / point");
    if (zeta_point && std::abs(std::abs(*zeta_point) - 1.0) > 1e-15)
      throw std::invalid_argument("Task: explicit zeta must lie on the unit circle");
    if (curve_l && curve_alpha)
      throw std::invalid_argument("Task: curve given both by indices and explicitly");
    if (curve_alpha && !family.param_interval.contains(*curve_alpha))
      throw std::domain_error("Task: curve parameter outside the family's J");
    // The enumerated-curve route needs an enumerated boundary point.
    if (!curve_alpha && !zeta_index && family.coverage != Coverage::Accumulating)
      throw std::invalid_argument("Task: explicit zeta requires an explicit curve");
  }

  cplx zeta() const { return zeta_point ? *zeta_point : boundary_point(*zeta_index); }

  Polynomial target() const {
    if (target_coeffs) return Polynomial::from_coeffs(*target_coeffs);
    return Polynomial::from_gauss(poly(*target_index));
  }
};

/// Anchor stream of a task: n -> candidate b. Resolution of the curve route
/// happens here so that the builder and the verifier walk identical anchors.
class AnchorStream {
 public:
  AnchorStream(SubfamilyCache& cache, const Task& task, std::uint64_t l_effective)
      : cache_(cache), task_(task), l_(l_effective) {}

  cplx operator()(std::uint64_t n) const {
    const CurveFamily& fam = cache_.family();
    if (fam.coverage == Coverage::Accumulating) {
      const cplx z = task_.zeta();
      double theta = std::atan2(z.imag(), z.real());
      if (theta < 0.0) theta += 2.0 * pi;
      const CurveSpec c = fam.generator(fam.param_interval.lo);
      return c.eval(theta + 2.0 * pi * double(n));
    }
    if (task_.curve_alpha) return curve_point(fam, *task_.curve_alpha, scale(n));
    return cache_.anchor(*task_.zeta_index, l_, n);
  }

  std::uint64_t l() const { return l_; }

 private:
  SubfamilyCache& cache_;
  const Task& task_;
  std::uint64_t l_;
};

}  // namespace tuniv
