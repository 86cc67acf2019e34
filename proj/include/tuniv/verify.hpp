#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tuniv/approx.hpp"
#include "tuniv/series.hpp"
#include "tuniv/task.hpp"

namespace tuniv {

/// Index tuple of the basic membership set: the window a_k L_m + b_{nlp} must
/// carry f to within 1/s of p_j, with the anchor within 1/t of zeta_p.
struct MembershipIndices {
  std::uint64_t m = 1;
  bigint j = 1;
  std::uint64_t p = 1;
  std::uint64_t s = 1;
  std::uint64_t t = 1;
  std::uint64_t l = 1;
  std::uint64_t k = 1;
  std::uint64_t n = 1;
};

struct MembershipResult {
  bool pass = false;
  bool window_in_disc = false;
  double error = 0.0;
  double margin = 0.0;
  double b_dist = 0.0;
  double a = 0.0;
  cplx b;
  cplx zeta;
  std::string reason;
};

/// A verified (or failed) certificate: the witness measured on the verifier's
/// own control grid, plus the margin 1/s - error.
struct Certificate {
  Witness witness;
  bool pass = false;
  double margin = 0.0;
  int n_control = 0;
  double phase = 0.0;
  std::string reason;
};

struct VerifyOptions {
  int n_control = 2048;
  // Offset from both the builder's fit grids (phase 0) and its control
  // grids (phase pi/n), so acceptance is never read off fitted points.
  double phase = pi / 6144.0;
  std::uint64_t k_max = 4096;
  std::uint64_t n_max = 1u << 16;
  int curve_samples = 4096;  // sampling density for curve-distance checks
  SubfamilyOptions subfamily;
};

/// Independent certification of universality windows against a fixed family.
class Verifier {
 public:
  Verifier(const CurveFamily& family, VerifyOptions opt = {})
      : opt_(opt), cache_(family, opt.subfamily) {}

  const VerifyOptions& options() const { return opt_; }
  const CurveFamily& family() const { return cache_.family(); }
  SubfamilyCache& cache() { return cache_; }

  /// Discrete sup of |f(a z + b) - target(z)| over the L_m boundary grid.
  double window_error(const EvalFn& f, const Polynomial& target, double a, cplx b,
                      std::uint64_t m) const {
    double err = 0.0;
    for (const cplx z :
         sample_disk_boundary(Disk{cplx(0, 0), double(m)}, opt_.n_control, opt_.phase))
      err = std::max(err, std::abs(f(a * z + b) - target.eval(z)));
    return err;
  }

  /// O_C membership predicate at explicitly given witness data.
  MembershipResult membership_at(const EvalFn& f, const Polynomial& target, std::uint64_t m,
                                 std::uint64_t s, std::uint64_t t, double a, cplx b,
                                 cplx zeta) const {
    MembershipResult r;
    r.a = a;
    r.b = b;
    r.zeta = zeta;
    r.b_dist = std::abs(b - zeta);
    if (!(a > 0.0 && a < 1.0)) {
      r.reason = "scale outside (0,1)";
      return r;
    }
    if (a * double(m) + std::abs(b) >= 1.0) {
      // Mirrors the class definition: otherwise f is not defined on the
      // window at all.
      r.reason = "window escapes the unit disc";
      return r;
    }
    r.window_in_disc = true;
    r.error = window_error(f, target, a, b, m);
    r.margin = 1.0 / double(s) - r.error;
    if (!(r.error < 1.0 / double(s))) {
      r.reason = "window error at least 1/s";
      return r;
    }
    if (!(r.b_dist < 1.0 / double(t))) {
      r.reason = "anchor not within 1/t of zeta";
      return r;
    }
    r.pass = true;
    return r;
  }

  /// Membership from raw indices: a = a_k, b = b_{nlp}, target = p_j.
  MembershipResult membership(const EvalFn& f, const MembershipIndices& idx) {
    const double a = scale(idx.k);
    const cplx b = cache_.anchor(idx.p, idx.l, idx.n);
    const Polynomial target = Polynomial::from_gauss(poly(idx.j));
    return membership_at(f, target, idx.m, idx.s, idx.t, a, b, boundary_point(idx.p));
  }

  /// Relaxed membership of the auxiliary class: the witness b may sit off the
  /// curve, as long as its distance to (the sampled) C_{pl} is below 1/h.
  MembershipResult relaxed_membership(const EvalFn& f, const MembershipIndices& idx,
                                      cplx b_witness, std::uint64_t h) {
    const double a = scale(idx.k);
    const Polynomial target = Polynomial::from_gauss(poly(idx.j));
    MembershipResult r =
        membership_at(f, target, idx.m, idx.s, idx.t, a, b_witness, boundary_point(idx.p));
    if (!r.pass) return r;
    const double dist = curve_distance(b_witness, idx.p, idx.l);
    if (!(dist < 1.0 / double(h))) {
      r.pass = false;
      r.reason = "witness farther than 1/h from the curve";
    }
    return r;
  }

  /// Distance from a point to the sampled subfamily curve C_{pl}. The sample
  /// argmin is refined by a local ternary search so that tube checks stay
  /// meaningful well below the grid spacing.
  double curve_distance(cplx z, std::uint64_t p, std::uint64_t l) {
    const CurveFamily& fam = cache_.family();
    const CurveSpec spec = fam.coverage == Coverage::Accumulating
                               ? fam.generator(fam.param_interval.lo)
                               : cache_.curve(p, l).spec;
    const auto ts = interior_params(spec.domain, opt_.curve_samples);
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double d = std::abs(z - spec.eval(ts[i]));
      if (d < best) {
        best = d;
        arg = i;
      }
    }
    double lo = ts[arg > 0 ? arg - 1 : 0];
    double hi = ts[std::min(arg + 1, ts.size() - 1)];
    for (int it = 0; it < 60; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (std::abs(z - spec.eval(m1)) < std::abs(z - spec.eval(m2)))
        hi = m2;
      else
        lo = m1;
    }
    return std::min(best, std::abs(z - spec.eval((lo + hi) / 2.0)));
  }

  /// Deterministic witness search: scan k-major, n-minor over the index box,
  /// filtering window geometry before any measurement; the first passing
  /// pair wins. Returns the failed certificate with best margin otherwise.
  Certificate verify_target(const EvalFn& f, const Task& task,
                            std::optional<std::uint64_t> l_override = std::nullopt) {
    task.validate(cache_.family());
    const Polynomial target = task.target();
    const cplx zeta = task.zeta();
    const std::uint64_t l_eff =
        l_override ? *l_override : (task.curve_l ? *task.curve_l : task.t);
    const AnchorStream anchors(cache_, task, l_eff);

    // Anchor geometry is independent of k: precompute the admissible n.
    std::vector<std::pair<std::uint64_t, cplx>> bs;
    for (std::uint64_t n = 1; n <= opt_.n_max; ++n) {
      const cplx b = anchors(n);
      if (std::abs(b) < 1.0 && std::abs(b - zeta) < 1.0 / double(task.t))
        bs.push_back({n, b});
    }

    Certificate best;
    best.n_control = opt_.n_control;
    best.phase = opt_.phase;
    best.margin = -1e300;
    best.reason = "no admissible (k,n) passed";

    for (std::uint64_t k = 1; k <= opt_.k_max; ++k) {
      const double a = scale(k);
      for (const auto& [n, b] : bs) {
        if (a * double(task.m) + std::abs(b) >= 1.0) continue;
        const MembershipResult r =
            membership_at(f, target, task.m, task.s, task.t, a, b, zeta);
        if (r.pass || r.margin > best.margin) {
          Certificate c;
          c.witness = make_witness(task, l_eff, k, n, a, b, zeta, r);
          c.pass = r.pass;
          c.margin = r.margin;
          c.n_control = opt_.n_control;
          c.phase = opt_.phase;
          c.reason = r.reason;
          if (r.pass) return c;
          best = c;
        }
      }
    }
    return best;
  }

  /// Re-check a recorded witness on this verifier's grids.
  Certificate certify_witness(const EvalFn& f, const Task& task, const Witness& w) {
    task.validate(cache_.family());
    const MembershipResult r =
        membership_at(f, task.target(), task.m, task.s, task.t, w.a, w.b, task.zeta());
    Certificate c;
    c.witness = w;
    c.witness.achieved_error = r.error;
    c.witness.b_dist = r.b_dist;
    c.witness.control_n = opt_.n_control;
    c.witness.control_phase = opt_.phase;
    c.pass = r.pass;
    c.margin = r.margin;
    c.n_control = opt_.n_control;
    c.phase = opt_.phase;
    c.reason = r.reason;
    return c;
  }

  /// Openness margin delta = 1/s - measured error of a passing membership:
  /// any perturbation with window control sup below delta keeps the verdict.
  double openness_margin(const EvalFn& f, const MembershipIndices& idx) {
    const MembershipResult r = membership(f, idx);
    if (!r.pass)
      throw std::invalid_argument("openness_margin: membership does not pass: " + r.reason);
    return r.margin;
  }

  struct SnapDerivation {
    double d = 0.0;      // dist(a L_m + b, boundary)
    double lip = 0.0;    // max |f'| over the enlarged compact
    double delta = 0.0;  // admissible index-snapping radius
  };

  /// The modulus-of-continuity bookkeeping behind witness snapping: the
  /// enlarged compact {dist(w, boundary) >= d/2} is the disk of radius
  /// 1 - d/2, and |f'| there bounds how fast window values can drift.
  SnapDerivation snap_derivation(const UniversalSeries& f, double a, cplx b,
                                 const Task& task) const {
    SnapDerivation out;
    out.d = 1.0 - (std::abs(b) + a * double(task.m));
    if (!(out.d > 0.0))
      throw std::invalid_argument("snap_derivation: window not inside the unit disc");
    for (const cplx z :
         sample_disk_boundary(Disk{cplx(0, 0), 1.0 - out.d / 2.0}, opt_.n_control, opt_.phase))
      out.lip = std::max(out.lip, std::abs(f.deriv(z)));
    const double need = 1.0 / (2.0 * double(task.s));
    out.delta = 0.9 * (out.lip > 0.0 ? std::min(out.d / 2.0, need / out.lip) : out.d / 2.0);
    return out;
  }

  struct SnapResult {
    std::uint64_t k = 0;
    std::uint64_t n = 0;
    double delta = 0.0;
    Certificate certificate;
  };

  /// Witness snapping: an arbitrary real pair (a, b) passing the task at
  /// accuracy 1/(2s) (and within 1/(2t) of zeta) is replaced by enumerated
  /// indices (k, n) nearby, certified at the full accuracy 1/s.
  SnapResult snap_witness(const UniversalSeries& f, double a, cplx b, const Task& task,
                          std::optional<std::uint64_t> l_override = std::nullopt) {
    task.validate(cache_.family());
    const Polynomial target = task.target();
    const cplx zeta = task.zeta();
    if (!(a > 0.0 && a < 1.0))
      throw std::invalid_argument("snap_witness: scale outside (0,1)");
    if (!(std::abs(b - zeta) < 1.0 / (2.0 * double(task.t))))
      throw std::invalid_argument("snap_witness: |b - zeta| not below 1/(2t)");
    const EvalFn fe = f.evaluator();
    const double e0 = window_error(fe, target, a, b, task.m);
    if (!(e0 < 1.0 / (2.0 * double(task.s))))
      throw std::invalid_argument("snap_witness: margin hypothesis unmet (error " +
                                  std::to_string(e0) + " >= 1/(2s))");

    const SnapDerivation der = snap_derivation(f, a, b, task);
    const double da = der.delta / (2.0 * double(task.m));
    const double db = std::min(der.delta / 2.0, 1.0 / (2.0 * double(task.t)));

    std::optional<std::uint64_t> k_hit;
    for (std::uint64_t k = 1; k <= opt_.k_max; ++k)
      if (std::abs(scale(k) - a) < da) {
        k_hit = k;
        break;
      }
    const std::uint64_t l_eff =
        l_override ? *l_override : (task.curve_l ? *task.curve_l : task.t);
    const AnchorStream anchors(cache_, task, l_eff);
    std::optional<std::uint64_t> n_hit;
    for (std::uint64_t n = 1; n <= opt_.n_max; ++n)
      if (std::abs(anchors(n) - b) < db) {
        n_hit = n;
        break;
      }
    if (!k_hit || !n_hit)
      throw certification_error("snap_witness: enumeration search exhausted");

    SnapResult out;
    out.k = *k_hit;
    out.n = *n_hit;
    out.delta = der.delta;
    const double ak = scale(*k_hit);
    const cplx bn = anchors(*n_hit);
    const MembershipResult r = membership_at(fe, target, task.m, task.s, task.t, ak, bn, zeta);
    Certificate c;
    c.witness = make_witness(task, l_eff, *k_hit, *n_hit, ak, bn, zeta, r);
    c.pass = r.pass;
    c.margin = r.margin;
    c.n_control = opt_.n_control;
    c.phase = opt_.phase;
    c.reason = r.reason;
    out.certificate = c;
    return out;
  }

 private:
  Witness make_witness(const Task& task, std::uint64_t l_eff, std::uint64_t k,
                       std::uint64_t n, double a, cplx b, cplx zeta,
                       const MembershipResult& r) const {
    Witness w;
    w.m = task.m;
    w.s = task.s;
    w.t = task.t;
    if (task.target_index) w.target_index = *task.target_index;
    if (task.target_coeffs) w.target_coeffs = task.target_coeffs;
    w.p = task.zeta_index ? *task.zeta_index : 0;
    w.l = task.curve_alpha ? 0 : l_eff;
    w.curve_alpha = task.curve_alpha;
    w.k = k;
    w.n = n;
    w.a = a;
    w.b = b;
    w.zeta = zeta;
    w.window = Disk{b, a * double(task.m)};
    w.achieved_error = r.error;
    w.b_dist = r.b_dist;
    w.control_n = opt_.n_control;
    w.control_phase = opt_.phase;
    return w;
  }

  VerifyOptions opt_;
  SubfamilyCache cache_;
};

}  // namespace tuniv
