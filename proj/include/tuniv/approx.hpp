#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "tuniv/common.hpp"
#include "tuniv/polynomial.hpp"

namespace tuniv {

struct Disk {
  cplx center = cplx(0.0, 0.0);
  double radius = 1.0;
};

inline bool disks_disjoint(const Disk& a, const Disk& b) {
  return std::abs(a.center - b.center) > a.radius + b.radius;
}

/// n equispaced boundary points center + radius * e^{i(2 pi k / n + phase)}.
/// Sup norms of holomorphic functions over a closed disk are attained on the
/// boundary, so these grids are the measurement surface everywhere.
inline std::vector<cplx> sample_disk_boundary(const Disk& disk, int n, double phase = 0.0) {
  if (n < 1) throw std::invalid_argument("sample_disk_boundary: n must be >= 1");
  std::vector<cplx> zs;
  zs.reserve(std::size_t(n));
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * pi * double(k) / double(n) + phase;
    zs.push_back(disk.center + disk.radius * cplx(std::cos(th), std::sin(th)));
  }
  return zs;
}

using EvalFn = std::function<cplx(cplx)>;

/// Discrete sup of |f - target| over a boundary control grid.
inline double sup_error(const EvalFn& f, const EvalFn& target, const Disk& disk,
                        int n_control, double phase = 0.0) {
  double m = 0.0;
  for (const cplx z : sample_disk_boundary(disk, n_control, phase))
    m = std::max(m, std::abs(f(z) - target(z)));
  return m;
}

/// Sup-norm inflation factor for a trigonometric polynomial of the given
/// degree read off an n-point equispaced circle grid (Bernstein bound):
/// true sup <= factor * grid sup, valid when n > pi * degree.
inline double sup_bound_factor(int degree, int n) {
  const double x = pi * double(degree) / double(n);
  if (x >= 1.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (1.0 - x);
}

/// One approximation region: fit |p - target| under the given tolerance on
/// the disk. Control grids are denser than fit grids and phase-offset from
/// them so acceptance is never read off the points that were fitted.
struct PieceTarget {
  Disk region;
  EvalFn target;
  double tolerance = 1e-6;
  int fit_samples = 256;
  int control_samples = 512;
};

inline PieceTarget make_piece(Disk region, EvalFn target, double tolerance, int max_degree) {
  PieceTarget p;
  p.region = region;
  p.target = std::move(target);
  p.tolerance = tolerance;
  p.fit_samples = std::max(128, 2 * max_degree);
  p.control_samples = 2 * p.fit_samples;
  return p;
}

struct FitReport {
  bool success = false;
  int degree = 0;                        // accepted degree (or best attempt)
  std::vector<int> schedule;             // degrees actually evaluated
  std::vector<double> residual_history;  // weighted LS residual at each degree
  std::vector<double> piece_errors;      // control sup error per piece, final degree
  double grid_gap_factor = 1.0;          // sup inflation bound at final degree
};

/// Default degree escalation: 8, 16, 32, ... doubling up to max_degree.
inline std::vector<int> doubling_schedule(int max_degree) {
  std::vector<int> s;
  for (int d = 8; d < max_degree; d *= 2) s.push_back(d);
  if (max_degree >= 1) s.push_back(max_degree);
  return s;
}

namespace detail {

/// Incrementally extendable orthonormal polynomial basis on weighted samples
/// (Stieltjes/Arnoldi orthonormalization with one reorthogonalization pass).
class ArnoldiFit {
 public:
  ArnoldiFit(std::vector<cplx> zs, std::vector<double> ws, std::vector<cplx> fs)
      : zs_(std::move(zs)), ws_(std::move(ws)), res_(std::move(fs)) {
    const std::size_t m = zs_.size();
    double sw = 0.0;
    for (double w : ws_) sw += w;
    norm0_ = std::sqrt(sw);
    q_.push_back(std::vector<cplx>(m, cplx(1.0 / norm0_, 0.0)));
    coef_.push_back(project(res_, q_[0]));
    axpy(res_, -coef_[0], q_[0]);
  }

  int degree() const { return int(coef_.size()) - 1; }
  bool saturated() const { return saturated_; }

  /// Extend the basis (and the least-squares solution) to the given degree.
  void extend(int target_degree) {
    const std::size_t m = zs_.size();
    while (degree() < target_degree && !saturated_) {
      const std::size_t k = q_.size() - 1;
      std::vector<cplx> v(m);
      double scale = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        v[i] = zs_[i] * q_[k][i];
        scale += ws_[i] * std::norm(v[i]);
      }
      scale = std::sqrt(scale);
      std::vector<cplx> h(k + 2);
      for (std::size_t i = 0; i <= k; ++i) {
        h[i] = project(v, q_[i]);
        axpy(v, -h[i], q_[i]);
      }
      for (std::size_t i = 0; i <= k; ++i) {  // reorthogonalization pass
        const cplx g = project(v, q_[i]);
        axpy(v, -g, q_[i]);
        h[i] += g;
      }
      double beta = 0.0;
      for (std::size_t i = 0; i < m; ++i) beta += ws_[i] * std::norm(v[i]);
      beta = std::sqrt(beta);
      if (!(beta > 1e-14 * scale)) {  // numerically dependent: basis exhausted
        saturated_ = true;
        return;
      }
      h[k + 1] = cplx(beta, 0.0);
      for (auto& x : v) x /= beta;
      rec_.push_back(std::move(h));
      q_.push_back(std::move(v));
      const cplx c = project(res_, q_.back());
      coef_.push_back(c);
      axpy(res_, -c, q_.back());
    }
  }

  double residual_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < res_.size(); ++i) s += ws_[i] * std::norm(res_[i]);
    return std::sqrt(s);
  }

  /// Solution restricted to the leading `degree+1` basis columns (the nested
  /// prefix is the exact least-squares solution at that degree).
  Polynomial polynomial(int degree) const {
    const std::size_t n = std::size_t(degree) + 1;
    std::vector<std::vector<cplx>> rec(rec_.begin(), rec_.begin() + (n - 1));
    std::vector<cplx> coef(coef_.begin(), coef_.begin() + n);
    auto [mirror, reliable] = monomial_mirror(rec, coef);
    return Polynomial::from_recurrence(norm0_, std::move(rec), std::move(coef),
                                       std::move(mirror), reliable);
  }

 private:
  cplx project(const std::vector<cplx>& u, const std::vector<cplx>& b) const {
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) s += ws_[i] * u[i] * std::conj(b[i]);
    return s;
  }

  static void axpy(std::vector<cplx>& y, cplx a, const std::vector<cplx>& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
  }

  /// Expand the recurrence basis in monomials and check the expansion against
  /// the recurrence at a few probe points; catastrophic cancellation at high
  /// degree shows up as disagreement and flags the mirror unreliable.
  std::pair<std::vector<cplx>, bool> monomial_mirror(
      const std::vector<std::vector<cplx>>& rec, const std::vector<cplx>& coef) const {
    const std::size_t n = coef.size();
    std::vector<std::vector<cplx>> basis(n);
    basis[0] = {cplx(1.0 / norm0_, 0.0)};
    for (std::size_t k = 0; k + 1 < n; ++k) {
      std::vector<cplx> v(basis[k].size() + 1, cplx(0.0, 0.0));
      for (std::size_t i = 0; i < basis[k].size(); ++i) v[i + 1] = basis[k][i];
      for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t c = 0; c < basis[i].size(); ++c) v[c] -= rec[k][i] * basis[i][c];
      for (auto& x : v) x /= rec[k][k + 1];
      basis[k + 1] = std::move(v);
    }
    std::vector<cplx> mirror(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t c = 0; c < basis[k].size(); ++c) mirror[c] += coef[k] * basis[k][c];
    bool reliable = true;
    for (const cplx& c : mirror)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) reliable = false;
    if (reliable) {
      const Polynomial probe_rec = Polynomial::from_recurrence(
          norm0_, rec, coef, {}, false);
      const Polynomial probe_mono = Polynomial::from_coeffs(mirror);
      double scale = 1e-300;
      for (std::size_t i = 0; i < zs_.size(); i += std::max<std::size_t>(1, zs_.size() / 16)) {
        const cplx a = probe_rec.eval(zs_[i]);
        const cplx b = probe_mono.eval(zs_[i]);
        scale = std::max(scale, std::abs(a));
        if (std::abs(a - b) > 1e-8 * std::max(1.0, scale)) {
          reliable = false;
          break;
        }
      }
    }
    return {std::move(mirror), reliable};
  }

  std::vector<cplx> zs_;
  std::vector<double> ws_;
  std::vector<cplx> res_;  // running residual F - projection
  std::vector<std::vector<cplx>> q_;
  std::vector<std::vector<cplx>> rec_;
  std::vector<cplx> coef_;
  double norm0_ = 1.0;
  bool saturated_ = false;
};

}  // namespace detail

/// Polynomial simultaneously matching every piece target within tolerance:
/// weighted least squares over the union of boundary fit grids, escalating
/// through the degree schedule until every piece passes on its control grid.
/// The complement of finitely many disjoint closed disks is connected, so a
/// passing polynomial exists for any holomorphic piece data; the report flags
/// failure when the degree budget runs out first.
inline std::pair<Polynomial, FitReport> fit_simultaneous(const std::vector<PieceTarget>& pieces,
                                                         int max_degree,
                                                         std::vector<int> schedule = {}) {
  if (pieces.empty()) throw std::invalid_argument("fit_simultaneous: no pieces");
  for (const auto& p : pieces)
    if (!(p.region.radius > 0.0))
      throw std::invalid_argument("fit_simultaneous: disk radius must be positive");
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i + 1; j < pieces.size(); ++j)
      if (!disks_disjoint(pieces[i].region, pieces[j].region))
        throw std::invalid_argument("fit_simultaneous: regions must be pairwise disjoint");

  if (schedule.empty()) schedule = doubling_schedule(max_degree);

  // Assemble fit samples. Targets are weighted by 1/tolerance, normalized by
  // sample count so grid density does not change a piece's influence.
  std::vector<cplx> zs, fs;
  std::vector<double> ws;
  for (const auto& p : pieces) {
    const auto grid = sample_disk_boundary(p.region, p.fit_samples, 0.0);
    const double w = 1.0 / (p.tolerance * p.tolerance * double(p.fit_samples));
    for (const cplx z : grid) {
      zs.push_back(z);
      fs.push_back(p.target(z));
      ws.push_back(w);
    }
  }
  const int degree_cap = int(zs.size()) - 1;

  detail::ArnoldiFit fit(std::move(zs), std::move(ws), std::move(fs));

  FitReport rep;
  int best_degree = -1;
  double best_score = std::numeric_limits<double>::infinity();
  std::vector<double> best_errors;

  auto control_errors = [&](const Polynomial& q) {
    std::vector<double> errs;
    errs.reserve(pieces.size());
    for (const auto& p : pieces) {
      const double phase = pi / double(p.control_samples);  // offset from fit grid
      errs.push_back(sup_error([&](cplx z) { return q.eval(z); }, p.target, p.region,
                               p.control_samples, phase));
    }
    return errs;
  };

  for (int d : schedule) {
    d = std::min(d, degree_cap);
    fit.extend(d);
    d = std::min(d, fit.degree());
    rep.schedule.push_back(d);
    rep.residual_history.push_back(fit.residual_norm());

    const Polynomial q = fit.polynomial(d);
    const std::vector<double> errs = control_errors(q);
    double score = 0.0;
    bool all_ok = true;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      score = std::max(score, errs[i] / pieces[i].tolerance);
      all_ok = all_ok && errs[i] < pieces[i].tolerance;
    }
    if (score < best_score) {
      best_score = score;
      best_degree = d;
      best_errors = errs;
    }
    if (all_ok) {
      rep.success = true;
      rep.degree = d;
      rep.piece_errors = errs;
      int min_control = pieces[0].control_samples;
      for (const auto& p : pieces) min_control = std::min(min_control, p.control_samples);
      rep.grid_gap_factor = sup_bound_factor(d, min_control);
      return {q, rep};
    }
    if (fit.saturated() && fit.degree() <= d) break;
  }

  rep.success = false;
  rep.degree = best_degree;
  rep.piece_errors = best_errors;
  int min_control = pieces[0].control_samples;
  for (const auto& p : pieces) min_control = std::min(min_control, p.control_samples);
  rep.grid_gap_factor = sup_bound_factor(std::max(best_degree, 0), min_control);
  return {fit.polynomial(std::max(best_degree, 0)), rep};
}

}  // namespace tuniv
