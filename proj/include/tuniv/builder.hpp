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
#include "tuniv/verify.hpp"

namespace tuniv {

struct BuildOptions {
  int max_degree = 512;
  std::uint64_t anchor_n_max = 1u << 16;
  int max_scale_depth = 50;          // bound on the dyadic depth of a_k
  int witness_control_n = 1024;      // builder-side achieved-error grid
  double witness_control_phase = pi / 2048.0;
  SubfamilyOptions subfamily;
  VerifyOptions verify;              // independent re-check after the build
};

/// Window placement for one task against the current frozen region.
struct Placement {
  double delta = 0.0;  // clearance of the zeta-ball from the frozen disk
  double theta = 0.0;  // anchor admission radius min(1/t, delta/2)
  std::uint64_t l = 0;
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  double a = 0.0;
  cplx b;
  cplx zeta;
  Disk window;
};

struct BuildState {
  SubfamilyCache cache;
  UniversalSeries series;
  double frozen_radius = 0.0;
  double tail_budget = 0.0;  // T = min over tasks of 1/(4s)
  int step = 0;              // completed corrections
  // Boundary sites of the whole plan, in build order. Corrections are pinned
  // near the sites of tasks not yet built (see build_step).
  std::vector<cplx> plan_sites;

  explicit BuildState(const CurveFamily& family, const SubfamilyOptions& sub = {})
      : cache(family, sub) {
    series.family_name = family.name;
  }
};

inline BuildState make_build_state(const CurveFamily& family,
                                   const std::vector<Task>& tasks,
                                   const BuildOptions& opt = {}) {
  BuildState st(family, opt.subfamily);
  double T = 0.0;
  for (const auto& task : tasks) {
    task.validate(family);
    st.plan_sites.push_back(task.zeta());
    const double cap = 1.0 / (4.0 * double(task.s));
    T = (T == 0.0) ? cap : std::min(T, cap);
  }
  st.tail_budget = T;
  return st;
}

/// Choose the window for a task: anchor first (smallest n reaching the
/// admission ball around zeta), then the smallest k whose scale keeps the
/// window inside the unit disc and inside the zeta-ball. The placed window is
/// automatically disjoint from the frozen disk: every point of the zeta-ball
/// of radius delta = (1 - r)/2 has modulus above (1 + r)/2 > r.
inline Placement place_window(BuildState& state, const Task& task,
                              const BuildOptions& opt = {}) {
  const double r = state.frozen_radius;
  if (!(r < 1.0)) throw std::invalid_argument("place_window: frozen radius must stay < 1");

  Placement pl;
  pl.delta = (1.0 - r) / 2.0;
  pl.zeta = task.zeta();
  pl.theta = std::min(1.0 / double(task.t), pl.delta / 2.0);

  if (task.curve_alpha) {
    pl.l = 0;
  } else if (task.curve_l) {
    pl.l = *task.curve_l;
  } else {
    // Free choice of the subfamily curve: pick l so that C_{pl}'s endpoint
    // sits well inside the admission ball and anchors can reach it.
    const double want = 2.0 / pl.theta;
    if (!(want < 1e9))
      throw certification_error("place_window: admission radius too small for any C_{pl}");
    pl.l = std::max<std::uint64_t>(1, std::uint64_t(std::ceil(want)));
  }

  const AnchorStream anchors(state.cache, task, pl.l);
  bool found = false;
  for (std::uint64_t n = 1; n <= opt.anchor_n_max; ++n) {
    const cplx b = anchors(n);
    if (std::abs(b) < 1.0 && std::abs(b - pl.zeta) < pl.theta) {
      pl.n = n;
      pl.b = b;
      found = true;
      break;
    }
  }
  if (!found)
    throw certification_error(
        "place_window: task rejected, curve has no anchor within " +
        std::to_string(pl.theta) + " of zeta (searched n <= " +
        std::to_string(opt.anchor_n_max) + ")");

  const double cap =
      std::min(pl.delta, 1.0 - std::abs(pl.b)) / (2.0 * double(task.m));
  bool k_found = false;
  for (int a_depth = 0; a_depth <= opt.max_scale_depth; ++a_depth) {
    if (std::ldexp(1.0, -(a_depth + 1)) < cap) {
      pl.k = std::uint64_t(1) << a_depth;
      k_found = true;
      break;
    }
  }
  if (!k_found)
    throw certification_error("place_window: no admissible scale a_k above depth bound");
  pl.a = scale(pl.k);
  pl.window = Disk{pl.b, pl.a * double(task.m)};
  return pl;
}

struct StepResult {
  bool ok = false;
  Placement placement;
  FitReport fit;
};

namespace detail {

/// One correction step: fit the new term against the window target (pulled
/// back through the affine window map, relative to the running series) while
/// staying inside this step's near-zero budget on the frozen disk, then grow
/// the frozen region past the window.
///
/// window_offset shifts the window target (used by the difference
/// decomposition, whose second stream tracks u - f); measure_offset shifts
/// the series when measuring the achieved error.
inline StepResult build_step_impl(BuildState& state, const Task& task,
                                  const BuildOptions& opt, const EvalFn* window_offset,
                                  const EvalFn* measure_offset) {
  StepResult out;
  out.placement = place_window(state, task, opt);
  const Placement& pl = out.placement;

  const Polynomial target = task.target();
  const UniversalSeries& series = state.series;
  const double a = pl.a;
  const cplx b = pl.b;

  EvalFn window_target = [&](cplx z) {
    cplx v = target.eval((z - b) / a) - series.eval(z);
    if (window_offset) v += (*window_offset)(z);
    return v;
  };

  const double tau = state.tail_budget * std::ldexp(1.0, -(state.step + 1));
  std::vector<PieceTarget> pieces;
  pieces.push_back(make_piece(pl.window, window_target, 1.0 / (2.0 * double(task.s)),
                              opt.max_degree));
  if (state.frozen_radius > 0.0) {
    pieces.push_back(make_piece(Disk{cplx(0.0, 0.0), state.frozen_radius},
                                [](cplx) { return cplx(0.0, 0.0); }, tau, opt.max_degree));
  }

  // Pin the correction near the boundary sites of tasks still to come.
  // Away from the fitted disks a least-squares polynomial grows roughly like
  // exp(degree * Green function), which would wreck the window targets of
  // later steps; a small near-zero disk at each pending site keeps the series
  // flat exactly where those windows will land.
  const double cover_next =
      std::max(state.frozen_radius, std::abs(b) + a * double(task.m));
  const double rho = (1.0 - (cover_next + (1.0 - cover_next) / 4.0)) / 2.0;
  std::vector<Disk> guards;
  for (std::size_t j = std::size_t(state.step) + 1; j < state.plan_sites.size(); ++j) {
    const Disk g{(1.0 - rho) * state.plan_sites[j], rho / 2.0};
    bool ok = disks_disjoint(g, pl.window);
    for (const Disk& other : guards) ok = ok && disks_disjoint(g, other);
    if (ok) guards.push_back(g);
  }
  for (const Disk& g : guards)
    pieces.push_back(
        make_piece(g, [](cplx) { return cplx(0.0, 0.0); }, tau, opt.max_degree));

  auto [q, rep] = fit_simultaneous(pieces, opt.max_degree);
  out.fit = rep;
  if (!rep.success) return out;

  // Append and account: every task completed before this step may have lost
  // up to tau of its margin to the new correction.
  if (pieces.size() > 1)
    for (auto& consumed : state.series.budgets.slack_consumed) consumed += tau;
  state.series.corrections.push_back(std::move(q));
  state.series.budgets.step_tau.push_back(tau);
  state.series.budgets.tail_budget = state.tail_budget;
  state.series.budgets.slack_budget.push_back(1.0 / (4.0 * double(task.s)));
  state.series.budgets.slack_consumed.push_back(0.0);

  double err = 0.0;
  for (const cplx z : sample_disk_boundary(Disk{cplx(0.0, 0.0), double(task.m)},
                                           opt.witness_control_n, opt.witness_control_phase)) {
    cplx v = series.eval(a * z + b) - target.eval(z);
    if (measure_offset) v += (*measure_offset)(a * z + b);
    err = std::max(err, std::abs(v));
  }

  Witness w;
  w.task_index = std::size_t(state.step);
  w.m = task.m;
  w.s = task.s;
  w.t = task.t;
  if (task.target_index) w.target_index = *task.target_index;
  if (task.target_coeffs) w.target_coeffs = task.target_coeffs;
  w.p = task.zeta_index ? *task.zeta_index : 0;
  w.l = task.curve_alpha ? 0 : pl.l;
  w.curve_alpha = task.curve_alpha;
  w.k = pl.k;
  w.n = pl.n;
  w.a = a;
  w.b = b;
  w.zeta = pl.zeta;
  w.window = pl.window;
  w.delta = pl.delta;
  w.achieved_error = err;
  w.b_dist = std::abs(b - pl.zeta);
  w.fit_degree = rep.degree;
  w.control_n = opt.witness_control_n;
  w.control_phase = opt.witness_control_phase;
  state.series.witnesses.push_back(std::move(w));

  const double cover = std::max(state.frozen_radius, std::abs(b) + a * double(task.m));
  state.frozen_radius = cover + (1.0 - cover) / 4.0;
  state.step += 1;
  out.ok = true;
  return out;
}

}  // namespace detail

inline StepResult build_step(BuildState& state, const Task& task,
                             const BuildOptions& opt = {}) {
  return detail::build_step_impl(state, task, opt, nullptr, nullptr);
}

struct BuildResult {
  UniversalSeries series;
  bool success = false;
  std::string diagnostic;
  std::vector<FitReport> fits;
  std::vector<Certificate> certificates;  // independent re-verification
};

/// Assemble the full series for a finite task list, then re-verify every
/// witness through the verify module on fresh control grids.
inline BuildResult build_universal(const CurveFamily& family, const std::vector<Task>& tasks,
                                   const BuildOptions& opt = {}) {
  BuildResult out;
  BuildState state = make_build_state(family, tasks, opt);
  out.success = true;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    StepResult st;
    try {
      st = build_step(state, tasks[i], opt);
    } catch (const certification_error& e) {
      out.success = false;
      out.diagnostic = "task " + std::to_string(i) + ": " + e.what();
      break;
    }
    out.fits.push_back(st.fit);
    if (!st.ok) {
      out.success = false;
      out.diagnostic =
          "task " + std::to_string(i) + ": degree budget exhausted during fit";
      break;
    }
  }
  out.series = state.series;
  if (!out.success) return out;

  Verifier verifier(family, opt.verify);
  const EvalFn f = [&series = out.series](cplx z) { return series.eval(z); };
  for (const Witness& w : out.series.witnesses) {
    Certificate c = verifier.certify_witness(f, tasks[w.task_index], w);
    if (!c.pass) {
      out.success = false;
      out.diagnostic = "re-verification failed for task " +
                       std::to_string(w.task_index) + ": " + c.reason;
    }
    out.certificates.push_back(std::move(c));
  }
  return out;
}

struct DecomposeResult {
  UniversalSeries g;
  UniversalSeries h;
  bool success = false;
  std::string diagnostic;
  std::vector<Certificate> certificates_g;
  std::vector<Certificate> certificates_h;
};

/// Difference decomposition: build one correction stream u whose windows
/// alternate between the two task lists, pulling the second stream's targets
/// back against u - f. Then g = u and h = u - f, the latter represented
/// termwise as u's corrections plus the single term -f, so g - h = f exactly.
inline DecomposeResult decompose(const UniversalSeries& f, const std::vector<Task>& tasks_g,
                                 const std::vector<Task>& tasks_h, const CurveFamily& family,
                                 const BuildOptions& opt = {}) {
  DecomposeResult out;

  std::vector<std::pair<bool, std::size_t>> stages;  // (is_g, index in its list)
  for (std::size_t i = 0; i < std::max(tasks_g.size(), tasks_h.size()); ++i) {
    if (i < tasks_g.size()) stages.push_back({true, i});
    if (i < tasks_h.size()) stages.push_back({false, i});
  }

  std::vector<Task> all;
  for (const auto& [is_g, i] : stages) all.push_back(is_g ? tasks_g[i] : tasks_h[i]);
  BuildState state = make_build_state(family, all, opt);

  const EvalFn f_eval = [&f](cplx z) { return f.eval(z); };
  const EvalFn f_neg = [&f](cplx z) { return -f.eval(z); };

  out.success = true;
  for (std::size_t si = 0; si < stages.size(); ++si) {
    const auto& [is_g, ti] = stages[si];
    const Task& task = all[si];
    StepResult st;
    try {
      st = is_g ? detail::build_step_impl(state, task, opt, nullptr, nullptr)
                : detail::build_step_impl(state, task, opt, &f_eval, &f_neg);
    } catch (const certification_error& e) {
      out.success = false;
      out.diagnostic = "stage " + std::to_string(si) + ": " + e.what();
      break;
    }
    if (!st.ok) {
      out.success = false;
      out.diagnostic = "stage " + std::to_string(si) + ": degree budget exhausted";
      break;
    }
    state.series.witnesses.back().task_index = ti;
  }

  // g keeps u's terms; h appends the single exact term -f (or f's negated
  // terms, when f is itself a series).
  out.g = state.series;
  out.h = state.series;
  out.h.corrections.reserve(out.h.corrections.size() + f.corrections.size());
  for (const auto& term : f.corrections) out.h.corrections.push_back(term.negated());
  out.g.witnesses.clear();
  out.h.witnesses.clear();
  for (std::size_t si = 0; si < state.series.witnesses.size(); ++si) {
    const Witness& w = state.series.witnesses[si];
    (stages[si].first ? out.g.witnesses : out.h.witnesses).push_back(w);
  }
  if (!out.success) return out;

  Verifier verifier(family, opt.verify);
  const EvalFn ge = [&g = out.g](cplx z) { return g.eval(z); };
  const EvalFn he = [&h = out.h](cplx z) { return h.eval(z); };
  for (const Witness& w : out.g.witnesses) {
    Certificate c = verifier.certify_witness(ge, tasks_g[w.task_index], w);
    if (!c.pass) {
      out.success = false;
      out.diagnostic = "g-stream verification failed: " + c.reason;
    }
    out.certificates_g.push_back(std::move(c));
  }
  for (const Witness& w : out.h.witnesses) {
    Certificate c = verifier.certify_witness(he, tasks_h[w.task_index], w);
    if (!c.pass) {
      out.success = false;
      out.diagnostic = "h-stream verification failed: " + c.reason;
    }
    out.certificates_h.push_back(std::move(c));
  }
  return out;
}

inline DecomposeResult decompose(const Polynomial& f, const std::vector<Task>& tasks_g,
                                 const std::vector<Task>& tasks_h, const CurveFamily& family,
                                 const BuildOptions& opt = {}) {
  UniversalSeries fs;
  fs.family_name = family.name;
  if (!f.is_zero()) fs.corrections.push_back(f);
  return decompose(fs, tasks_g, tasks_h, family, opt);
}

/// Reconstruct the task a witness certifies (series files carry witnesses,
/// not the original config).
inline Task task_from_witness(const Witness& w) {
  Task task;
  task.m = w.m;
  task.s = w.s;
  task.t = w.t;
  if (w.target_coeffs)
    task.target_coeffs = w.target_coeffs;
  else
    task.target_index = w.target_index;
  if (w.p != 0)
    task.zeta_index = w.p;
  else
    task.zeta_point = w.zeta;
  if (w.curve_alpha)
    task.curve_alpha = w.curve_alpha;
  else if (w.l != 0)
    task.curve_l = w.l;
  return task;
}

}  // namespace tuniv
