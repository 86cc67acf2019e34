// Acceptance suite: one line per criterion, nonzero exit iff any fails.
// Criteria run against the library exactly as the CLI drives it; tolerances
// are pinned here, in code.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <vector>

#include "tuniv/cli_app.hpp"

using namespace tuniv;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail = "") {
  std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, name,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++failures;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

double window_sup(const EvalFn& e, const Witness& w, int n, double phase) {
  double s = 0.0;
  for (const cplx z : sample_disk_boundary(Disk{cplx(0, 0), double(w.m)}, n, phase))
    s = std::max(s, std::abs(e(w.a * z + w.b)));
  return s;
}

}  // namespace

int main() {
  const fs::path outdir = fs::temp_directory_path() / "tuniv_acceptance";
  fs::create_directories(outdir);
  const auto file = [&](const char* name) { return (outdir / name).string(); };

  const json build_cfg_json = demo_build_config();
  const RunConfig build_cfg = cli_detail::run_config_from_json(build_cfg_json);

  // ---- 1. End-to-end construction --------------------------------------
  BuildResult demo;
  {
    Timer timer;
    demo = build_universal(build_cfg.family, build_cfg.tasks, build_cfg.options);
    const double secs = timer.seconds();
    bool ok = demo.success && secs < 60.0 && demo.certificates.size() == 3;
    SubfamilyCache cache(build_cfg.family, build_cfg.options.subfamily);
    std::string detail = "t=" + std::to_string(secs).substr(0, 5) + "s";
    for (std::size_t i = 0; ok && i < demo.certificates.size(); ++i) {
      const Certificate& c = demo.certificates[i];
      const Witness& w = c.witness;
      const double s_tol = 1.0 / double(build_cfg.tasks[i].s);
      const double t_tol = 1.0 / double(build_cfg.tasks[i].t);
      ok = ok && c.pass && c.n_control >= 1024;
      ok = ok && w.achieved_error < s_tol && w.b_dist < t_tol;
      // b and a reproduce exactly from the recorded (k, n, l, p) indices.
      ok = ok && scale(w.k) == w.a && cache.anchor(w.p, w.l, w.n) == w.b;
      detail += " task" + std::to_string(i) + "_err=" +
                std::to_string(w.achieved_error).substr(0, 8);
    }
    report(1, "end-to-end 3-task build on radii", ok, detail);
  }

  // ---- 2. Two-disk separation oracle ------------------------------------
  {
    auto zero = [](cplx) { return cplx(0, 0); };
    auto one = [](cplx) { return cplx(1, 0); };
    const std::vector<PieceTarget> pieces = {
        make_piece(Disk{cplx(0, 0), 0.3}, zero, 1e-3, 512),
        make_piece(Disk{cplx(0.9, 0), 0.05}, one, 1e-3, 512)};
    auto [q, rep] = fit_simultaneous(pieces, 512);
    double worst = 0.0;
    for (double e : rep.piece_errors) worst = std::max(worst, e);
    auto [q8, rep8] = fit_simultaneous(pieces, 8);
    double worst8 = 0.0;
    for (double e : rep8.piece_errors) worst8 = std::max(worst8, e);
    const bool ok = rep.success && rep.degree <= 512 && worst <= 1e-3 && worst < worst8;
    report(2, "two-disk target 0|1 reaches 1e-3 by degree 512", ok,
           "degree=" + std::to_string(rep.degree) + " err=" + std::to_string(worst));
    (void)q;
    (void)q8;
  }

  // ---- 3. Exact recovery of a degree-10 polynomial ----------------------
  {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<cplx> coeffs;
    for (int i = 0; i <= 10; ++i) coeffs.push_back(cplx(u(rng), u(rng)));
    const Polynomial target = Polynomial::from_coeffs(coeffs);
    double max_coef = 0.0;
    for (const cplx& c : coeffs) max_coef = std::max(max_coef, std::abs(c));
    auto tf = [&](cplx z) { return target.eval(z); };
    auto [q, rep] = fit_simultaneous({make_piece(Disk{cplx(0, 0), 0.3}, tf, 1e-8, 64),
                                      make_piece(Disk{cplx(0.9, 0), 0.05}, tf, 1e-8, 64)},
                                     64);
    double worst = 0.0;
    for (double e : rep.piece_errors) worst = std::max(worst, e);
    const bool ok = rep.success && worst <= 1e-9 * max_coef;
    report(3, "degree-10 target recovered to 1e-9 relative", ok,
           "rel_err=" + std::to_string(worst / max_coef));
    (void)q;
  }

  // ---- 4. Metric suite ----------------------------------------------------
  {
    bool ok = true;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto grid = linear_params(0.0, 1.0, 33);
    auto random_curve = [&]() {
      SampledCurve c;
      c.params = grid;
      for (std::size_t i = 0; i < grid.size(); ++i) c.points.push_back(cplx(u(rng), u(rng)));
      return c;
    };
    for (int it = 0; it < 100 && ok; ++it) {
      const auto a = random_curve(), b = random_curve(), c = random_curve();
      ok = ok && r_distance(a, a) == 0.0;
      ok = ok && r_distance(a, b) == r_distance(b, a);
      ok = ok && r_distance(a, c) <= r_distance(a, b) + r_distance(b, c) + 1e-12;
    }
    const auto rays = ray_family();
    const auto rgrid = linear_params(0.04, 4.0, 100);
    const auto c0 = sample_curve(rays.generator(0.0), rgrid);
    const auto c1 = sample_curve(rays.generator(0.3), rgrid);
    double prev = 0.0;
    for (unsigned j = 1; j <= 5 && ok; ++j) {
      const double tj = truncated_r_distance(c0, c1, j);
      ok = ok && tj >= prev && tj <= r_distance(c0, c1);
      prev = tj;
    }
    report(4, "r-distance pseudometric + truncation monotonicity", ok);
  }

  // ---- 5. Continuity certification ---------------------------------------
  {
    const auto radii = radii_family();
    std::vector<double> alphas;
    for (int i = 0; i < 64; ++i) alphas.push_back(2.0 * pi * i / 64.0);
    const auto rep = certify_continuous(radii, 0.05, 1, alphas);
    bool ok = rep.pass && rep.entries.size() == 64;
    for (const auto& e : rep.entries)
      ok = ok && e.ok &&
           (e.witness.is_endpoint ||
            e.witness.value == double(e.witness.num) / double(e.witness.den));
    // Closed-form radii r-distance against the computed value.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * pi - 1e-9);
    const double t_max = 1.0 - std::ldexp(1.0, -10);
    const auto grid = linear_params(0.0, t_max, 1025);
    for (int it = 0; it < 50 && ok; ++it) {
      const double a = ang(rng), b = ang(rng);
      const double computed = r_distance(sample_curve(radii.generator(a), grid),
                                         sample_curve(radii.generator(b), grid));
      const double closed = t_max * std::abs(cplx(std::cos(a), std::sin(a)) -
                                             cplx(std::cos(b), std::sin(b)));
      ok = ok && std::abs(computed - closed) < 1e-12;
    }
    report(5, "radii continuity at delta=0.05 with rational witnesses", ok);
  }

  // ---- 6. Enumeration suite ----------------------------------------------
  {
    bool ok = true;
    for (int j = 1; j <= 200 && ok; ++j) ok = poly_index(poly(bigint(j))) == bigint(j);
    // Determinism of the decoders.
    ok = ok && poly(bigint(123)).coeffs == poly(bigint(123)).coeffs;
    ok = ok && tuple_at(bigint(9999)) == tuple_at(bigint(9999));
    ok = ok && scale(77) == scale(77) && boundary_point(77) == boundary_point(77);
    // Depth <= 10 dyadics all appear below index 2^11.
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (std::uint64_t k = 1; k < (1u << 11) && ok; ++k) {
      const Rational d = scale_fraction(k);
      ok = seen.insert({d.num, d.den}).second;
    }
    for (int depth = 1; depth <= 10 && ok; ++depth)
      for (std::int64_t num = 1; num < (std::int64_t(1) << depth) && ok; num += 2)
        ok = seen.count({num, std::int64_t(1) << depth}) == 1;
    // Tuple schedule bijective on the coordinate-sum <= 10 block.
    std::set<std::array<std::uint64_t, 6>> tuples;
    for (int i = 1; i <= 210 && ok; ++i) {
      const auto t = tuple_at(bigint(i));
      std::uint64_t sum = 0;
      for (auto v : t) sum += v;
      ok = sum <= 10 && tuples.insert(t).second && tuple_index(t) == bigint(i);
    }
    ok = ok && tuples.size() == 210;
    report(6, "enumeration decoders deterministic and bijective", ok);
  }

  // ---- 7. Openness of the membership sets --------------------------------
  {
    bool ok = demo.success;
    Verifier verifier(build_cfg.family, build_cfg.options.verify);
    const EvalFn f = demo.series.evaluator();
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::string detail;
    for (const Witness& w : demo.series.witnesses) {
      if (!ok) break;
      MembershipIndices idx{w.m, w.target_index, w.p, w.s, w.t, w.l, w.k, w.n};
      const double margin = verifier.openness_margin(f, idx);
      ok = ok && margin > 0.0;
      detail += " margin=" + std::to_string(margin).substr(0, 8);

      const Polynomial target = Polynomial::from_gauss(poly(idx.j));
      const auto ctrl = sample_disk_boundary(Disk{cplx(0, 0), double(w.m)},
                                             verifier.options().n_control,
                                             verifier.options().phase);
      for (int trial = 0; trial < 20 && ok; ++trial) {
        std::vector<cplx> pc;
        for (int d = 0; d <= 6; ++d) pc.push_back(cplx(u(rng), u(rng)));
        const Polynomial e = Polynomial::from_coeffs(pc);
        double sup = 0.0;
        for (const cplx z : ctrl) sup = std::max(sup, std::abs(e.eval(w.a * z + w.b)));
        const double scale_to = 0.9 * margin / 2.0 / sup;
        auto perturbed = [&](cplx z) { return f(z) + scale_to * e.eval(z); };
        ok = ok && verifier.membership(perturbed, idx).pass;
      }
      if (!ok) break;
      // Directed perturbation of size 2*margin pushes the worst point over.
      cplx worst_dir(1.0, 0.0);
      double worst_err = -1.0;
      for (const cplx z : ctrl) {
        const cplx res = f(w.a * z + w.b) - target.eval(z);
        if (std::abs(res) > worst_err) {
          worst_err = std::abs(res);
          worst_dir = std::abs(res) > 0 ? res / std::abs(res) : cplx(1.0, 0.0);
        }
      }
      auto broken = [&](cplx z) { return f(z) + 2.0 * margin * worst_dir; };
      ok = ok && !verifier.membership(broken, idx).pass;
    }
    report(7, "membership margins positive and stable under sub-margin noise", ok, detail);
  }

  // ---- 8. Non-interference budget ledger ---------------------------------
  {
    bool ok = demo.success;
    if (ok) {
      const Certificate& first = demo.certificates[0];
      const double s_tol = 1.0 / double(build_cfg.tasks[0].s);
      ok = ok && first.pass && first.witness.achieved_error < s_tol;
      const double consumed = demo.series.budgets.slack_consumed[0];
      ok = ok && consumed <= 1.0 / (4.0 * double(build_cfg.tasks[0].s)) + 1e-15;
      report(8, "first task survives the full build within its slack", ok,
             "err=" + std::to_string(first.witness.achieved_error) +
                 " consumed=" + std::to_string(consumed));
    } else {
      report(8, "first task survives the full build within its slack", false);
    }
  }

  // ---- 9. Witness snapping ------------------------------------------------
  {
    GaussPoly gp;
    gp.coeffs = {{Rational(0), Rational(0)}, {Rational(1, 2), Rational(0)}};
    Task task;
    task.m = 1;
    task.s = 2;
    task.t = 2;
    task.zeta_index = 1;
    task.target_index = poly_index(gp);
    BuildOptions opt;
    opt.max_degree = 256;
    const BuildResult res = build_universal(radii_family(), {task}, opt);
    bool ok = res.success;
    std::string detail;
    if (ok) {
      const Witness& w = res.series.witnesses[0];
      Verifier verifier(radii_family());
      const auto der = verifier.snap_derivation(res.series, w.a, w.b, task);
      detail = "delta=" + std::to_string(der.delta);
      std::mt19937_64 rng(31);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int trial = 0; trial < 5 && ok; ++trial) {
        const double da = der.delta / 4.0 * 0.9 * u(rng);
        const cplx db = der.delta / 4.0 * 0.9 *
                        cplx(u(rng), u(rng)) / std::sqrt(2.0);
        const auto snap = verifier.snap_witness(res.series, w.a + da, w.b + db, task, w.l);
        ok = ok && snap.certificate.pass &&
             snap.certificate.witness.achieved_error < 1.0 / double(task.s);
      }
    }
    report(9, "perturbed witnesses snap back to passing index pairs", ok, detail);
  }

  // ---- 10. Difference decomposition ---------------------------------------
  {
    const json dec_cfg = demo_decompose_config();
    const CurveFamily family = family_from_json(dec_cfg.at("family"));
    std::vector<Task> tasks_g, tasks_h;
    for (const auto& tj : dec_cfg.at("tasks_g")) tasks_g.push_back(task_from_json(tj));
    for (const auto& tj : dec_cfg.at("tasks_h")) tasks_h.push_back(task_from_json(tj));
    BuildOptions opt;
    opt.max_degree = 512;
    const Polynomial f = Polynomial::constant(cplx(1.0, 0.0));
    const DecomposeResult res = decompose(f, tasks_g, tasks_h, family, opt);
    bool ok = res.success;
    double worst = 0.0;
    if (ok) {
      std::mt19937_64 rng(20240901);
      std::uniform_real_distribution<double> u(-0.99, 0.99);
      int checked = 0;
      while (checked < 1000) {
        const cplx z(u(rng), u(rng));
        if (std::abs(z) > 0.99) continue;
        worst = std::max(worst, std::abs(res.g.eval(z) - res.h.eval(z) - f.eval(z)));
        ++checked;
      }
      ok = ok && worst <= 1e-12;
      for (const auto& c : res.certificates_g) ok = ok && c.pass;
      for (const auto& c : res.certificates_h) ok = ok && c.pass;
    }
    report(10, "decomposition g - h = f termwise with passing streams", ok,
           "max_dev=" + std::to_string(worst));
  }

  // ---- 11. Determinism ------------------------------------------------------
  {
    write_file(file("cfg.json"), canonical_dump(build_cfg_json));
    const int rc1 = cmd_build(build_cfg, file("s1.json"), file("r1.json"));
    const int rc2 = cmd_build(build_cfg, file("s2.json"), file("r2.json"));
    const bool ok = rc1 == kExitPass && rc2 == kExitPass &&
                    read_file(file("s1.json")) == read_file(file("s2.json")) &&
                    read_file(file("r1.json")) == read_file(file("r2.json"));
    report(11, "identical builds produce byte-identical canonical files", ok);
  }

  std::printf("acceptance: %d/11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
