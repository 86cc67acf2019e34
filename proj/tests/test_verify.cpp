#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "tuniv/builder.hpp"
#include "tuniv/verify.hpp"

using namespace tuniv;

namespace {

const bigint j_zero = 1;                                           // zero polynomial
const bigint j_one = poly_index(GaussPoly::constant(Rational(1)));  // constant 1

MembershipIndices small_indices() {
  // Window 0.25 * L_1 + 0.5: comfortably inside the disc, anchor d_1 = 1/2
  // on the radius toward zeta_1 = 1.
  MembershipIndices idx;
  idx.m = 1;
  idx.j = j_zero;
  idx.p = 1;
  idx.s = 2;
  idx.t = 1;
  idx.l = 1;
  idx.k = 2;  // a = 1/4
  idx.n = 1;  // b = 1/2
  return idx;
}

Task task_for(const MembershipIndices& idx) {
  Task task;
  task.m = idx.m;
  task.target_index = idx.j;
  task.s = idx.s;
  task.t = idx.t;
  task.zeta_index = idx.p;
  task.curve_l = idx.l;
  return task;
}

}  // namespace

TEST_CASE("membership predicate") {
  Verifier v(radii_family());

  SECTION("matching constants pass with full margin") {
    MembershipIndices idx = small_indices();
    idx.j = j_one;
    const auto r = v.membership([](cplx) { return cplx(1.0, 0.0); }, idx);
    CHECK(r.pass);
    CHECK(std::abs(r.margin - 0.5) < 1e-15);
  }

  SECTION("zero against constant one fails with unit error") {
    MembershipIndices idx = small_indices();
    idx.j = j_one;
    const auto r = v.membership([](cplx) { return cplx(0.0, 0.0); }, idx);
    CHECK_FALSE(r.pass);
    CHECK(std::abs(r.error - 1.0) < 1e-15);
  }

  SECTION("window escaping the disc fails with a reason") {
    MembershipIndices idx = small_indices();
    idx.k = 1;   // a = 1/2
    idx.n = 15;  // b = 15/16: a m + |b| = 23/16 >= 1
    const auto r = v.membership([](cplx) { return cplx(0.0, 0.0); }, idx);
    CHECK_FALSE(r.pass);
    CHECK_FALSE(r.window_in_disc);
    CHECK(r.reason == "window escapes the unit disc");
  }

  SECTION("anchor proximity to zeta is enforced") {
    MembershipIndices idx = small_indices();
    idx.t = 4;  // |b - zeta| = 1/2 >= 1/4
    const auto r = v.membership([](cplx) { return cplx(0.0, 0.0); }, idx);
    CHECK_FALSE(r.pass);
    CHECK(r.reason == "anchor not within 1/t of zeta");
  }

  SECTION("monotone in the accuracy index") {
    MembershipIndices idx = small_indices();
    idx.j = j_one;
    auto f = [](cplx z) { return cplx(1.0, 0.0) + 0.05 * z; };
    const auto tight = v.membership(f, idx);
    REQUIRE(tight.pass);
    MembershipIndices looser = idx;
    looser.s = 1;
    CHECK(v.membership(f, looser).pass);
  }
}

TEST_CASE("relaxed membership tube checks") {
  Verifier v(radii_family());
  MembershipIndices idx = small_indices();
  idx.j = j_one;
  auto f = [](cplx) { return cplx(1.0, 0.0); };
  const std::uint64_t h = 20;

  const cplx on_curve = cplx(0.5, 0.0);
  CHECK(v.relaxed_membership(f, idx, on_curve, h).pass);

  // Displaced half the tube width off the curve: still inside.
  const cplx near_curve = on_curve + cplx(0.0, 1.0 / (2.0 * double(h)));
  CHECK(v.relaxed_membership(f, idx, near_curve, h).pass);

  // Displaced twice the tube width: rejected by the curve-distance check.
  const cplx far_curve = on_curve + cplx(0.0, 2.0 / double(h));
  const auto r = v.relaxed_membership(f, idx, far_curve, h);
  CHECK_FALSE(r.pass);
  CHECK(r.reason == "witness farther than 1/h from the curve");

  // Agreement with the strict predicate for on-curve witnesses, any h.
  for (std::uint64_t hh : {1, 10, 100, 10000})
    CHECK(v.relaxed_membership(f, idx, on_curve, hh).pass ==
          v.membership(f, idx).pass);
}

TEST_CASE("verify_target scans deterministically") {
  Verifier v(radii_family());

  SECTION("zero target on zero function passes immediately") {
    Task task = task_for(small_indices());
    const Certificate c = v.verify_target([](cplx) { return cplx(0.0, 0.0); }, task);
    REQUIRE(c.pass);
    CHECK(c.witness.achieved_error == 0.0);
    // Deterministic: scanning again gives the identical witness.
    const Certificate c2 = v.verify_target([](cplx) { return cplx(0.0, 0.0); }, task);
    CHECK(c2.witness.k == c.witness.k);
    CHECK(c2.witness.n == c.witness.n);
  }

  SECTION("impossible target reports best margin") {
    Task task = task_for(small_indices());
    task.target_index = j_one;
    task.s = 2;
    VerifyOptions opt;
    opt.k_max = 4;
    opt.n_max = 4;
    Verifier tight(radii_family(), opt);
    const Certificate c = tight.verify_target([](cplx) { return cplx(0.0, 0.0); }, task);
    CHECK_FALSE(c.pass);
    CHECK(c.margin <= -0.5);  // best margin 1/2 - 1 = -1/2
  }

  SECTION("witnesses of a built series are found at or before the recorded pair") {
    BuildOptions opt;
    opt.max_degree = 256;
    Task task = task_for(small_indices());
    task.target_index = poly_index(GaussPoly::constant(Rational(1, 2)));
    task.s = 4;
    task.t = 4;
    const BuildResult res = build_universal(radii_family(), {task}, opt);
    REQUIRE(res.success);
    const Witness& placed = res.series.witnesses[0];
    const Certificate c =
        v.verify_target([&](cplx z) { return res.series.eval(z); }, task, placed.l);
    REQUIRE(c.pass);
    const bool at_or_before = c.witness.k < placed.k ||
                              (c.witness.k == placed.k && c.witness.n <= placed.n);
    CHECK(at_or_before);
  }
}

TEST_CASE("openness margin") {
  Verifier v(radii_family());
  MembershipIndices idx = small_indices();
  idx.j = j_one;

  SECTION("constant-on-constant has margin 1/s") {
    const double d = v.openness_margin([](cplx) { return cplx(1.0, 0.0); }, idx);
    CHECK(std::abs(d - 0.5) < 1e-15);
  }

  SECTION("perturbations under the margin keep membership, big ones break it") {
    auto f = [](cplx z) { return cplx(1.0, 0.0) + 0.1 * z; };
    const double d = v.openness_margin(f, idx);
    REQUIRE(d > 0.0);

    auto below = [&](cplx z) { return f(z) + cplx(d / 2.0, 0.0); };
    CHECK(v.membership(below, idx).pass);

    auto above = [&](cplx z) { return f(z) + cplx(2.0 * d, 0.0); };
    CHECK_FALSE(v.membership(above, idx).pass);
  }

  SECTION("failing membership is a usage error") {
    CHECK_THROWS_AS(v.openness_margin([](cplx) { return cplx(5.0, 0.0); }, idx),
                    std::invalid_argument);
  }
}

TEST_CASE("witness snapping") {
  const auto radii = radii_family();
  BuildOptions bopt;
  bopt.max_degree = 256;

  // Single-task build with a degree-1 target: p(z) = z/2 keeps the series'
  // derivative (and with it the snap radius) nontrivial.
  GaussPoly gp;
  gp.coeffs = {{Rational(0), Rational(0)}, {Rational(1, 2), Rational(0)}};
  Task task;
  task.m = 1;
  task.s = 2;
  task.t = 2;
  task.zeta_index = 1;
  task.target_index = poly_index(gp);

  const BuildResult res = build_universal(radii, {task}, bopt);
  REQUIRE(res.success);
  const Witness& w = res.series.witnesses[0];

  Verifier v(radii);

  SECTION("builder witnesses satisfy the snap margin hypothesis") {
    const auto der = v.snap_derivation(res.series, w.a, w.b, task);
    CHECK(der.d > 0.0);
    CHECK(der.delta > 0.0);
    CHECK(der.delta <= der.d / 2.0);

    // Perturb within delta/4 and recover a passing certificate at 1/s.
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int it = 0; it < 5; ++it) {
      const double da = der.delta / 8.0 * u(rng);
      const cplx db = der.delta / 8.0 * cplx(u(rng), u(rng)) / std::sqrt(2.0);
      const auto snap = v.snap_witness(res.series, w.a + da, w.b + db, task, w.l);
      CHECK(snap.certificate.pass);
      CHECK(snap.certificate.witness.achieved_error < 1.0 / double(task.s));
      CHECK(scale(snap.k) == snap.certificate.witness.a);
    }
  }

  SECTION("zero margin is a usage error") {
    // A scale/anchor pair violating the 1/(2s) hypothesis: evaluate against
    // a wrong target.
    Task wrong = task;
    wrong.target_index = poly_index(GaussPoly::constant(Rational(7)));
    CHECK_THROWS_AS(v.snap_witness(res.series, w.a, w.b, wrong, w.l),
                    std::invalid_argument);
  }

  SECTION("constant series snaps trivially") {
    UniversalSeries flat;
    flat.family_name = "radii";
    flat.corrections.push_back(Polynomial::constant(cplx(0.25, 0.0)));
    Task ct;
    ct.m = 1;
    ct.s = 2;
    ct.t = 2;
    ct.zeta_index = 1;
    ct.target_index = poly_index(GaussPoly::constant(Rational(1, 4)));
    const auto snap = v.snap_witness(flat, 0.15, cplx(0.8, 0.01), ct, 1);
    CHECK(snap.certificate.pass);
    CHECK(snap.certificate.witness.achieved_error < 1e-12);
  }
}

TEST_CASE("verifier independence from builder grids") {
  // The verifier's control grid shares no point with the builder's fit or
  // control grids on the same window.
  BuildOptions bopt;
  VerifyOptions vopt;
  const int n_fit = 512;
  const auto fit_grid = sample_disk_boundary(Disk{cplx(0, 0), 1.0}, n_fit, 0.0);
  const auto builder_ctrl =
      sample_disk_boundary(Disk{cplx(0, 0), 1.0}, bopt.witness_control_n,
                           bopt.witness_control_phase);
  const auto verify_ctrl =
      sample_disk_boundary(Disk{cplx(0, 0), 1.0}, vopt.n_control, vopt.phase);
  for (const auto& zv : verify_ctrl) {
    for (const auto& zf : fit_grid) CHECK(std::abs(zv - zf) > 1e-9);
    for (const auto& zb : builder_ctrl) CHECK(std::abs(zv - zb) > 1e-9);
  }
}
