#pragma once

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tuniv/serialize.hpp"

namespace tuniv {

// ---------------------------------------------------------------------------
// Exit-code contract: 0 pass, 2 verification/build failure, 3 invalid input.
// ---------------------------------------------------------------------------
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 2;
inline constexpr int kExitInvalid = 3;

struct RunConfig {
  CurveFamily family;
  std::vector<Task> tasks;
  BuildOptions options;
  bool deterministic = true;
  json normalized;  // effective config document (defaults filled in)
  std::string hash;
};

namespace cli_detail {

inline json options_to_json(const BuildOptions& o, bool deterministic) {
  return json{{"max_degree", o.max_degree},
              {"control_samples", o.verify.n_control},
              {"witness_samples", o.witness_control_n},
              {"k_max", o.verify.k_max},
              {"n_max", o.verify.n_max},
              {"anchor_n_max", o.anchor_n_max},
              {"subfamily_depth", o.subfamily.max_depth},
              {"deterministic", deterministic}};
}

inline void options_from_json(const json& j, BuildOptions& o, bool& deterministic) {
  if (j.contains("max_degree")) o.max_degree = j.at("max_degree").get<int>();
  if (j.contains("control_samples")) o.verify.n_control = j.at("control_samples").get<int>();
  if (j.contains("witness_samples"))
    o.witness_control_n = j.at("witness_samples").get<int>();
  if (j.contains("k_max")) o.verify.k_max = j.at("k_max").get<std::uint64_t>();
  if (j.contains("n_max")) o.verify.n_max = j.at("n_max").get<std::uint64_t>();
  if (j.contains("anchor_n_max"))
    o.anchor_n_max = j.at("anchor_n_max").get<std::uint64_t>();
  if (j.contains("subfamily_depth")) {
    o.subfamily.max_depth = j.at("subfamily_depth").get<int>();
    o.verify.subfamily.max_depth = o.subfamily.max_depth;
  }
  if (j.contains("deterministic")) deterministic = j.at("deterministic").get<bool>();
  if (o.max_degree < 1 || o.verify.n_control < 1 || o.witness_control_n < 1)
    throw std::invalid_argument("config: limits must be positive");
}

inline RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  cfg.family = family_from_json(j.at("family"));
  if (j.contains("tasks"))
    for (const auto& tj : j.at("tasks")) cfg.tasks.push_back(task_from_json(tj));
  options_from_json(j, cfg.options, cfg.deterministic);
  for (const auto& task : cfg.tasks) task.validate(cfg.family);

  cfg.normalized = options_to_json(cfg.options, cfg.deterministic);
  cfg.normalized["family"] = family_to_json(cfg.family);
  json tasks = json::array();
  for (const auto& task : cfg.tasks) tasks.push_back(task_to_json(task));
  cfg.normalized["tasks"] = tasks;
  cfg.hash = fnv1a_hex(canonical_dump(cfg.normalized));
  return cfg;
}

inline std::vector<double> alpha_grid(const CurveFamily& family, int n) {
  const Interval& J = family.param_interval;
  std::vector<double> grid;
  if (J.is_singleton()) {
    grid.push_back(J.lo);
    return grid;
  }
  if (J.bounded()) {
    for (int i = 0; i < n; ++i) grid.push_back(J.lo + (J.hi - J.lo) * i / double(n));
  } else {
    for (int i = 0; i < n; ++i) grid.push_back(J.from_unit((i + 0.5) / double(n)));
  }
  return grid;
}

}  // namespace cli_detail

// ---------------------------------------------------------------------------
// Subcommand bodies (shared by the CLI binary and the in-process tests)
// ---------------------------------------------------------------------------

inline int cmd_family_certify(const CurveFamily& family, double delta, unsigned j,
                              int samples, const std::string& report_path) {
  const auto grid = cli_detail::alpha_grid(family, samples);
  const ContinuityReport rep = certify_continuous(family, delta, j, grid);

  json effective{{"command", "family certify"},
                 {"family", family_to_json(family)},
                 {"delta", delta},
                 {"j", j},
                 {"samples", samples}};
  json out = continuity_report_to_json(rep);
  out["config_hash"] = fnv1a_hex(canonical_dump(effective));
  if (!report_path.empty()) write_file(report_path, canonical_dump(out));

  std::size_t ok = 0;
  for (const auto& e : rep.entries) ok += e.ok ? 1 : 0;
  std::printf("family certify: %s delta=%g truncation=%u witnesses=%zu/%zu -> %s\n",
              family.name.c_str(), delta, j, ok, rep.entries.size(),
              rep.pass ? "PASS" : "FAIL");
  return rep.pass ? kExitPass : kExitFail;
}

inline int cmd_enum_show(const std::string& kind, const std::string& index) {
  json out;
  if (kind == "scale") {
    const std::uint64_t k = std::stoull(index);
    const Rational d = scale_fraction(k);
    out = json{{"kind", "scale"}, {"index", k}, {"fraction", d.str()}, {"value", d.value()}};
  } else if (kind == "boundary") {
    const std::uint64_t p = std::stoull(index);
    out = json{{"kind", "boundary"},
               {"index", p},
               {"turn", boundary_turn(p).str()},
               {"point", to_json(boundary_point(p))}};
  } else if (kind == "poly") {
    const GaussPoly g = poly(bigint(index));
    json coeffs = json::array();
    for (const auto& [re, im] : g.coeffs)
      coeffs.push_back(json{{"re", re.str()}, {"im", im.str()}});
    out = json{{"kind", "poly"},
               {"index", index},
               {"degree", g.degree()},
               {"coeffs", coeffs},
               {"zero", g.is_zero()}};
  } else if (kind == "tuple") {
    const auto t = tuple_at(bigint(index));
    out = json{{"kind", "tuple"},
               {"index", index},
               {"value", json::array({t[0], t[1], t[2], t[3], t[4], t[5]})},
               {"names", json::array({"m", "j", "p", "s", "t", "l"})}};
  } else {
    throw std::invalid_argument("enum show: unknown kind " + kind);
  }
  std::fputs(canonical_dump(out).c_str(), stdout);
  return kExitPass;
}

inline int cmd_build(const RunConfig& cfg, const std::string& out_path,
                     const std::string& report_path) {
  const BuildResult res = build_universal(cfg.family, cfg.tasks, cfg.options);

  write_file(out_path, canonical_dump(series_to_json(res.series, cfg.hash)));
  json certs = json::array();
  bool all_pass = !res.certificates.empty() || cfg.tasks.empty();
  for (const auto& c : res.certificates) {
    certs.push_back(certificate_to_json(c, cfg.hash));
    all_pass = all_pass && c.pass;
  }
  json report{{"format_version", kFormatVersion},
              {"tool_version", kToolVersion},
              {"config_hash", cfg.hash},
              {"success", res.success},
              {"diagnostic", res.diagnostic},
              {"certificates", certs}};
  if (!report_path.empty()) write_file(report_path, canonical_dump(report));

  for (const auto& c : res.certificates)
    std::printf("task %zu: error=%.6e margin=%.6e |b-zeta|=%.6e (k=%llu n=%llu) %s\n",
                c.witness.task_index, c.witness.achieved_error, c.margin, c.witness.b_dist,
                static_cast<unsigned long long>(c.witness.k),
                static_cast<unsigned long long>(c.witness.n), c.pass ? "PASS" : "FAIL");
  if (!res.success) {
    std::printf("build: FAIL (%s)\n", res.diagnostic.c_str());
    return kExitFail;
  }
  std::printf("build: %zu corrections, config %s -> %s\n", res.series.corrections.size(),
              cfg.hash.c_str(), all_pass ? "PASS" : "FAIL");
  return all_pass ? kExitPass : kExitFail;
}

inline int cmd_verify(const std::string& series_path, const std::string& task_path,
                      const std::string& indices_csv, const std::string& report_path,
                      int control_samples, bool allow_version_mismatch) {
  const json sj = json::parse(read_file(series_path));
  const UniversalSeries series = series_from_json(sj, allow_version_mismatch);
  const CurveFamily family = family_by_name(series.family_name);
  VerifyOptions vopt;
  if (control_samples > 0) vopt.n_control = control_samples;
  Verifier verifier(family, vopt);
  const EvalFn f = series.evaluator();
  const std::string config_hash = sj.value("config_hash", "");

  json report{{"format_version", kFormatVersion},
              {"tool_version", kToolVersion},
              {"config_hash", config_hash},
              {"series", series_path}};
  bool pass = true;

  if (!indices_csv.empty()) {
    MembershipIndices idx;
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : indices_csv) {
      if (ch == ',') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
    if (parts.size() != 8)
      throw std::invalid_argument("--indices needs 8 comma-separated values m,j,p,s,t,l,k,n");
    idx.m = std::stoull(parts[0]);
    idx.j = bigint(parts[1]);
    idx.p = std::stoull(parts[2]);
    idx.s = std::stoull(parts[3]);
    idx.t = std::stoull(parts[4]);
    idx.l = std::stoull(parts[5]);
    idx.k = std::stoull(parts[6]);
    idx.n = std::stoull(parts[7]);
    const MembershipResult r = verifier.membership(f, idx);
    pass = r.pass;
    report["membership"] = json{{"pass", r.pass},     {"error", r.error},
                                {"margin", r.margin}, {"b_dist", r.b_dist},
                                {"a", r.a},           {"b", to_json(r.b)},
                                {"reason", r.reason}};
    std::printf("membership (m=%llu p=%llu s=%llu t=%llu l=%llu k=%llu n=%llu): "
                "error=%.6e margin=%.6e %s\n",
                static_cast<unsigned long long>(idx.m), static_cast<unsigned long long>(idx.p),
                static_cast<unsigned long long>(idx.s), static_cast<unsigned long long>(idx.t),
                static_cast<unsigned long long>(idx.l), static_cast<unsigned long long>(idx.k),
                static_cast<unsigned long long>(idx.n), r.error, r.margin,
                r.pass ? "PASS" : "FAIL");
  } else if (!task_path.empty()) {
    const Task task = task_from_json(json::parse(read_file(task_path)));
    const Certificate c = verifier.verify_target(f, task);
    pass = c.pass;
    report["certificate"] = certificate_to_json(c, config_hash);
    std::printf("verify_target: %s (error=%.6e margin=%.6e k=%llu n=%llu)\n",
                c.pass ? "PASS" : "FAIL", c.witness.achieved_error, c.margin,
                static_cast<unsigned long long>(c.witness.k),
                static_cast<unsigned long long>(c.witness.n));
  } else {
    json certs = json::array();
    for (const Witness& w : series.witnesses) {
      const Task task = task_from_witness(w);
      const Certificate c = verifier.certify_witness(f, task, w);
      pass = pass && c.pass;
      certs.push_back(certificate_to_json(c, config_hash));
      std::printf("witness %zu: error=%.6e margin=%.6e %s\n", w.task_index,
                  c.witness.achieved_error, c.margin, c.pass ? "PASS" : "FAIL");
    }
    report["certificates"] = certs;
  }
  report["pass"] = pass;
  if (!report_path.empty()) write_file(report_path, canonical_dump(report));
  std::printf("verify: %s\n", pass ? "PASS" : "FAIL");
  return pass ? kExitPass : kExitFail;
}

inline int cmd_decompose(const json& cj, const std::string& out_g, const std::string& out_h,
                         const std::string& report_path) {
  const CurveFamily family = family_from_json(cj.at("family"));
  std::vector<Task> tasks_g, tasks_h;
  for (const auto& tj : cj.at("tasks_g")) tasks_g.push_back(task_from_json(tj));
  for (const auto& tj : cj.at("tasks_h")) tasks_h.push_back(task_from_json(tj));
  BuildOptions opt;
  bool deterministic = true;
  cli_detail::options_from_json(cj, opt, deterministic);

  UniversalSeries f;
  f.family_name = family.name;
  const json& fj = cj.at("f");
  if (fj.contains("coeffs")) {
    std::vector<cplx> coeffs;
    for (const auto& c : fj.at("coeffs")) coeffs.push_back(cplx_from_json(c));
    const Polynomial p = Polynomial::from_coeffs(std::move(coeffs));
    if (!p.is_zero()) f.corrections.push_back(p);
  } else {
    f = series_from_json(json::parse(read_file(fj.at("series").get<std::string>())));
  }

  const std::string hash = fnv1a_hex(canonical_dump(cj));
  const DecomposeResult res = decompose(f, tasks_g, tasks_h, family, opt);

  write_file(out_g, canonical_dump(series_to_json(res.g, hash)));
  write_file(out_h, canonical_dump(series_to_json(res.h, hash)));

  // Termwise identity g - h = f, checked at deterministic sample points.
  std::mt19937_64 rng(20240901);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  double worst = 0.0;
  int checked = 0;
  while (checked < 1000) {
    const cplx z(u(rng), u(rng));
    if (std::abs(z) > 0.99) continue;
    worst = std::max(worst, std::abs(res.g.eval(z) - res.h.eval(z) - f.eval(z)));
    ++checked;
  }
  const bool identity_ok = worst <= 1e-12;

  bool certs_ok = true;
  json cg = json::array(), ch = json::array();
  for (const auto& c : res.certificates_g) {
    certs_ok = certs_ok && c.pass;
    cg.push_back(certificate_to_json(c, hash));
  }
  for (const auto& c : res.certificates_h) {
    certs_ok = certs_ok && c.pass;
    ch.push_back(certificate_to_json(c, hash));
  }
  const bool pass = res.success && identity_ok && certs_ok;

  json report{{"format_version", kFormatVersion},
              {"tool_version", kToolVersion},
              {"config_hash", hash},
              {"success", res.success},
              {"diagnostic", res.diagnostic},
              {"identity_max_deviation", worst},
              {"identity_ok", identity_ok},
              {"certificates_g", cg},
              {"certificates_h", ch},
              {"pass", pass}};
  if (!report_path.empty()) write_file(report_path, canonical_dump(report));

  std::printf("decompose: identity deviation %.3e over 1000 points, certificates %s -> %s\n",
              worst, certs_ok ? "PASS" : "FAIL", pass ? "PASS" : "FAIL");
  return pass ? kExitPass : (res.success ? kExitFail : kExitFail);
}

inline json demo_build_config() {
  GaussPoly half_z;
  half_z.coeffs = {{Rational(0), Rational(0)}, {Rational(1, 2), Rational(0)}};
  auto task = [](std::uint64_t s, std::uint64_t p, const bigint& j) {
    return json{{"m", 1},
                {"s", s},
                {"t", 8},
                {"target", json{{"poly_index", j.str()}}},
                {"zeta", json{{"index", p}}},
                {"curve", json{{"auto", true}}}};
  };
  return json{{"family", "radii"},
              {"tasks", json::array({task(8, 1, poly_index(half_z)),
                                     task(4, 2, poly_index(GaussPoly::constant(Rational(1, 4)))),
                                     task(2, 3, poly_index(GaussPoly::constant(Rational(3, 16))))})},
              {"max_degree", 512},
              {"control_samples", 2048},
              {"witness_samples", 1024},
              {"deterministic", true}};
}

inline json demo_decompose_config() {
  auto task = [](std::uint64_t p, const bigint& j) {
    return json{{"m", 1},
                {"s", 4},
                {"t", 4},
                {"target", json{{"poly_index", j.str()}}},
                {"zeta", json{{"index", p}}},
                {"curve", json{{"auto", true}}}};
  };
  return json{{"family", "radii"},
              {"f", json{{"coeffs", json::array({json::array({1.0, 0.0})})}}},
              {"tasks_g", json::array({task(1, poly_index(GaussPoly::constant(Rational(1, 4))))})},
              {"tasks_h", json::array({task(2, poly_index(GaussPoly::constant(Rational(1, 4))))})},
              {"max_degree", 512},
              {"control_samples", 2048},
              {"deterministic", true}};
}

inline int cmd_demo(const std::string& outdir) {
  namespace fs = std::filesystem;
  fs::create_directories(outdir);
  const std::string cfg_path = outdir + "/demo_config.json";
  const std::string series_path = outdir + "/demo_series.json";
  const std::string build_report = outdir + "/demo_build_report.json";
  const std::string verify_report = outdir + "/demo_verify_report.json";
  const std::string family_report = outdir + "/demo_family_report.json";
  const std::string dec_cfg_path = outdir + "/demo_decompose_config.json";

  const json cfg_json = demo_build_config();
  write_file(cfg_path, canonical_dump(cfg_json));
  const json dec_json = demo_decompose_config();
  write_file(dec_cfg_path, canonical_dump(dec_json));

  int rc = cmd_family_certify(radii_family(), 0.05, 1, 64, family_report);
  if (rc != kExitPass) return rc;

  const RunConfig cfg = cli_detail::run_config_from_json(cfg_json);
  rc = cmd_build(cfg, series_path, build_report);
  if (rc != kExitPass) return rc;

  rc = cmd_verify(series_path, "", "", verify_report, 0, false);
  if (rc != kExitPass) return rc;

  rc = cmd_decompose(dec_json, outdir + "/demo_g.json", outdir + "/demo_h.json",
                     outdir + "/demo_decompose_report.json");
  if (rc != kExitPass) return rc;

  std::printf("demo: all stages PASS (outputs in %s)\n", outdir.c_str());
  return kExitPass;
}

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

inline int run_cli(std::vector<std::string> args) {
  CLI::App app{"Constructive universal series with prescribed approximation curves"};
  app.require_subcommand(1);

  // family certify
  auto* family_cmd = app.add_subcommand("family", "curve family operations");
  family_cmd->require_subcommand(1);
  auto* certify = family_cmd->add_subcommand("certify", "certify continuity of a family");
  std::string certify_family = "radii";
  double certify_delta = 0.05;
  unsigned certify_j = 1;
  int certify_samples = 64;
  std::string certify_report, certify_config;
  certify->add_option("--family", certify_family, "family name");
  certify->add_option("--delta", certify_delta, "r-distance tolerance");
  certify->add_option("--truncation", certify_j, "modulus truncation j");
  certify->add_option("--samples", certify_samples, "alpha grid size");
  certify->add_option("--report", certify_report, "report file");
  certify->add_option("--config", certify_config, "JSON config with family/delta/j/samples");

  // enum show
  auto* enum_cmd = app.add_subcommand("enum", "enumeration decoders");
  enum_cmd->require_subcommand(1);
  auto* show = enum_cmd->add_subcommand("show", "decode one enumeration index");
  std::string show_kind, show_index;
  show->add_option("--kind", show_kind, "scale|boundary|poly|tuple")->required();
  show->add_option("--index", show_index, "index (decimal, arbitrary size)")->required();

  // build
  auto* build = app.add_subcommand("build", "construct a universal series");
  std::string build_config, build_out, build_report;
  int build_max_degree = 0, build_control = 0;
  std::uint64_t seed = 0;
  build->add_option("--config", build_config, "build config JSON")->required();
  build->add_option("--out", build_out, "series output file")->required();
  build->add_option("--report", build_report, "certificates report file");
  build->add_option("--max-degree", build_max_degree, "override config max degree");
  build->add_option("--control-samples", build_control, "override verifier grid size");
  build->add_option("--seed", seed, "reserved; ignored under the deterministic flag");

  // verify
  auto* verify = app.add_subcommand("verify", "verify a series against tasks or indices");
  std::string verify_series, verify_task, verify_indices, verify_report;
  int verify_control = 0;
  bool allow_mismatch = false;
  verify->add_option("--series", verify_series, "series file")->required();
  verify->add_option("--task", verify_task, "task JSON file (witness search)");
  verify->add_option("--indices", verify_indices, "m,j,p,s,t,l,k,n membership check");
  verify->add_option("--report", verify_report, "report file");
  verify->add_option("--control-samples", verify_control, "control grid size");
  verify->add_flag("--allow-version-mismatch", allow_mismatch,
                   "accept series written by another tool version");

  // decompose
  auto* dec = app.add_subcommand("decompose", "split f into a difference g - h");
  std::string dec_config, dec_out_g, dec_out_h, dec_report;
  dec->add_option("--config", dec_config, "decompose config JSON")->required();
  dec->add_option("--out-g", dec_out_g, "g series output")->required();
  dec->add_option("--out-h", dec_out_h, "h series output")->required();
  dec->add_option("--report", dec_report, "report file");

  // demo
  auto* demo = app.add_subcommand("demo", "end-to-end pipeline into a directory");
  std::string demo_outdir = "demo_out";
  demo->add_option("--outdir", demo_outdir, "output directory");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (certify->parsed()) {
      CurveFamily family = family_by_name(certify_family);
      if (!certify_config.empty()) {
        const json cj = json::parse(read_file(certify_config));
        family = family_from_json(cj.at("family"));
        certify_delta = cj.value("delta", certify_delta);
        certify_j = cj.value("j", certify_j);
        certify_samples = cj.value("samples", certify_samples);
      }
      return cmd_family_certify(family, certify_delta, certify_j, certify_samples,
                                certify_report);
    }
    if (show->parsed()) return cmd_enum_show(show_kind, show_index);
    if (build->parsed()) {
      json cj = json::parse(read_file(build_config));
      if (build_max_degree > 0) cj["max_degree"] = build_max_degree;
      if (build_control > 0) cj["control_samples"] = build_control;
      const RunConfig cfg = cli_detail::run_config_from_json(cj);
      const std::string report = build_report.empty()
                                     ? build_out + ".certificates.json"
                                     : build_report;
      return cmd_build(cfg, build_out, report);
    }
    if (verify->parsed())
      return cmd_verify(verify_series, verify_task, verify_indices, verify_report,
                        verify_control, allow_mismatch);
    if (dec->parsed())
      return cmd_decompose(json::parse(read_file(dec_config)), dec_out_g, dec_out_h,
                           dec_report);
    if (demo->parsed()) return cmd_demo(demo_outdir);
  } catch (const certification_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFail;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace tuniv
