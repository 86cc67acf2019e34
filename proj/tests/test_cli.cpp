#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "tuniv/cli_app.hpp"

using namespace tuniv;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("tuniv_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

json small_build_config() {
  return json{{"family", "radii"},
              {"tasks", json::array({json{{"m", 1},
                                          {"s", 4},
                                          {"t", 4},
                                          {"target",
                                           json{{"poly_index",
                                                 poly_index(GaussPoly::constant(Rational(1, 2)))
                                                     .str()}}},
                                          {"zeta", json{{"index", 1}}},
                                          {"curve", json{{"auto", true}}}}})},
              {"max_degree", 128},
              {"control_samples", 1024},
              {"witness_samples", 512},
              {"deterministic", true}};
}

}  // namespace

TEST_CASE("cli build / verify round trip") {
  TempDir tmp;
  write_file(tmp.file("cfg.json"), canonical_dump(small_build_config()));

  REQUIRE(run_cli({"build", "--config", tmp.file("cfg.json"), "--out", tmp.file("s.json"),
                   "--report", tmp.file("r.json")}) == kExitPass);
  REQUIRE(fs::exists(tmp.file("s.json")));
  REQUIRE(fs::exists(tmp.file("r.json")));

  CHECK(run_cli({"verify", "--series", tmp.file("s.json"), "--report",
                 tmp.file("v.json")}) == kExitPass);

  // Membership at the recorded indices passes; at a bogus scale it fails.
  const json sj = json::parse(read_file(tmp.file("s.json")));
  const json w = sj.at("witnesses").at(0);
  auto idx = [&](const std::string& k_override) {
    return std::to_string(w.at("m").get<int>()) + "," + w.at("j").get<std::string>() + "," +
           std::to_string(w.at("p").get<int>()) + "," + std::to_string(w.at("s").get<int>()) +
           "," + std::to_string(w.at("t").get<int>()) + "," +
           std::to_string(w.at("l").get<int>()) + "," + k_override + "," +
           std::to_string(w.at("n").get<int>());
  };
  CHECK(run_cli({"verify", "--series", tmp.file("s.json"), "--indices",
                 idx(std::to_string(w.at("k").get<int>()))}) == kExitPass);
  CHECK(run_cli({"verify", "--series", tmp.file("s.json"), "--indices", idx("1")}) ==
        kExitFail);  // a_1 = 1/2 pushes the window out of the disc
}

TEST_CASE("cli determinism: identical configs give byte-identical outputs") {
  TempDir tmp;
  write_file(tmp.file("cfg.json"), canonical_dump(small_build_config()));
  REQUIRE(run_cli({"build", "--config", tmp.file("cfg.json"), "--out", tmp.file("a.json"),
                   "--report", tmp.file("ar.json")}) == kExitPass);
  REQUIRE(run_cli({"build", "--config", tmp.file("cfg.json"), "--out", tmp.file("b.json"),
                   "--report", tmp.file("br.json")}) == kExitPass);
  CHECK(read_file(tmp.file("a.json")) == read_file(tmp.file("b.json")));
  CHECK(read_file(tmp.file("ar.json")) == read_file(tmp.file("br.json")));
}

TEST_CASE("cli error contract") {
  TempDir tmp;

  SECTION("malformed family kind is invalid input") {
    write_file(tmp.file("bad.json"), "{\"family\":\"moebius\",\"tasks\":[]}\n");
    CHECK(run_cli({"build", "--config", tmp.file("bad.json"), "--out",
                   tmp.file("s.json")}) == kExitInvalid);
  }

  SECTION("unparseable config is invalid input") {
    write_file(tmp.file("bad.json"), "{nope");
    CHECK(run_cli({"build", "--config", tmp.file("bad.json"), "--out",
                   tmp.file("s.json")}) == kExitInvalid);
  }

  SECTION("unknown enum kind is invalid input") {
    CHECK(run_cli({"enum", "show", "--kind", "nonsense", "--index", "1"}) == kExitInvalid);
  }

  SECTION("missing subcommand is invalid input") {
    CHECK(run_cli({}) == kExitInvalid);
  }

  SECTION("infeasible build exits with the failure code") {
    json cfg = small_build_config();
    cfg["max_degree"] = 8;
    cfg["tasks"].push_back(json{{"m", 1},
                                {"s", 64},
                                {"t", 4},
                                {"target",
                                 json{{"poly_index",
                                       poly_index(GaussPoly::constant(Rational(1))).str()}}},
                                {"zeta", json{{"index", 2}}},
                                {"curve", json{{"auto", true}}}});
    write_file(tmp.file("cfg.json"), canonical_dump(cfg));
    CHECK(run_cli({"build", "--config", tmp.file("cfg.json"), "--out", tmp.file("s.json"),
                   "--report", tmp.file("r.json")}) == kExitFail);
    CHECK(fs::exists(tmp.file("s.json")));  // partial outputs still written
  }
}

TEST_CASE("cli build with an empty task list") {
  TempDir tmp;
  json cfg = small_build_config();
  cfg["tasks"] = json::array();
  write_file(tmp.file("cfg.json"), canonical_dump(cfg));
  CHECK(run_cli({"build", "--config", tmp.file("cfg.json"), "--out", tmp.file("s.json"),
                 "--report", tmp.file("r.json")}) == kExitPass);
  const json sj = json::parse(read_file(tmp.file("s.json")));
  CHECK(sj.at("corrections").empty());
}

TEST_CASE("cli family certify") {
  TempDir tmp;
  CHECK(run_cli({"family", "certify", "--family", "radii", "--delta", "0.05", "--samples",
                 "16", "--report", tmp.file("f.json")}) == kExitPass);
  const json rep = json::parse(read_file(tmp.file("f.json")));
  CHECK(rep.at("pass").get<bool>());
  CHECK(rep.at("entries").size() == 16);

  // Single spiral: vacuous pass through its one parameter.
  CHECK(run_cli({"family", "certify", "--family", "single_spiral"}) == kExitPass);

  CHECK(run_cli({"family", "certify", "--family", "parabolas"}) == kExitInvalid);
}

TEST_CASE("cli verify version gate") {
  TempDir tmp;
  write_file(tmp.file("cfg.json"), canonical_dump(small_build_config()));
  REQUIRE(run_cli({"build", "--config", tmp.file("cfg.json"), "--out", tmp.file("s.json"),
                   "--report", tmp.file("r.json")}) == kExitPass);
  json sj = json::parse(read_file(tmp.file("s.json")));
  sj["tool_version"] = "9.9.9";
  write_file(tmp.file("old.json"), canonical_dump(sj));
  CHECK(run_cli({"verify", "--series", tmp.file("old.json")}) == kExitInvalid);
  CHECK(run_cli({"verify", "--series", tmp.file("old.json"), "--allow-version-mismatch"}) ==
        kExitPass);
}

TEST_CASE("cli decompose") {
  TempDir tmp;
  json cfg = demo_decompose_config();
  cfg["max_degree"] = 256;
  write_file(tmp.file("dec.json"), canonical_dump(cfg));
  CHECK(run_cli({"decompose", "--config", tmp.file("dec.json"), "--out-g", tmp.file("g.json"),
                 "--out-h", tmp.file("h.json"), "--report", tmp.file("dr.json")}) ==
        kExitPass);
  const json rep = json::parse(read_file(tmp.file("dr.json")));
  CHECK(rep.at("identity_ok").get<bool>());
  CHECK(rep.at("identity_max_deviation").get<double>() <= 1e-12);
}
