#include <doctest.h>

#include <filesystem>

#include "bbm/errors.hpp"
#include "bbm/harness.hpp"
#include "bbm/io.hpp"
#include "bbm/toml_lite.hpp"

#include <json.hpp>

using namespace bbm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("toml subset parser") {
  const std::string text = R"(
# comment
experiment = "criteria"   # trailing comment
seed = 42
[initial]
kind = "abk"
L = 12.5
positions = [1.0, -2.0, 3]
[tests]
epsilon = 0.15
)";
  const auto table = toml_lite::parse(text);
  CHECK(table.at("experiment").str == "criteria");
  CHECK(table.at("seed").num == 42.0);
  CHECK(table.at("initial.kind").str == "abk");
  CHECK(table.at("initial.L").num == 12.5);
  CHECK(table.at("initial.positions").nums.size() == 3);
  CHECK(table.at("tests.epsilon").num == 0.15);

  CHECK_THROWS_AS(toml_lite::parse("key value"), ConfigError);
  CHECK_THROWS_AS(toml_lite::parse("[unterminated"), ConfigError);
  CHECK_THROWS_AS(toml_lite::parse("a = 1\na = 2"), ConfigError);
  CHECK_THROWS_AS(toml_lite::parse("a = [1, \"x\"]"), ConfigError);
}

TEST_CASE("config validation reports unknown keys and bad values") {
  CHECK_THROWS_AS(RunConfig::from_toml_text("experiment = \"nope\""), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_toml_text("mystery_key = 1"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_toml_text("experiment = \"verify\"\nreplicates = 0"),
                  ConfigError);
  CHECK_THROWS_AS(
      RunConfig::from_toml_text("[initial]\nkind = \"weird\""), ConfigError);
  try {
    RunConfig::from_toml_text("experiment = \"verify\"\n[grids]\nbogus = [1]");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("resolved config is canonical and hash-stable") {
  RunConfig a;
  RunConfig b = RunConfig::from_toml_text(a.resolved_toml());
  CHECK(a.resolved_toml() == b.resolved_toml());
}

TEST_CASE("verify smoke run completes and is schema valid") {
  RunConfig cfg;
  cfg.experiment = "verify";
  cfg.replicates = 1;
  cfg.verify_t = 1.0;
  cfg.verify_depth = 5.0;
  cfg.seed = 7;
  cfg.threads = 2;
  const fs::path out = fresh_dir("bbm_verify_smoke");
  cfg.out_dir = out.string();

  const auto report = run(cfg);
  CHECK(report.experiment == "verify");
  // Structural checks assert even in smoke mode; MC checks are report-only.
  CHECK(report.all_passed());

  const auto parsed = nlohmann::json::parse(read_text_file((out / "report.json").string()));
  for (const char* key : {"experiment", "seed", "config_hash", "code_version",
                          "replicates", "verdicts", "series", "all_passed"}) {
    CHECK(parsed.contains(key));
  }
  CHECK(parsed["verdicts"].is_array());
  CHECK(!parsed["verdicts"].empty());
  for (const auto& v : parsed["verdicts"]) {
    CHECK(v.contains("name"));
    CHECK(v.contains("verdict"));
    CHECK(v.contains("detail"));
  }
  CHECK(fs::exists(out / "config.resolved.toml"));
  CHECK(fs::exists(out / "r_stat.csv"));
  fs::remove_all(out);
}

TEST_CASE("identical configs give byte-identical outputs across thread counts") {
  RunConfig cfg;
  cfg.experiment = "criteria";
  cfg.initial_kind = "abk";
  cfg.initial_depth = 10.0;
  cfg.replicates = 40;
  cfg.seed = 33;
  cfg.grids.r_stat_s = {3.0, 6.0};
  cfg.grids.cesaro_y = {5.0, 9.0};
  cfg.grids.cubic_y = {5.0, 9.0};
  cfg.grids.tightness_lambda = {0.5, 0.1};
  cfg.grids.probe_s = {10.0};

  const fs::path out1 = fresh_dir("bbm_det_a");
  const fs::path out2 = fresh_dir("bbm_det_b");
  cfg.threads = 1;
  cfg.out_dir = out1.string();
  run(cfg);
  cfg.threads = 2;
  cfg.out_dir = out2.string();
  run(cfg);

  for (const char* name : {"r_stat.csv", "cesaro.csv", "cubic.csv", "tightness.csv",
                           "probe.csv", "report.json"}) {
    CHECK(read_text_file((out1 / name).string()) ==
          read_text_file((out2 / name).string()));
  }
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST_CASE("criteria experiment on the deterministic lattice passes the cesaro verdict") {
  RunConfig cfg;
  cfg.experiment = "criteria";
  cfg.initial_kind = "lattice";
  cfg.initial_depth = 40.0;
  cfg.seed = 5;
  cfg.threads = 2;
  const fs::path out = fresh_dir("bbm_lattice_run");
  cfg.out_dir = out.string();
  const auto report = run(cfg);
  bool found = false;
  for (const auto& v : report.verdicts) {
    if (v.name == "cesaro_approach") {
      found = true;
      CHECK(v.verdict == Verdict::supported);
    }
    if (v.name == "cesaro_ibp_identity") CHECK(v.verdict == Verdict::supported);
  }
  CHECK(found);
  fs::remove_all(out);
}

TEST_CASE("criteria experiment on the violating measure is contradicted") {
  RunConfig cfg;
  cfg.experiment = "criteria";
  cfg.initial_kind = "violating";
  cfg.initial_depth = 40.0;
  cfg.seed = 5;
  cfg.threads = 2;
  const fs::path out = fresh_dir("bbm_violating_run");
  cfg.out_dir = out.string();
  const auto report = run(cfg);
  bool found = false;
  for (const auto& v : report.verdicts) {
    if (v.name == "cesaro_approach") {
      found = true;
      CHECK(v.verdict == Verdict::contradicted);
    }
  }
  CHECK(found);
  CHECK(!report.all_passed());
  fs::remove_all(out);
}

TEST_CASE("evolve experiment in extremal mode is report-only") {
  RunConfig cfg;
  cfg.experiment = "evolve";
  cfg.evolve_mode = "extremal";
  cfg.evolve_t = 4.0;
  cfg.replicates = 30;
  cfg.seed = 77;
  cfg.threads = 2;
  cfg.grids.cubic_y = {2.0, 4.0};
  cfg.grids.shift_n = {1.0, 2.0};
  const fs::path out = fresh_dir("bbm_evolve_run");
  cfg.out_dir = out.string();
  const auto report = run(cfg);
  CHECK(report.report_only());
  CHECK(fs::exists(out / "derivative_martingale.csv"));
  CHECK(fs::exists(out / "extremal_max.csv"));
  fs::remove_all(out);
}

TEST_CASE("points-mode evolve experiment computes staircase integrals") {
  RunConfig cfg;
  cfg.experiment = "evolve";
  cfg.evolve_mode = "measure";
  cfg.initial_kind = "points";
  cfg.initial_positions = {0.0, -2.0};
  cfg.evolve_t = 1.0;
  cfg.replicates = 25;
  cfg.seed = 3;
  cfg.threads = 2;
  const fs::path out = fresh_dir("bbm_points_run");
  cfg.out_dir = out.string();
  const auto report = run(cfg);
  CHECK(report.report_only());
  CHECK(fs::exists(out / "theta_max.csv"));
  CHECK(fs::exists(out / "staircase_integral.csv"));
  fs::remove_all(out);
}

TEST_CASE("quantile summaries are monotone across the probability levels") {
  RunConfig cfg;
  cfg.experiment = "criteria";
  cfg.initial_kind = "abk";
  cfg.initial_depth = 8.0;
  cfg.replicates = 60;
  cfg.seed = 21;
  cfg.threads = 2;
  cfg.grids.r_stat_s = {2.0, 4.0};
  cfg.grids.cesaro_y = {3.0, 6.0};
  cfg.grids.cubic_y = {3.0, 6.0};
  cfg.grids.tightness_lambda = {0.5, 0.1};
  cfg.grids.probe_s = {5.0};
  const fs::path out = fresh_dir("bbm_quantiles");
  cfg.out_dir = out.string();
  const auto report = run(cfg);
  for (const auto& s : report.summaries) {
    for (const auto& qs : s.quantiles) {
      for (std::size_t i = 1; i < qs.size(); ++i) {
        CHECK(qs[i] >= qs[i - 1]);
      }
    }
  }
  fs::remove_all(out);
}
