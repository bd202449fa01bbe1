#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bbm/bbm_engine.hpp"
#include "bbm/doa.hpp"
#include "bbm/initial_conditions.hpp"
#include "bbm/stats.hpp"

namespace bbm {

struct GridConfig {
  std::vector<double> r_stat_s = {10.0, 30.0, 90.0};
  std::vector<double> cesaro_y = {10.0, 20.0, 40.0};
  std::vector<double> cubic_y = {10.0, 20.0, 30.0};
  std::vector<double> tightness_lambda = {0.5, 0.1, 0.02};
  std::vector<double> probe_s = {10.0, 100.0};
  std::vector<double> shift_n = {2.0, 3.0, 4.0};
};

struct FkppRunConfig {
  double dx = 0.05;
  double dt = 0.01;
  double front_t_max = 100.0;
  // The limit constant converges like C - c/sqrt(r); around r = 100 the
  // r-vs-2r stability flag lands inside its 10% tolerance.
  double c_of_f_r = 100.0;
  std::vector<double> stair_c = {1.0};
  std::vector<double> stair_b = {0.0};
  std::vector<double> tail_audit_t;
};

struct TauberianRunConfig {
  std::string g_kind = "abk_sqrt";  // power | abk_sqrt | pareto_power
  double rho = 1.5;
  double coeff = 1.0;
  std::vector<double> lambda_grid = {0.3, 0.1, 0.03, 0.01};
  std::vector<double> x_grid = {100.0, 400.0, 1600.0};
  double alpha = 1.0;  // modulation parameters for the kronecker check
  double beta = 0.5;
  std::vector<double> kronecker_t = {5.0, 10.0, 20.0, 40.0};
};

struct ToleranceConfig {
  double epsilon = 0.15;          // conv-in-prob tolerance for r_stat
  double cubic_rel_tol = 0.05;    // ensemble-mean tolerance for cubic_stat
  double tightness_rel_tol = 0.05;
  double q95_cv_max = 0.25;       // quantile-stability cap
  double cesaro_rel_tol = 0.02;   // deterministic cesaro tolerance
};

struct RunConfig {
  std::string experiment = "verify";  // evolve|criteria|fkpp|tauberian|verify
  std::uint64_t seed = 1;
  int replicates = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::string out_dir = "out";

  // Initial condition.
  std::string initial_kind = "abk";  // abk|modulated|lattice|violating|file|points
  double initial_depth = 40.0;       // window depth L
  double initial_alpha = 0.0;
  double initial_beta = 1.0;
  std::string initial_path;
  std::vector<double> initial_positions;  // kind = points
  double exact_cell_cap = 4096.0;
  int subcells_per_unit = 256;

  // Evolution parameters.
  double evolve_t = 1.0;
  double barrier_gap = 30.0;  // 0 disables culling
  double step_cap = 5e7;
  double sync_interval = 0.5;
  std::string evolve_mode = "extremal";  // extremal | measure
  std::string centering = "m_t_plus_logZ";

  GridConfig grids;
  FkppRunConfig fkpp;
  TauberianRunConfig tauberian;
  ToleranceConfig tol;

  double verify_t = 1.0;
  double verify_depth = 5.0;

  static RunConfig from_toml_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
  // Canonical serialization of every effective setting; reports embed its
  // hash so each number is reproducible from (config, seed) alone.
  std::string resolved_toml() const;

  InitialSpec make_initial_spec() const;
  EvolveConfig make_evolve_config(std::uint64_t replicate_seed) const;
  bool initial_is_deterministic() const;
};

struct VerdictEntry {
  std::string name;
  Verdict verdict = Verdict::inconclusive;
  std::string detail;
  bool report_only = false;
};

struct SeriesQuantiles {
  std::string statistic;
  std::vector<double> parameters;
  // One row per parameter: 5/25/50/75/95 percentiles over replicates.
  std::vector<std::vector<double>> quantiles;
  std::optional<double> target;
};

struct EnsembleReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string code_version;
  int replicates = 0;
  std::vector<SeriesQuantiles> summaries;
  std::vector<VerdictEntry> verdicts;

  bool report_only() const;
  bool all_passed() const;
  std::string to_json() const;
};

// Executes the configured experiment, writing report.json,
// config.resolved.toml and one CSV per statistic series into out_dir.
// Returns the report. Exit-code semantics for callers: 0 when all verdicts
// pass or the run is report-only, 1 otherwise.
EnsembleReport run(const RunConfig& config);

// Replicate-indexed parallel map with scheduling-independent results.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace bbm
