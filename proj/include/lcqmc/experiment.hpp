#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcqmc/embedding.hpp"
#include "lcqmc/qmc.hpp"

namespace lcqmc {

inline constexpr const char* kCodeVersion = "0.1.0";

struct EmbeddingSection {
  std::string scheme = "random";  // random | uniform | none
  double k = 1.0;
  double j_ferro = -2.0;
  std::vector<std::uint64_t> realization_seeds = {1};
};

struct QmcSection {
  std::string mode = "lc";
  long sweeps = 1L << 14;
  long thermalization = 1000;
  int ell = 0;  // 0 = default by embedding size
  int measure_every = 1;
  std::uint64_t master_seed = 1;
};

struct OutputSection {
  std::string directory = "outputs";
  std::vector<std::string> formats = {"tsv", "json"};
};

struct ExperimentConfig {
  int side = 2;
  EmbeddingSection embedding;
  std::vector<double> gamma_list;
  double beta = 1.0;
  QmcSection qmc;
  OutputSection outputs;

  void validate() const;
  // Explicit ell, or 150 for K=1 and 250 for K<=2; larger K must set ell
  // (pick it with an ell-scan).
  int resolved_ell() const;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Dotted-path override, e.g. "qmc.sweeps=32768". The value is parsed as JSON
// when possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& key_equals_value);

// Stable content hash of a config; names the experiment directory.
std::string experiment_id(const ExperimentConfig& config);

// Hierarchical per-run seeding: only (master_seed, gamma index, realization
// index) enter, so each run owns an independent stream.
std::uint64_t run_seed(std::uint64_t master_seed, int gamma_index, int realization_index);

EmbeddedProblem build_embedded(const ExperimentConfig& config, std::uint64_t realization_seed);

struct RunEstimates {
  double e = 0.0, e_err = 0.0;
  double abs_m = 0.0, abs_m_err = 0.0;
  double m2 = 0.0, m4 = 0.0;
  double g = 0.0, g_err = 0.0;
  double p_l = 0.0, p_l_err = 0.0;
  double samples = 0.0;
};
RunEstimates summarize_series(const RunSeries& series, std::uint64_t seed);

struct RunRecord {
  std::string id;
  int gamma_index = 0;
  int realization_index = 0;
  double gamma = 0.0;
  std::uint64_t realization_seed = 0;
  std::uint64_t seed = 0;
  std::string status;  // done | failed | skipped
  std::string error;
  RunEstimates estimates;
};

struct RunOutcome {
  int executed = 0;
  int skipped = 0;
  int failed = 0;
  std::filesystem::path directory;
  std::vector<RunRecord> runs;
};

RunOutcome run_experiment(const ExperimentConfig& config, int jobs = 0);

struct EllScanRow {
  int ell = 0;
  double abs_m = 0.0, abs_m_err = 0.0;
  double e = 0.0, e_err = 0.0;
};
std::vector<EllScanRow> ell_convergence_scan(const ExperimentConfig& config,
                                             std::span<const int> ells, int jobs = 0);

// Fully-populated config templates matching the parameter sets of the runs
// this package is meant to reproduce.
nlohmann::json figure_recipe(const std::string& name);
std::vector<std::string> figure_recipe_names();

}  // namespace lcqmc
