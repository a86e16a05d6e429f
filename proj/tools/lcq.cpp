// Command-line front end: configure, run, and post-process embedded-sampling
// QMC experiments.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "lcqmc/analysis.hpp"
#include "lcqmc/experiment.hpp"
#include "lcqmc/oracle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitPartialFailure = 3;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  json j;
  is >> j;
  return j;
}

lcqmc::ExperimentConfig load_config(const std::string& path,
                                    const std::vector<std::string>& overrides,
                                    const std::string& out_dir, std::uint64_t seed,
                                    bool seed_set) {
  json j = load_json_file(path);
  for (const std::string& kv : overrides) lcqmc::apply_override(j, kv);
  lcqmc::ExperimentConfig config = lcqmc::config_from_json(j);
  if (!out_dir.empty()) config.outputs.directory = out_dir;
  if (seed_set) config.qmc.master_seed = seed;
  config.validate();
  return config;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_dir, std::uint64_t seed, bool seed_set, int jobs) {
  const lcqmc::ExperimentConfig config =
      load_config(config_path, overrides, out_dir, seed, seed_set);
  const lcqmc::RunOutcome outcome = lcqmc::run_experiment(config, jobs);
  std::cout << "experiment " << lcqmc::experiment_id(config) << ": " << outcome.executed
            << " executed, " << outcome.skipped << " skipped, " << outcome.failed << " failed\n"
            << "outputs in " << outcome.directory.string() << "\n";
  for (const lcqmc::RunRecord& rec : outcome.runs)
    if (rec.status == "failed")
      std::cerr << "run " << rec.id << " failed: " << rec.error << "\n";
  return outcome.failed > 0 ? kExitPartialFailure : 0;
}

int cmd_oracle(const std::string& config_path, const std::vector<std::string>& overrides,
               const std::string& out_dir, int cap) {
  lcqmc::ExperimentConfig config = load_config(config_path, overrides, "", 0, false);
  const fs::path dir =
      out_dir.empty() ? fs::path(config.outputs.directory) / (lcqmc::experiment_id(config) + "-oracle")
                      : fs::path(out_dir);
  fs::create_directories(dir);
  std::ofstream os(dir / "oracle.tsv");
  os << "# gamma\tp_l\te_diag\tabs_m\tbinder_g\n";
  for (std::size_t ri = 0; ri < config.embedding.realization_seeds.size(); ++ri) {
    const lcqmc::EmbeddedProblem embedded =
        lcqmc::build_embedded(config, config.embedding.realization_seeds[ri]);
    for (double gamma : config.gamma_list) {
      const lcqmc::ModelParams params{gamma, config.beta, 1.0};
      const lcqmc::LogicalMoments lm =
          lcqmc::logical_observable_expectations(embedded, params, cap);
      const double g = lm.m2 > 0 ? 1.0 - lm.m4 / (3.0 * lm.m2 * lm.m2) : 0.0;
      os << fmt(gamma) << '\t' << fmt(lm.p_logical) << '\t' << fmt(lm.e_diag) << '\t'
         << fmt(lm.abs_m) << '\t' << fmt(g) << '\n';
    }
  }
  std::cout << "oracle table in " << (dir / "oracle.tsv").string() << "\n";
  return 0;
}

// Rows "L gamma g g_err", grouped into one Binder curve per L.
std::vector<lcqmc::BinderCurve> read_curves(const std::vector<std::string>& paths) {
  std::map<int, lcqmc::BinderCurve> by_side;
  for (const std::string& path : paths) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      int side;
      double gamma, g, g_err;
      if (!(ls >> side >> gamma >> g >> g_err)) continue;
      by_side[side].side = side;
      by_side[side].points.push_back({gamma, g, g_err});
    }
  }
  std::vector<lcqmc::BinderCurve> curves;
  for (auto& [side, curve] : by_side) {
    std::sort(curve.points.begin(), curve.points.end(),
              [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
    curves.push_back(std::move(curve));
  }
  return curves;
}

int cmd_collapse(const std::vector<std::string>& inputs, const std::string& out_dir,
                 double window_lo, double window_hi) {
  const std::vector<lcqmc::BinderCurve> curves = read_curves(inputs);
  lcqmc::Window window{window_lo, window_hi};
  if (window_hi <= window_lo) window = lcqmc::select_collapse_window(curves);
  const std::vector<double> gamma_grid = lcqmc::default_gamma_grid(curves, window);
  const std::vector<double> nu_grid = lcqmc::default_nu_grid();
  const lcqmc::CollapseResult res = lcqmc::data_collapse(curves, gamma_grid, nu_grid, window);

  std::uint64_t input_hash = 0xcbf29ce484222325ULL;
  for (const std::string& path : inputs) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    for (unsigned char c : ss.str()) {
      input_hash ^= c;
      input_hash *= 0x100000001b3ULL;
    }
  }
  char hash_text[17];
  std::snprintf(hash_text, sizeof(hash_text), "%016llx",
                static_cast<unsigned long long>(input_hash));

  json report = {{"gamma_c", res.gamma_c},
                 {"nu", res.nu},
                 {"residual", res.residual},
                 {"window", {res.window.lo, res.window.hi}},
                 {"inputs_hash", hash_text}};
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / "collapse.json") << report.dump(2) << '\n';
    std::ofstream os(fs::path(out_dir) / "collapsed.tsv");
    os << "# x\tg\tL\n";
    for (const lcqmc::BinderCurve& curve : curves) {
      const double scale = std::pow(curve.side, 1.0 / res.nu);
      for (const lcqmc::BinderPoint& p : curve.points) {
        if (p.gamma < res.window.lo || p.gamma > res.window.hi) continue;
        os << fmt(scale * (p.gamma - res.gamma_c)) << '\t' << fmt(p.g) << '\t' << curve.side
           << '\n';
      }
    }
  }
  std::cout << report.dump(2) << '\n';
  return 0;
}

int cmd_recipe(const std::string& name, const std::string& out_path) {
  const json recipe = lcqmc::figure_recipe(name);
  if (!out_path.empty()) {
    std::ofstream(out_path) << recipe.dump(2) << '\n';
    std::cout << "recipe written to " << out_path << "\n";
  } else {
    std::cout << recipe.dump(2) << '\n';
  }
  return 0;
}

int cmd_ell_scan(const std::string& config_path, const std::vector<std::string>& overrides,
                 const std::vector<int>& ells, const std::string& out_dir, int jobs) {
  const lcqmc::ExperimentConfig config = load_config(config_path, overrides, "", 0, false);
  const std::vector<lcqmc::EllScanRow> rows = lcqmc::ell_convergence_scan(config, ells, jobs);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    file.open(fs::path(out_dir) / "ell_scan.tsv");
    os = &file;
  }
  *os << "# ell\tabs_m\tabs_m_err\te\te_err\n";
  for (const lcqmc::EllScanRow& row : rows)
    *os << row.ell << '\t' << fmt(row.abs_m) << '\t' << fmt(row.abs_m_err) << '\t' << fmt(row.e)
        << '\t' << fmt(row.e_err) << '\n';
  return 0;
}

int cmd_report(const std::string& dir) {
  const json summary = load_json_file((fs::path(dir) / "summary.json").string());
  const json manifest = load_json_file((fs::path(dir) / "manifest.json").string());
  const int side = manifest.at("config").at("problem").at("L").get<int>();

  // Realization-averaged estimates per gamma.
  struct Acc {
    std::vector<double> e, am, g, pl;
    std::vector<double> e_err, am_err, g_err, pl_err;
  };
  std::map<double, Acc> by_gamma;
  for (const json& run : summary.at("runs")) {
    if (run.at("status") == "failed") continue;
    const json& est = run.at("estimates");
    Acc& acc = by_gamma[run.at("gamma").get<double>()];
    auto push = [](std::vector<double>& v, const json& x) {
      if (x.is_number()) v.push_back(x.get<double>());
    };
    push(acc.e, est.at("e"));
    push(acc.am, est.at("abs_m"));
    push(acc.g, est.at("g"));
    push(acc.pl, est.at("p_l"));
    push(acc.e_err, est.at("e_err"));
    push(acc.am_err, est.at("abs_m_err"));
    push(acc.g_err, est.at("g_err"));
    push(acc.pl_err, est.at("p_l_err"));
  }
  const auto mean_sem = [](const std::vector<double>& v,
                           const std::vector<double>& errs) -> std::pair<double, double> {
    if (v.empty()) return {NAN, NAN};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() == 1) return {mean, errs.empty() ? NAN : errs[0]};
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / (static_cast<double>(v.size()) * (v.size() - 1)))};
  };

  std::ofstream os(fs::path(dir) / "report.tsv");
  os << "# L\tgamma\te\te_err\tabs_m\tabs_m_err\tg\tg_err\tp_l\tp_l_err\trealizations\n";
  for (const auto& [gamma, acc] : by_gamma) {
    const auto [e, e_err] = mean_sem(acc.e, acc.e_err);
    const auto [am, am_err] = mean_sem(acc.am, acc.am_err);
    const auto [g, g_err] = mean_sem(acc.g, acc.g_err);
    const auto [pl, pl_err] = mean_sem(acc.pl, acc.pl_err);
    os << side << '\t' << fmt(gamma) << '\t' << fmt(e) << '\t' << fmt(e_err) << '\t' << fmt(am)
       << '\t' << fmt(am_err) << '\t' << fmt(g) << '\t' << fmt(g_err) << '\t' << fmt(pl) << '\t'
       << fmt(pl_err) << '\t' << acc.g.size() << '\n';
  }
  std::cout << "report in " << (fs::path(dir) / "report.tsv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embedded-sampling QMC toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, recipe_name, report_dir;
  std::vector<std::string> overrides, collapse_inputs;
  std::vector<int> ells;
  std::uint64_t seed = 0;
  int jobs = 0, oracle_cap = lcqmc::kDefaultOracleCap;
  double window_lo = 0.0, window_hi = 0.0;

  CLI::App* run = app.add_subcommand("run", "Execute the runs of an experiment config");
  run->add_option("--config", config_path, "experiment config JSON")->required();
  run->add_option("--set", overrides, "override config field, key.path=value");
  bool seed_set = false;
  run->add_option("--seed", seed, "override qmc.master_seed")->each([&](const std::string&) {
    seed_set = true;
  });
  run->add_option("--jobs", jobs, "worker threads (default: cores)");
  run->add_option("--out", out_dir, "override outputs.directory");

  CLI::App* oracle = app.add_subcommand("oracle", "Dense-oracle table for a small config");
  oracle->add_option("--config", config_path, "experiment config JSON")->required();
  oracle->add_option("--set", overrides, "override config field");
  oracle->add_option("--out", out_dir, "output directory");
  oracle->add_option("--cap", oracle_cap, "dense-oracle qubit cap");

  CLI::App* collapse = app.add_subcommand("collapse", "FSS data collapse of Binder curves");
  collapse->add_option("--inputs", collapse_inputs, "TSV files with rows: L gamma g g_err")
      ->required();
  collapse->add_option("--out", out_dir, "output directory");
  collapse->add_option("--window-lo", window_lo, "collapse window lower edge");
  collapse->add_option("--window-hi", window_hi, "collapse window upper edge");

  CLI::App* recipe = app.add_subcommand("recipe", "Print a preconfigured experiment template");
  recipe->add_option("name", recipe_name, "recipe name")->required();
  recipe->add_option("--out", out_dir, "write recipe JSON here");

  CLI::App* ell_scan = app.add_subcommand("ell-scan", "Observable convergence in time-slices");
  ell_scan->add_option("--config", config_path, "experiment config JSON")->required();
  ell_scan->add_option("--set", overrides, "override config field");
  ell_scan->add_option("--ells", ells, "ell values to scan")->required();
  ell_scan->add_option("--out", out_dir, "output directory");
  ell_scan->add_option("--jobs", jobs, "worker threads");

  CLI::App* report = app.add_subcommand("report", "Aggregate an experiment directory");
  report->add_option("dir", report_dir, "experiment output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, overrides, out_dir, seed, seed_set, jobs);
    if (oracle->parsed()) return cmd_oracle(config_path, overrides, out_dir, oracle_cap);
    if (collapse->parsed()) return cmd_collapse(collapse_inputs, out_dir, window_lo, window_hi);
    if (recipe->parsed()) return cmd_recipe(recipe_name, out_dir);
    if (ell_scan->parsed()) return cmd_ell_scan(config_path, overrides, ells, out_dir, jobs);
    if (report->parsed()) return cmd_report(report_dir);
  } catch (const std::invalid_argument& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitConfigError;
  }
  return 0;
}
