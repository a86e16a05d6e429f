#include "lcqmc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lcqmc/observables.hpp"

namespace lcqmc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json json_num(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double num_or_nan(const nlohmann::json& j) {
  return j.is_number() ? j.get<double>() : kNaN;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& t : workers) t.join();
}

bool nearly_integer(double k) { return std::abs(k - std::round(k)) < 1e-9; }

}  // namespace

void ExperimentConfig::validate() const {
  if (side < 2) throw std::invalid_argument("config: problem.L must be >= 2");
  if (embedding.scheme != "random" && embedding.scheme != "uniform" &&
      embedding.scheme != "none")
    throw std::invalid_argument("config: embedding.scheme must be random|uniform|none");
  if (embedding.k < 1.0) throw std::invalid_argument("config: embedding.K must be >= 1");
  if (embedding.scheme == "uniform" && !nearly_integer(embedding.k))
    throw std::invalid_argument("config: uniform embedding requires integer K");
  if (!nearly_integer(embedding.k) && embedding.k >= 3.0)
    throw std::invalid_argument("config: non-integer K >= 3 is unsupported");
  if (embedding.j_ferro >= 0.0) throw std::invalid_argument("config: embedding.J_F must be < 0");
  if (embedding.realization_seeds.empty())
    throw std::invalid_argument("config: embedding.realization_seeds must be non-empty");
  if (gamma_list.empty()) throw std::invalid_argument("config: model.gamma_list must be non-empty");
  for (double g : gamma_list)
    if (g < 0.0) throw std::invalid_argument("config: gamma values must be >= 0");
  if (beta <= 0.0) throw std::invalid_argument("config: model.beta must be > 0");
  mode_from_string(qmc.mode);
  if (qmc.sweeps < 1) throw std::invalid_argument("config: qmc.sweeps must be >= 1");
  if (qmc.thermalization < 0)
    throw std::invalid_argument("config: qmc.thermalization must be >= 0");
  if (qmc.measure_every < 1) throw std::invalid_argument("config: qmc.measure_every must be >= 1");
  if (outputs.directory.empty()) throw std::invalid_argument("config: outputs.directory empty");
  for (const std::string& f : outputs.formats)
    if (f != "tsv" && f != "json")
      throw std::invalid_argument("config: unknown output format " + f);
  resolved_ell();
}

int ExperimentConfig::resolved_ell() const {
  if (qmc.ell > 0) {
    if (qmc.ell < 2) throw std::invalid_argument("config: qmc.ell must be >= 2");
    return qmc.ell;
  }
  if (embedding.k <= 1.0 + 1e-9) return 150;
  if (embedding.k <= 2.0 + 1e-9) return 250;
  throw std::invalid_argument(
      "config: no default ell for K > 2; set qmc.ell explicitly (pick it with ell-scan)");
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["problem"]["L"] = c.side;
  j["embedding"] = {{"scheme", c.embedding.scheme},
                    {"K", c.embedding.k},
                    {"J_F", c.embedding.j_ferro},
                    {"realization_seeds", c.embedding.realization_seeds}};
  j["model"] = {{"gamma_list", c.gamma_list}, {"beta", c.beta}};
  j["qmc"] = {{"mode", c.qmc.mode},
              {"sweeps", c.qmc.sweeps},
              {"thermalization", c.qmc.thermalization},
              {"ell", c.qmc.ell},
              {"measure_every", c.qmc.measure_every},
              {"master_seed", c.qmc.master_seed}};
  j["outputs"] = {{"directory", c.outputs.directory}, {"formats", c.outputs.formats}};
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.side = j.at("problem").at("L").get<int>();
  if (j.contains("embedding")) {
    const auto& e = j.at("embedding");
    if (e.contains("scheme")) c.embedding.scheme = e.at("scheme").get<std::string>();
    if (e.contains("K")) c.embedding.k = e.at("K").get<double>();
    if (e.contains("J_F")) c.embedding.j_ferro = e.at("J_F").get<double>();
    if (e.contains("realization_seeds"))
      c.embedding.realization_seeds = e.at("realization_seeds").get<std::vector<std::uint64_t>>();
  }
  c.gamma_list = j.at("model").at("gamma_list").get<std::vector<double>>();
  c.beta = j.at("model").at("beta").get<double>();
  const auto& q = j.at("qmc");
  if (q.contains("mode")) c.qmc.mode = q.at("mode").get<std::string>();
  if (q.contains("sweeps")) c.qmc.sweeps = q.at("sweeps").get<long>();
  if (q.contains("thermalization")) c.qmc.thermalization = q.at("thermalization").get<long>();
  if (q.contains("ell")) c.qmc.ell = q.at("ell").get<int>();
  if (q.contains("measure_every")) c.qmc.measure_every = q.at("measure_every").get<int>();
  if (q.contains("master_seed")) c.qmc.master_seed = q.at("master_seed").get<std::uint64_t>();
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    if (o.contains("directory")) c.outputs.directory = o.at("directory").get<std::string>();
    if (o.contains("formats")) c.outputs.formats = o.at("formats").get<std::vector<std::string>>();
  }
  return c;
}

void apply_override(nlohmann::json& j, const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must be key=value: " + key_equals_value);
  const std::string path = key_equals_value.substr(0, eq);
  const std::string raw = key_equals_value.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;
  }
  nlohmann::json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw std::invalid_argument("bad override path: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string experiment_id(const ExperimentConfig& config) {
  const std::string dump = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t run_seed(std::uint64_t master_seed, int gamma_index, int realization_index) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(gamma_index),
                     static_cast<std::uint64_t>(realization_index));
}

EmbeddedProblem build_embedded(const ExperimentConfig& config, std::uint64_t realization_seed) {
  const NativeProblem problem = square_lattice_afm(config.side);
  if (config.embedding.scheme == "none" || config.embedding.k <= 1.0 + 1e-9) {
    EmbeddedProblem ep = embed_uniform(problem, 1, config.embedding.j_ferro);
    ep.embedding.seed = realization_seed;
    return ep;
  }
  if (config.embedding.scheme == "uniform") {
    EmbeddedProblem ep = embed_uniform(problem, static_cast<int>(std::round(config.embedding.k)),
                                       config.embedding.j_ferro);
    ep.embedding.seed = realization_seed;
    return ep;
  }
  Rng rng(realization_seed);
  const std::vector<int> sizes = chain_size_distribution(problem.num_sites, config.embedding.k, rng);
  EmbeddedProblem ep = embed_random(problem, sizes, config.embedding.j_ferro, rng);
  ep.embedding.seed = realization_seed;
  return ep;
}

RunEstimates summarize_series(const RunSeries& series, std::uint64_t seed) {
  RunEstimates est;
  est.e = est.e_err = est.abs_m = est.abs_m_err = est.m2 = est.m4 = est.g = est.g_err = kNaN;
  est.p_l = est.p_l_err = kNaN;
  try {
    const PLEstimate pl = estimate_logical_probability(series);
    est.p_l = pl.value;
    est.p_l_err = pl.stderr_estimate;
  } catch (const InsufficientDataError&) {
  }
  const double total = series.total_count();
  est.samples = total;
  if (total <= 0.0) return est;
  try {
    const RatioEstimate re = ratio_binned_error(series.e_sum, series.count);
    est.e = re.value;
    est.e_err = re.stderr_estimate;
    const RatioEstimate rm = ratio_binned_error(series.absm_sum, series.count);
    est.abs_m = rm.value;
    est.abs_m_err = rm.stderr_estimate;
  } catch (const InsufficientDataError&) {
  }
  double m2 = 0.0, m4 = 0.0;
  for (std::size_t t = 0; t < series.count.size(); ++t) {
    m2 += series.m2_sum[t];
    m4 += series.m4_sum[t];
  }
  est.m2 = m2 / total;
  est.m4 = m4 / total;
  if (est.m2 > 0.0) {
    est.g = 1.0 - est.m4 / (3.0 * est.m2 * est.m2);
    // Bootstrap over contiguous bins for the moment-ratio error.
    const long n = series.measurements();
    const int bins = static_cast<int>(std::min<long>(128, n));
    if (bins >= 8) {
      std::vector<double> b2(bins, 0.0), b4(bins, 0.0), bc(bins, 0.0);
      for (long t = 0; t < n; ++t) {
        const int b = static_cast<int>(t * bins / n);
        b2[b] += series.m2_sum[t];
        b4[b] += series.m4_sum[t];
        bc[b] += series.count[t];
      }
      Rng rng(derive_seed(seed, 0xB007, 0));
      std::vector<double> gs;
      gs.reserve(500);
      for (int r = 0; r < 500; ++r) {
        double s2 = 0.0, s4 = 0.0, sc = 0.0;
        for (int b = 0; b < bins; ++b) {
          const int pick = static_cast<int>(rng.uniform_int(bins));
          s2 += b2[pick];
          s4 += b4[pick];
          sc += bc[pick];
        }
        if (sc > 0.0 && s2 > 0.0) gs.push_back(1.0 - (s4 / sc) / (3.0 * (s2 / sc) * (s2 / sc)));
      }
      if (gs.size() > 1) {
        double mean = 0.0;
        for (double g : gs) mean += g;
        mean /= static_cast<double>(gs.size());
        double var = 0.0;
        for (double g : gs) var += (g - mean) * (g - mean);
        est.g_err = std::sqrt(var / static_cast<double>(gs.size() - 1));
      }
    }
  }
  return est;
}

namespace {

nlohmann::json estimates_to_json(const RunEstimates& e) {
  return {{"e", json_num(e.e)},           {"e_err", json_num(e.e_err)},
          {"abs_m", json_num(e.abs_m)},   {"abs_m_err", json_num(e.abs_m_err)},
          {"m2", json_num(e.m2)},         {"m4", json_num(e.m4)},
          {"g", json_num(e.g)},           {"g_err", json_num(e.g_err)},
          {"p_l", json_num(e.p_l)},       {"p_l_err", json_num(e.p_l_err)},
          {"samples", json_num(e.samples)}};
}

RunEstimates estimates_from_json(const nlohmann::json& j) {
  RunEstimates e;
  e.e = num_or_nan(j.at("e"));
  e.e_err = num_or_nan(j.at("e_err"));
  e.abs_m = num_or_nan(j.at("abs_m"));
  e.abs_m_err = num_or_nan(j.at("abs_m_err"));
  e.m2 = num_or_nan(j.at("m2"));
  e.m4 = num_or_nan(j.at("m4"));
  e.g = num_or_nan(j.at("g"));
  e.g_err = num_or_nan(j.at("g_err"));
  e.p_l = num_or_nan(j.at("p_l"));
  e.p_l_err = num_or_nan(j.at("p_l_err"));
  e.samples = num_or_nan(j.at("samples"));
  return e;
}

std::string run_id(int gamma_index, int realization_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "g%03d_r%03d", gamma_index, realization_index);
  return buf;
}

void write_run_tsv(const std::filesystem::path& path, const RunSeries& series, int measure_every) {
  std::ofstream os(path);
  os << "# sweep\tm_afm\tabs_m_afm\th_diag\tlogical_count\tslices_scanned\n";
  for (long t = 0; t < series.measurements(); ++t) {
    const double c = series.count[t];
    const double m = c > 0 ? series.m_sum[t] / c : kNaN;
    const double am = c > 0 ? series.absm_sum[t] / c : kNaN;
    const double e = c > 0 ? series.e_sum[t] / c : kNaN;
    os << (t + 1) * measure_every << '\t' << format_double(m) << '\t' << format_double(am)
       << '\t' << format_double(e) << '\t' << static_cast<long>(c) << '\t'
       << static_cast<long>(series.scanned[t]) << '\n';
  }
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, int jobs) {
  config.validate();
  const std::string id = experiment_id(config);
  RunOutcome outcome;
  outcome.directory = std::filesystem::path(config.outputs.directory) / id;
  std::filesystem::create_directories(outcome.directory / "runs");

  const bool want_tsv = std::find(config.outputs.formats.begin(), config.outputs.formats.end(),
                                  "tsv") != config.outputs.formats.end();
  const int num_gamma = static_cast<int>(config.gamma_list.size());
  const int num_real = static_cast<int>(config.embedding.realization_seeds.size());
  const int total = num_gamma * num_real;
  outcome.runs.resize(total);

  std::atomic<int> executed{0}, skipped{0}, failed{0};
  parallel_for(total, jobs, [&](int idx) {
    const int gi = idx / num_real;
    const int ri = idx % num_real;
    RunRecord& rec = outcome.runs[idx];
    rec.id = run_id(gi, ri);
    rec.gamma_index = gi;
    rec.realization_index = ri;
    rec.gamma = config.gamma_list[gi];
    rec.realization_seed = config.embedding.realization_seeds[ri];
    rec.seed = run_seed(config.qmc.master_seed, gi, ri);
    const std::filesystem::path record_path = outcome.directory / "runs" / (rec.id + ".json");
    if (std::filesystem::exists(record_path)) {
      try {
        std::ifstream is(record_path);
        nlohmann::json j;
        is >> j;
        if (j.at("status") == "done") {
          rec.estimates = estimates_from_json(j.at("estimates"));
          rec.status = "skipped";
          ++skipped;
          return;
        }
      } catch (...) {
        // fall through and redo the run
      }
    }
    try {
      const EmbeddedProblem embedded = build_embedded(config, rec.realization_seed);
      const ModelParams params{rec.gamma, config.beta, 1.0};
      QmcRunConfig run_cfg;
      run_cfg.mode = mode_from_string(config.qmc.mode);
      run_cfg.sweeps = config.qmc.sweeps;
      run_cfg.thermalization_sweeps = config.qmc.thermalization;
      run_cfg.ell = config.resolved_ell();
      run_cfg.seed = rec.seed;
      run_cfg.measure_every = config.qmc.measure_every;
      QmcRun run(embedded, params, run_cfg);
      const RunSeries series = run.run();
      rec.estimates = summarize_series(series, rec.seed);
      if (want_tsv)
        write_run_tsv(outcome.directory / "runs" / (rec.id + ".tsv"), series,
                      run_cfg.measure_every);
      nlohmann::json j = {{"id", rec.id},
                          {"gamma", rec.gamma},
                          {"gamma_index", gi},
                          {"realization_index", ri},
                          {"realization_seed", rec.realization_seed},
                          {"run_seed", rec.seed},
                          {"mode", config.qmc.mode},
                          {"ell", run_cfg.ell},
                          {"sweeps", config.qmc.sweeps},
                          {"status", "done"},
                          {"estimates", estimates_to_json(rec.estimates)}};
      std::ofstream os(record_path);
      os << j.dump(2) << '\n';
      rec.status = "done";
      ++executed;
    } catch (const std::exception& ex) {
      rec.status = "failed";
      rec.error = ex.what();
      ++failed;
    }
  });

  outcome.executed = executed;
  outcome.skipped = skipped;
  outcome.failed = failed;

  nlohmann::json manifest = {{"experiment_id", id},
                             {"code_version", kCodeVersion},
                             {"config", config_to_json(config)}};
  nlohmann::json summary = {{"experiment_id", id}, {"runs", nlohmann::json::array()}};
  auto& manifest_runs = manifest["runs"] = nlohmann::json::array();
  for (const RunRecord& rec : outcome.runs) {
    manifest_runs.push_back({{"id", rec.id},
                             {"gamma", rec.gamma},
                             {"gamma_index", rec.gamma_index},
                             {"realization_index", rec.realization_index},
                             {"realization_seed", rec.realization_seed},
                             {"run_seed", rec.seed},
                             {"status", rec.status}});
    summary["runs"].push_back({{"id", rec.id},
                               {"gamma", rec.gamma},
                               {"gamma_index", rec.gamma_index},
                               {"realization_index", rec.realization_index},
                               {"status", rec.status},
                               {"error", rec.error},
                               {"estimates", estimates_to_json(rec.estimates)}});
  }
  std::ofstream(outcome.directory / "manifest.json") << manifest.dump(2) << '\n';
  std::ofstream(outcome.directory / "summary.json") << summary.dump(2) << '\n';
  return outcome;
}

std::vector<EllScanRow> ell_convergence_scan(const ExperimentConfig& config,
                                             std::span<const int> ells, int jobs) {
  if (ells.size() < 2) throw std::invalid_argument("ell scan: need at least 2 ell values");
  std::vector<EllScanRow> rows(ells.size());
  for (std::size_t k = 0; k < ells.size(); ++k) {
    ExperimentConfig cfg = config;
    cfg.qmc.ell = ells[k];
    cfg.validate();
    const int num_gamma = static_cast<int>(cfg.gamma_list.size());
    const int num_real = static_cast<int>(cfg.embedding.realization_seeds.size());
    const int total = num_gamma * num_real;
    std::vector<RunEstimates> ests(total);
    parallel_for(total, jobs, [&](int idx) {
      const int gi = idx / num_real;
      const int ri = idx % num_real;
      const EmbeddedProblem embedded =
          build_embedded(cfg, cfg.embedding.realization_seeds[ri]);
      const ModelParams params{cfg.gamma_list[gi], cfg.beta, 1.0};
      QmcRunConfig run_cfg;
      run_cfg.mode = mode_from_string(cfg.qmc.mode);
      run_cfg.sweeps = cfg.qmc.sweeps;
      run_cfg.thermalization_sweeps = cfg.qmc.thermalization;
      run_cfg.ell = ells[k];
      run_cfg.seed = run_seed(cfg.qmc.master_seed, gi, ri);
      run_cfg.measure_every = cfg.qmc.measure_every;
      QmcRun run(embedded, params, run_cfg);
      ests[idx] = summarize_series(run.run(), run_cfg.seed);
    });
    EllScanRow& row = rows[k];
    row.ell = ells[k];
    double am = 0.0, am_var = 0.0, e = 0.0, e_var = 0.0;
    for (const RunEstimates& est : ests) {
      am += est.abs_m;
      am_var += est.abs_m_err * est.abs_m_err;
      e += est.e;
      e_var += est.e_err * est.e_err;
    }
    row.abs_m = am / total;
    row.abs_m_err = std::sqrt(am_var) / total;
    row.e = e / total;
    row.e_err = std::sqrt(e_var) / total;
  }
  return rows;
}

namespace {

ExperimentConfig base_recipe_config() {
  ExperimentConfig c;
  c.outputs.directory = "outputs";
  return c;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<std::uint64_t> seed_range(int n) {
  std::vector<std::uint64_t> v(n);
  for (int i = 0; i < n; ++i) v[i] = static_cast<std::uint64_t>(i + 1);
  return v;
}

}  // namespace

std::vector<std::string> figure_recipe_names() {
  return {"fig2",  "fig3-top", "fig3-bottom", "fig4", "fig5",
          "fig8",  "fig9",     "fig10",       "fig11", "fig12", "fig13"};
}

nlohmann::json figure_recipe(const std::string& name) {
  nlohmann::json out = {{"name", name}, {"experiments", nlohmann::json::array()}};
  auto add = [&out](const ExperimentConfig& c) { out["experiments"].push_back(config_to_json(c)); };

  if (name == "fig2") {
    out["note"] = "Logical-subspace probability vs transverse field, rejection sampling; "
                  "compare against the two-chain Ansatz with a fitted mean-field h.";
    for (double beta : {1.064, 1.645}) {
      ExperimentConfig c = base_recipe_config();
      c.side = 10;
      c.embedding = {"random", 1.1, -2.0, seed_range(5)};
      c.gamma_list = linspace(0.25, 6.0, 24);
      c.beta = beta;
      c.qmc = {"rejection", 1L << 17, 1000, 250, 1, 1};
      add(c);
    }
  } else if (name == "fig3-top") {
    out["note"] = "Order-parameter distribution at fixed (Gamma, beta) with growing chain size; "
                  "every chain has size K, one random physical bond per native bond.";
    const int ells[] = {150, 250, 500};
    const double ks[] = {1.0, 2.0, 4.0};
    for (int i = 0; i < 3; ++i) {
      ExperimentConfig c = base_recipe_config();
      c.side = 16;
      c.embedding = {"random", ks[i], -2.0, seed_range(1)};
      c.gamma_list = {3.05};
      c.beta = 1.645;
      c.qmc = {"lc", 1L << 18, 1000, ells[i], 1, 1};
      add(c);
    }
  } else if (name == "fig3-bottom") {
    out["note"] = "Order-parameter distribution for the native problem with decreasing field.";
    ExperimentConfig c = base_recipe_config();
    c.side = 16;
    c.embedding = {"none", 1.0, -2.0, seed_range(1)};
    c.gamma_list = {3.05, 2.95, 2.85};
    c.beta = 1.645;
    c.qmc = {"lc", 1L << 18, 1000, 150, 1, 1};
    add(c);
  } else if (name == "fig4" || name == "fig5") {
    out["note"] = name == "fig4"
                      ? "Binder cumulant curves, uniform embedding, two temperatures."
                      : "Data collapse of the fig4 curves: run fig4, then `lcq report` and "
                        "`lcq collapse` per (K, beta) group.";
    for (double beta : {1.064, 1.645}) {
      for (int k : {1, 2}) {
        for (int side : {6, 8, 10, 12}) {
          ExperimentConfig c = base_recipe_config();
          c.side = side;
          c.embedding = {"uniform", static_cast<double>(k), -2.0, seed_range(20)};
          c.gamma_list = k == 1 ? linspace(2.4, 3.6, 13) : linspace(2.6, 3.8, 13);
          c.beta = beta;
          c.qmc = {"lc", 1L << 17, 1000, 0, 1, 1};
          add(c);
        }
      }
    }
  } else if (name == "fig8") {
    out["note"] = "Realization-averaged Binder curves for the random embedding; average the "
                  "per-realization curves with `lcq report` before collapsing.";
    for (int k : {1, 2}) {
      for (int side : {6, 8, 10}) {
        ExperimentConfig c = base_recipe_config();
        c.side = side;
        c.embedding = {"random", static_cast<double>(k), -2.0, seed_range(30)};
        c.gamma_list = k == 1 ? linspace(2.5, 3.2, 11) : linspace(2.6, 3.3, 11);
        c.beta = 1.064;
        c.qmc = {"lc", 1L << 17, 1000, 0, 1, 1};
        add(c);
      }
    }
  } else if (name == "fig9") {
    out["note"] = "Critical-point shift vs embedding size: collapse each K group, then fit "
                  "Gamma_c(K) with `lcq collapse` outputs (linear fit).";
    const double ks[] = {1.0, 1.5, 2.0, 2.5, 3.0};
    const int ells[] = {150, 250, 250, 350, 350};
    for (int i = 0; i < 5; ++i) {
      for (int side : {6, 8, 10}) {
        ExperimentConfig c = base_recipe_config();
        c.side = side;
        c.embedding = {ks[i] == 1.0 ? "none" : "random", ks[i], -2.0, seed_range(30)};
        c.gamma_list = linspace(2.5, 3.5, 11);
        c.beta = 1.064;
        c.qmc = {"lc", 1L << 17, 1000, ells[i], 1, 1};
        add(c);
      }
    }
  } else if (name == "fig10") {
    out["note"] = "Distribution of Binder values over embedding realizations near criticality; "
                  "feed per-realization g into the ECDF/normal fit and bootstrap the sigma CI.";
    for (int side : {6, 8, 10, 12}) {
      ExperimentConfig c = base_recipe_config();
      c.side = side;
      c.embedding = {"random", 2.0, -2.0, seed_range(150)};
      c.gamma_list = {2.92};
      c.beta = 1.064;
      c.qmc = {"lc", 1L << 17, 1000, 0, 1, 1};
      add(c);
    }
  } else if (name == "fig11") {
    out["note"] = "Binning-level convergence of the order-parameter uncertainty.";
    for (int k : {1, 2}) {
      ExperimentConfig c = base_recipe_config();
      c.side = 16;
      c.embedding = {k == 1 ? "none" : "random", static_cast<double>(k), -2.0, seed_range(1)};
      c.gamma_list = {3.05};
      c.beta = 1.645;
      c.qmc = {"lc", 1L << 20, 1000, 150, 1, 1};
      add(c);
    }
  } else if (name == "fig12") {
    out["note"] = "Small-system cross-check of rejection and LC sampling against the dense "
                  "oracle (`lcq oracle` with the same config).";
    for (int k : {1, 2}) {
      for (const char* mode : {"rejection", "lc"}) {
        ExperimentConfig c = base_recipe_config();
        c.side = 2;
        c.embedding = {k == 1 ? "none" : "random", static_cast<double>(k), -2.0, seed_range(1)};
        c.gamma_list = linspace(0.2, 6.0, 10);
        c.beta = 1.0;
        c.qmc = {mode, 1L << 14, 1000, 75, 1, 1};
        add(c);
      }
    }
  } else if (name == "fig13") {
    out["note"] = "Rejection-sampling estimate of the logical probability vs the exact value.";
    ExperimentConfig c = base_recipe_config();
    c.side = 2;
    c.embedding = {"random", 2.0, -2.0, seed_range(1)};
    c.gamma_list = linspace(0.2, 6.0, 10);
    c.beta = 1.0;
    c.qmc = {"rejection", 1L << 14, 1000, 75, 1, 1};
    add(c);
  } else {
    std::ostringstream msg;
    msg << "unknown recipe '" << name << "'; available:";
    for (const std::string& n : figure_recipe_names()) msg << ' ' << n;
    throw std::invalid_argument(msg.str());
  }
  return out;
}

}  // namespace lcqmc
