#include "lcqmc/qmc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lcqmc {

QmcMode mode_from_string(const std::string& name) {
  if (name == "standard") return QmcMode::standard;
  if (name == "rejection") return QmcMode::rejection;
  if (name == "lc") return QmcMode::lc;
  throw std::invalid_argument("unknown QMC mode: " + name);
}

std::string mode_to_string(QmcMode mode) {
  switch (mode) {
    case QmcMode::standard: return "standard";
    case QmcMode::rejection: return "rejection";
    case QmcMode::lc: return "lc";
  }
  return "?";
}

void QmcRunConfig::validate() const {
  if (sweeps < 1) throw std::invalid_argument("qmc config: sweeps must be >= 1");
  if (ell < 2) throw std::invalid_argument("qmc config: ell must be >= 2");
  if (thermalization_sweeps < 0)
    throw std::invalid_argument("qmc config: thermalization must be >= 0");
  if (measure_every < 1) throw std::invalid_argument("qmc config: measure_every must be >= 1");
  if (ramp_stages < 2) throw std::invalid_argument("qmc config: ramp_stages must be >= 2");
}

TrotterCouplings trotter_couplings(const ModelParams& params, int ell) {
  if (ell < 2) throw std::invalid_argument("trotter_couplings: ell must be >= 2");
  TrotterCouplings tc;
  tc.beta_eff = params.beta / ell;
  const double x = tc.beta_eff * params.gamma;
  if (x == 0.0) {
    tc.j_perp = std::numeric_limits<double>::infinity();
    tc.p_add = 1.0;  // rigid world-lines in the classical limit
  } else {
    tc.j_perp = -std::log(std::tanh(x)) / (2.0 * tc.beta_eff);
    tc.p_add = 1.0 - std::tanh(x);
  }
  return tc;
}

SpinConfig PathIntegralState::slice(int tau) const {
  SpinConfig config(num_sites);
  for (int s = 0; s < num_sites; ++s) config[s] = at(s, tau);
  return config;
}

PathIntegralState init_state(const EmbeddedProblem& embedded, const QmcRunConfig& config,
                             Rng& rng) {
  PathIntegralState state;
  state.num_sites = embedded.num_physical();
  state.ell = config.ell;
  state.spins.resize(static_cast<std::size_t>(state.num_sites) * state.ell);
  if (config.mode == QmcMode::lc) {
    // Slice 0 first: one logical draw per chain, replicated along it.
    const Embedding& emb = embedded.embedding;
    for (int l = 0; l < emb.num_logical(); ++l) {
      const std::int8_t v = static_cast<std::int8_t>(rng.sign());
      for (int i = 0; i < emb.chain_sizes[l]; ++i) state.at(emb.physical_index(l, i), 0) = v;
    }
    for (int s = 0; s < state.num_sites; ++s)
      for (int tau = 1; tau < state.ell; ++tau)
        state.at(s, tau) = static_cast<std::int8_t>(rng.sign());
  } else {
    for (int s = 0; s < state.num_sites; ++s)
      for (int tau = 0; tau < state.ell; ++tau)
        state.at(s, tau) = static_cast<std::int8_t>(rng.sign());
  }
  return state;
}

namespace {

std::int32_t uf_find(std::vector<std::int32_t>& parent, std::int32_t v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];  // path halving
    v = parent[v];
  }
  return v;
}

void uf_union(std::vector<std::int32_t>& parent, std::int32_t a, std::int32_t b) {
  a = uf_find(parent, a);
  b = uf_find(parent, b);
  if (a != b) parent[std::max(a, b)] = std::min(a, b);
}

}  // namespace

ClusterPartition build_clusters(const PathIntegralState& state, const TrotterCouplings& couplings,
                                const EmbeddedProblem& embedded, QmcMode mode, Rng& rng) {
  const int ell = state.ell;
  const std::int32_t nv = static_cast<std::int32_t>(state.spins.size());
  std::vector<std::int32_t> parent(nv);
  for (std::int32_t v = 0; v < nv; ++v) parent[v] = v;

  // Imaginary-time bonds, one coin per aligned pair, in (site, tau) order.
  for (int s = 0; s < state.num_sites; ++s) {
    const std::int32_t base = s * ell;
    for (int tau = 0; tau < ell; ++tau) {
      const int tau_next = (tau + 1 == ell) ? 0 : tau + 1;
      if (state.spins[base + tau] == state.spins[base + tau_next] &&
          rng.uniform01() < couplings.p_add)
        uf_union(parent, base + tau, base + tau_next);
    }
  }

  if (mode == QmcMode::lc) {
    // Deterministic joins across tau=0 within each chain.
    const Embedding& emb = embedded.embedding;
    for (int l = 0; l < emb.num_logical(); ++l) {
      const int off = emb.chain_offsets[l];
      for (int i = 0; i + 1 < emb.chain_sizes[l]; ++i) {
        if (state.at(off + i, 0) != state.at(off + i + 1, 0))
          throw std::logic_error("lc mode: broken chain at slice 0");
        uf_union(parent, (off + i) * ell, (off + i + 1) * ell);
      }
    }
  }

  ClusterPartition part;
  part.cluster_of.assign(nv, -1);
  std::vector<std::int32_t> root_cluster(nv, -1);
  for (std::int32_t v = 0; v < nv; ++v) {
    const std::int32_t r = uf_find(parent, v);
    if (root_cluster[r] < 0) root_cluster[r] = part.num_clusters++;
    part.cluster_of[v] = root_cluster[r];
  }
  part.offsets.assign(part.num_clusters + 1, 0);
  for (std::int32_t v = 0; v < nv; ++v) ++part.offsets[part.cluster_of[v] + 1];
  for (int c = 0; c < part.num_clusters; ++c) part.offsets[c + 1] += part.offsets[c];
  part.members.resize(nv);
  std::vector<std::int32_t> cursor(part.offsets.begin(), part.offsets.end() - 1);
  for (std::int32_t v = 0; v < nv; ++v) part.members[cursor[part.cluster_of[v]]++] = v;
  return part;
}

double spatial_energy_delta(const PathIntegralState& state, const ClusterPartition& partition,
                            int cluster_id, const EmbeddedProblem& embedded, double delta) {
  const int ell = state.ell;
  double sum = 0.0;
  for (std::int32_t v : partition.cluster(cluster_id)) {
    const int site = v / ell;
    const int tau = v - site * ell;
    const double sv = state.spins[v];
    for (int e = embedded.adj_offsets[site]; e < embedded.adj_offsets[site + 1]; ++e) {
      const std::int32_t w = embedded.adj_site[e] * ell + tau;
      if (partition.cluster_of[w] == cluster_id) continue;  // internal bond, cancels
      sum += embedded.adj_coupling[e] * sv * state.spins[w];
    }
  }
  return -2.0 * delta * sum;
}

bool metropolis_flip(PathIntegralState& state, const ClusterPartition& partition, int cluster_id,
                     const TrotterCouplings& couplings, const EmbeddedProblem& embedded,
                     double delta, Rng& rng) {
  const double d_energy = spatial_energy_delta(state, partition, cluster_id, embedded, delta);
  if (d_energy > 0.0 && rng.uniform01() >= std::exp(-couplings.beta_eff * d_energy))
    return false;
  for (std::int32_t v : partition.cluster(cluster_id)) state.spins[v] = -state.spins[v];
  return true;
}

void sweep(PathIntegralState& state, const TrotterCouplings& couplings,
           const EmbeddedProblem& embedded, QmcMode mode, double delta, Rng& rng) {
  const ClusterPartition part = build_clusters(state, couplings, embedded, mode, rng);
  // Each cluster is offered a flip with probability 1/2, which the Metropolis
  // step then accepts or rejects. The symmetric 1/2 cancels from the
  // detailed-balance ratio; without it the sweep degenerates into a
  // deterministic global flip whenever all spatial energy changes vanish
  // (Delta = 0, isolated spins) and the chain stops mixing between alignment
  // sectors.
  for (int c = 0; c < part.num_clusters; ++c) {
    if (rng.uniform01() < 0.5) metropolis_flip(state, part, c, couplings, embedded, delta, rng);
  }
}

std::vector<double> thermalization_schedule(double beta_target, int stages) {
  if (stages < 2) throw std::invalid_argument("thermalization_schedule: need >= 2 stages");
  std::vector<double> betas(stages);
  const double lo = beta_target / 10.0;
  for (int s = 0; s < stages; ++s)
    betas[s] = lo * std::pow(10.0, static_cast<double>(s) / (stages - 1));
  betas.back() = beta_target;  // exact endpoint
  return betas;
}

void thermalize(PathIntegralState& state, const EmbeddedProblem& embedded,
                const ModelParams& params, const QmcRunConfig& config, Rng& rng) {
  if (config.thermalization_sweeps == 0) return;
  const std::vector<double> betas = thermalization_schedule(params.beta, config.ramp_stages);
  const long total = config.thermalization_sweeps;
  const int stages = config.ramp_stages;
  for (int s = 0; s < stages; ++s) {
    const long begin = total * s / stages;
    const long end = total * (s + 1) / stages;
    ModelParams stage_params = params;
    stage_params.beta = betas[s];
    const TrotterCouplings tc = trotter_couplings(stage_params, config.ell);
    for (long i = begin; i < end; ++i) sweep(state, tc, embedded, config.mode, params.delta, rng);
  }
}

MeasureResult measure(const PathIntegralState& state, const EmbeddedProblem& embedded,
                      QmcMode mode) {
  MeasureResult out;
  switch (mode) {
    case QmcMode::standard:
      out.samples.push_back(state.slice(0));
      out.scanned = 1;
      break;
    case QmcMode::lc:
      out.samples.push_back(unembed(embedded, state.slice(0)));
      out.scanned = 1;
      break;
    case QmcMode::rejection:
      out.scanned = state.ell;
      for (int tau = 0; tau < state.ell; ++tau) {
        SpinConfig slice = state.slice(tau);
        if (is_logical(embedded, slice)) out.samples.push_back(unembed(embedded, slice));
      }
      break;
  }
  return out;
}

double RunSeries::total_count() const {
  double t = 0.0;
  for (double c : count) t += c;
  return t;
}

double RunSeries::total_scanned() const {
  double t = 0.0;
  for (double s : scanned) t += s;
  return t;
}

PLEstimate estimate_logical_probability(const RunSeries& series) {
  if (series.measurements() == 0 || series.total_scanned() <= 0.0)
    throw InsufficientDataError("estimate_logical_probability: no scanned slices");
  PLEstimate est;
  est.value = series.total_count() / series.total_scanned();
  std::vector<double> fraction(series.count.size());
  for (std::size_t t = 0; t < fraction.size(); ++t)
    fraction[t] = series.count[t] / series.scanned[t];
  if (fraction.size() >= 64) {
    est.stderr_estimate = binning_errors(fraction).converged_stderr;
  } else {
    double mean = est.value, var = 0.0;
    for (double f : fraction) var += (f - mean) * (f - mean);
    const auto n = static_cast<double>(fraction.size());
    est.stderr_estimate = n > 1 ? std::sqrt(var / (n * (n - 1))) : 0.0;
  }
  return est;
}

QmcRun::QmcRun(const EmbeddedProblem& embedded, const ModelParams& params,
               const QmcRunConfig& config)
    : embedded_(embedded), params_(params), config_(config),
      couplings_(trotter_couplings(params, config.ell)), rng_(config.seed) {
  params_.validate();
  config_.validate();
  state_ = init_state(embedded_, config_, rng_);
}

void QmcRun::thermalize() {
  lcqmc::thermalize(state_, embedded_, params_, config_, rng_);
}

void QmcRun::record_measurement() {
  const MeasureResult mr = measure(state_, embedded_, config_.mode);
  double m_sum = 0.0, absm_sum = 0.0, e_sum = 0.0, m2 = 0.0, m4 = 0.0;
  const bool native_sample =
      config_.mode != QmcMode::standard ||
      embedded_.num_physical() == embedded_.native.num_sites;
  for (const SpinConfig& sample : mr.samples) {
    if (native_sample) {
      const double m = staggered_magnetization(sample, embedded_.native.coords);
      m_sum += m;
      absm_sum += std::abs(m);
      m2 += m * m;
      m4 += m * m * m * m;
      e_sum += bond_energy(embedded_.native.bonds, sample, params_.delta);
    } else {
      e_sum += bond_energy(embedded_.all_bonds, sample, params_.delta);
    }
  }
  series_.m_sum.push_back(m_sum);
  series_.absm_sum.push_back(absm_sum);
  series_.e_sum.push_back(e_sum);
  series_.m2_sum.push_back(m2);
  series_.m4_sum.push_back(m4);
  series_.count.push_back(static_cast<double>(mr.samples.size()));
  series_.scanned.push_back(static_cast<double>(mr.scanned));
}

void QmcRun::step() {
  sweep(state_, couplings_, embedded_, config_.mode, params_.delta, rng_);
  ++sweeps_done_;
  if (sweeps_done_ % config_.measure_every == 0) record_measurement();
}

RunSeries QmcRun::run() {
  thermalize();
  while (sweeps_done_ < config_.sweeps) step();
  return series_;
}

namespace {
constexpr char kCheckpointMagic[8] = {'L', 'C', 'Q', 'C', 'H', 'K', '0', '1'};

template <typename T>
void write_pod(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}
}  // namespace

void QmcRun::save_checkpoint(std::ostream& os) const {
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_pod<std::uint32_t>(os, 1);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(state_.num_sites));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(state_.ell));
  write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(config_.mode));
  write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(sweeps_done_));
  os.write(reinterpret_cast<const char*>(state_.spins.data()),
           static_cast<std::streamsize>(state_.spins.size()));
  std::ostringstream rng_text;
  rng_.save(rng_text);
  const std::string text = rng_text.str();
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(text.size()));
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void QmcRun::load_checkpoint(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  if (read_pod<std::uint32_t>(is) != 1) throw std::runtime_error("checkpoint: bad version");
  const auto num_sites = read_pod<std::uint32_t>(is);
  const auto ell = read_pod<std::uint32_t>(is);
  const auto mode = static_cast<QmcMode>(read_pod<std::uint8_t>(is));
  if (static_cast<int>(num_sites) != state_.num_sites || static_cast<int>(ell) != state_.ell ||
      mode != config_.mode)
    throw std::runtime_error("checkpoint: run shape mismatch");
  sweeps_done_ = static_cast<long>(read_pod<std::uint64_t>(is));
  is.read(reinterpret_cast<char*>(state_.spins.data()),
          static_cast<std::streamsize>(state_.spins.size()));
  const auto text_len = read_pod<std::uint32_t>(is);
  std::string text(text_len, '\0');
  is.read(text.data(), text_len);
  if (!is) throw std::runtime_error("checkpoint: truncated");
  std::istringstream rng_text(text);
  rng_.load(rng_text);
}

}  // namespace lcqmc
