#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lcqmc/embedding.hpp"
#include "lcqmc/model.hpp"
#include "lcqmc/observables.hpp"
#include "lcqmc/rng.hpp"

namespace lcqmc {

enum class QmcMode { standard, rejection, lc };

QmcMode mode_from_string(const std::string& name);
std::string mode_to_string(QmcMode mode);

// Effective couplings of the Trotterized path integral. p_add is computed as
// 1 - tanh(beta_eff * Gamma), which equals 1 - exp(-2 beta_eff J_perp) and
// stays finite at Gamma = 0 where J_perp diverges.
struct TrotterCouplings {
  double beta_eff = 0.0;
  double j_perp = 0.0;
  double p_add = 0.0;
};

TrotterCouplings trotter_couplings(const ModelParams& params, int ell);

// N~ x ell lattice of classical spins with periodic imaginary time. Storage
// is site-major: the ell spins of one world-line are contiguous.
struct PathIntegralState {
  int num_sites = 0;
  int ell = 0;
  std::vector<std::int8_t> spins;

  std::int8_t& at(int site, int tau) { return spins[static_cast<std::size_t>(site) * ell + tau]; }
  std::int8_t at(int site, int tau) const {
    return spins[static_cast<std::size_t>(site) * ell + tau];
  }
  SpinConfig slice(int tau) const;
};

struct QmcRunConfig {
  QmcMode mode = QmcMode::lc;
  long sweeps = 1;
  long thermalization_sweeps = 1000;
  int ell = 2;
  std::uint64_t seed = 0;
  int measure_every = 1;
  int ramp_stages = 10;

  void validate() const;
};

PathIntegralState init_state(const EmbeddedProblem& embedded, const QmcRunConfig& config,
                             Rng& rng);

// Swendsen-Wang partition of the (site, tau) lattice. Imaginary-time bonds
// between aligned neighbours are active with probability p_add; in LC mode
// the tau=0 bonds between chain-mates are active with probability 1. Clusters
// are numbered by first appearance in (site, tau) order.
struct ClusterPartition {
  std::vector<std::int32_t> cluster_of;  // vertex (site*ell + tau) -> cluster id
  std::vector<std::int32_t> offsets;     // CSR offsets, size num_clusters + 1
  std::vector<std::int32_t> members;     // vertex ids grouped by cluster
  int num_clusters = 0;

  std::span<const std::int32_t> cluster(int id) const {
    return {members.data() + offsets[id], static_cast<std::size_t>(offsets[id + 1] - offsets[id])};
  }
};

ClusterPartition build_clusters(const PathIntegralState& state, const TrotterCouplings& couplings,
                                const EmbeddedProblem& embedded, QmcMode mode, Rng& rng);

// Spatial-interaction energy change E(flipped) - E(current) for flipping one
// cluster: boundary bonds contribute -2 Delta J s_p s_q per touched slice,
// internal bonds cancel.
double spatial_energy_delta(const PathIntegralState& state, const ClusterPartition& partition,
                            int cluster_id, const EmbeddedProblem& embedded, double delta = 1.0);

// Metropolis step on one cluster: flips with probability
// min(1, exp(-beta_eff * deltaE)).
bool metropolis_flip(PathIntegralState& state, const ClusterPartition& partition, int cluster_id,
                     const TrotterCouplings& couplings, const EmbeddedProblem& embedded,
                     double delta, Rng& rng);

// One full sweep: build the partition, then offer each cluster a flip in
// cluster order (proposal probability 1/2, Metropolis acceptance), with
// energies evaluated against the current state.
void sweep(PathIntegralState& state, const TrotterCouplings& couplings,
           const EmbeddedProblem& embedded, QmcMode mode, double delta, Rng& rng);

// Geometric beta ramp from beta_target/10 to beta_target (inclusive ends).
std::vector<double> thermalization_schedule(double beta_target, int stages);

void thermalize(PathIntegralState& state, const EmbeddedProblem& embedded,
                const ModelParams& params, const QmcRunConfig& config, Rng& rng);

// One measurement. rejection mode unembeds every logical slice (zero or more
// samples, all ell slices scanned); lc mode unembeds exactly slice 0;
// standard mode returns slice 0 as-is (physical spins).
struct MeasureResult {
  std::vector<SpinConfig> samples;
  long scanned = 0;
};
MeasureResult measure(const PathIntegralState& state, const EmbeddedProblem& embedded,
                      QmcMode mode);

// Per-measurement accumulators. Magnetization sums are only filled when the
// sample lives on the native variables (always in lc/rejection mode; in
// standard mode only for trivial embeddings).
struct RunSeries {
  std::vector<double> m_sum, absm_sum, e_sum, m2_sum, m4_sum;
  std::vector<double> count, scanned;

  long measurements() const { return static_cast<long>(count.size()); }
  double total_count() const;
  double total_scanned() const;
};

struct PLEstimate {
  double value = 0.0;
  double stderr_estimate = 0.0;
};

// Accepted-slices / scanned-slices estimator with binning-corrected error.
PLEstimate estimate_logical_probability(const RunSeries& series);

// Drives one run: thermalization ramp, then sweeps with periodic
// measurements. Checkpoints capture the full state and RNG stream.
//
// Checkpoint layout (little-endian): magic "LCQCHK01", u32 version(=1),
// u32 num_sites, u32 ell, u8 mode, u64 sweeps_done, num_sites*ell spin
// bytes (0x01 / 0xff), u32 text length + mt19937_64 state as decimal text.
class QmcRun {
 public:
  QmcRun(const EmbeddedProblem& embedded, const ModelParams& params, const QmcRunConfig& config);

  void thermalize();
  void step();  // one sweep plus measurement when due
  long sweeps_done() const { return sweeps_done_; }
  const RunSeries& series() const { return series_; }
  const PathIntegralState& state() const { return state_; }

  void save_checkpoint(std::ostream& os) const;
  void load_checkpoint(std::istream& is);

  RunSeries run();  // thermalize + all configured sweeps

 private:
  void record_measurement();

  const EmbeddedProblem& embedded_;
  ModelParams params_;
  QmcRunConfig config_;
  TrotterCouplings couplings_;
  Rng rng_;
  PathIntegralState state_;
  RunSeries series_;
  long sweeps_done_ = 0;
};

}  // namespace lcqmc
