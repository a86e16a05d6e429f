#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "lcqmc/embedding.hpp"
#include "lcqmc/oracle.hpp"
#include "lcqmc/qmc.hpp"
#include "test_util.hpp"

using namespace lcqmc;

namespace {

NativeProblem single_site_problem() {
  NativeProblem p;
  p.num_sites = 1;
  p.coords = {{0, 0}};
  return p;
}

NativeProblem two_site_problem() {
  NativeProblem p;
  p.num_sites = 2;
  p.coords = {{0, 0}, {1, 0}};
  p.bonds = {{0, 1, 1.0}};
  return p;
}

NativeProblem three_site_chain() {
  NativeProblem p;
  p.num_sites = 3;
  p.coords = {{0, 0}, {1, 0}, {2, 0}};
  p.bonds = {{0, 1, 1.0}, {1, 2, 1.0}};
  return p;
}

void fill_uniform_worldlines(PathIntegralState& state, const SpinConfig& slice) {
  for (int s = 0; s < state.num_sites; ++s)
    for (int tau = 0; tau < state.ell; ++tau) state.at(s, tau) = slice[s];
}

double total_spatial_energy(const PathIntegralState& state, const EmbeddedProblem& ep,
                            double delta) {
  double e = 0.0;
  for (int tau = 0; tau < state.ell; ++tau)
    e += bond_energy(ep.all_bonds, state.slice(tau), delta);
  return e;
}

}  // namespace

TEST_CASE("trotter couplings") {
  SUBCASE("Gamma = 0 gives rigid world-lines") {
    const TrotterCouplings tc = trotter_couplings(ModelParams{0.0, 2.0, 1.0}, 10);
    CHECK(tc.p_add == 1.0);
    CHECK(std::isinf(tc.j_perp));
    CHECK(tc.beta_eff == doctest::Approx(0.2));
  }
  SUBCASE("large beta_eff * Gamma decouples the slices") {
    const TrotterCouplings tc = trotter_couplings(ModelParams{500.0, 4.0, 1.0}, 2);
    CHECK(tc.p_add == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("the two algebraic forms of p_add agree") {
    for (const auto& [gamma, beta, ell] :
         {std::tuple{2.95, 1.645, 150}, std::tuple{1.0, 1.0, 75}, std::tuple{0.3, 2.0, 16}}) {
      const TrotterCouplings tc = trotter_couplings(ModelParams{gamma, beta, 1.0}, ell);
      const double from_jperp = 1.0 - std::exp(-2.0 * tc.beta_eff * tc.j_perp);
      CHECK(std::abs(tc.p_add - from_jperp) < 1e-12);
      CHECK(tc.p_add == doctest::Approx(1.0 - std::tanh(tc.beta_eff * gamma)).epsilon(1e-15));
      CHECK(tc.j_perp > 0.0);
    }
  }
}

TEST_CASE("init state") {
  const NativeProblem p = square_lattice_afm(2);
  const EmbeddedProblem ep = embed_uniform(p, 2, -2.0);
  QmcRunConfig cfg;
  cfg.ell = 75;
  cfg.seed = 321;
  SUBCASE("lc mode starts from a logical slice 0") {
    cfg.mode = QmcMode::lc;
    Rng rng(cfg.seed);
    const PathIntegralState state = init_state(ep, cfg, rng);
    CHECK(is_logical(ep, state.slice(0)));
    CHECK(state.spins.size() == 8u * 75u);
  }
  SUBCASE("fixed seed reproduces the state") {
    cfg.mode = QmcMode::standard;
    Rng rng_a(7), rng_b(7);
    const PathIntegralState a = init_state(ep, cfg, rng_a);
    const PathIntegralState b = init_state(ep, cfg, rng_b);
    CHECK(a.spins == b.spins);
  }
}

TEST_CASE("cluster construction") {
  const NativeProblem p = square_lattice_afm(2);
  const EmbeddedProblem ep = embed_uniform(p, 1, -2.0);
  QmcRunConfig cfg;
  cfg.ell = 8;
  cfg.mode = QmcMode::standard;
  Rng rng(15);

  SUBCASE("p_add = 1 on uniform world-lines gives one cluster per site") {
    PathIntegralState state = init_state(ep, cfg, rng);
    fill_uniform_worldlines(state, SpinConfig{1, -1, 1, 1});
    const TrotterCouplings tc{0.125, std::numeric_limits<double>::infinity(), 1.0};
    const ClusterPartition part = build_clusters(state, tc, ep, QmcMode::standard, rng);
    CHECK(part.num_clusters == 4);
  }
  SUBCASE("p_add = 0 isolates every spin") {
    PathIntegralState state = init_state(ep, cfg, rng);
    const TrotterCouplings tc{0.125, 0.0, 0.0};
    const ClusterPartition part = build_clusters(state, tc, ep, QmcMode::standard, rng);
    CHECK(part.num_clusters == 4 * 8);
  }
  SUBCASE("p_add = 0 in lc mode only keeps the slice-0 chain joins") {
    const EmbeddedProblem ep2 = embed_uniform(p, 2, -2.0);
    QmcRunConfig cfg2;
    cfg2.ell = 8;
    cfg2.mode = QmcMode::lc;
    Rng rng2(16);
    PathIntegralState state = init_state(ep2, cfg2, rng2);
    const TrotterCouplings tc{0.125, 0.0, 0.0};
    const ClusterPartition part = build_clusters(state, tc, ep2, QmcMode::lc, rng2);
    // 8 sites x 8 slices, minus one merge per extra chain spin.
    CHECK(part.num_clusters == 8 * 8 - 4);
  }
  SUBCASE("partition covers every vertex exactly once") {
    PathIntegralState state = init_state(ep, cfg, rng);
    const TrotterCouplings tc = trotter_couplings(ModelParams{1.0, 1.0, 1.0}, cfg.ell);
    const ClusterPartition part = build_clusters(state, tc, ep, QmcMode::standard, rng);
    std::set<std::int32_t> seen;
    for (int c = 0; c < part.num_clusters; ++c)
      for (std::int32_t v : part.cluster(c)) {
        CHECK(seen.insert(v).second);
        CHECK(part.cluster_of[v] == c);
      }
    CHECK(seen.size() == state.spins.size());
  }
  SUBCASE("cluster members share one spin value") {
    for (int trial = 0; trial < 5; ++trial) {
      PathIntegralState state = init_state(ep, cfg, rng);
      const TrotterCouplings tc = trotter_couplings(ModelParams{0.8, 2.0, 1.0}, cfg.ell);
      const ClusterPartition part = build_clusters(state, tc, ep, QmcMode::standard, rng);
      for (int c = 0; c < part.num_clusters; ++c) {
        const auto members = part.cluster(c);
        for (std::int32_t v : members) CHECK(state.spins[v] == state.spins[members[0]]);
      }
    }
  }
}

TEST_CASE("lc clusters join chain-mates across the tau=0 slice") {
  // Three logical qubits each embedded to size 2 (the cartoon scenario).
  const NativeProblem p = three_site_chain();
  Rng emb_rng(77);
  const EmbeddedProblem ep = embed_random(p, {2, 2, 2}, -2.0, emb_rng);
  QmcRunConfig cfg;
  cfg.ell = 6;
  cfg.mode = QmcMode::lc;
  cfg.seed = 5;
  Rng run_rng(cfg.seed);
  PathIntegralState state = init_state(ep, cfg, run_rng);
  const TrotterCouplings tc = trotter_couplings(ModelParams{1.2, 1.5, 1.0}, cfg.ell);
  const ClusterPartition part = build_clusters(state, tc, ep, QmcMode::lc, run_rng);
  for (int l = 0; l < 3; ++l) {
    const int a = ep.embedding.physical_index(l, 0) * cfg.ell;  // (chain spin 0, tau=0)
    const int b = ep.embedding.physical_index(l, 1) * cfg.ell;  // (chain spin 1, tau=0)
    CHECK(part.cluster_of[a] == part.cluster_of[b]);
  }
  // A broken slice-0 chain is an invariant violation, not a valid input.
  state.at(ep.embedding.physical_index(0, 0), 0) = 1;
  state.at(ep.embedding.physical_index(0, 1), 0) = -1;
  CHECK_THROWS_AS(build_clusters(state, tc, ep, QmcMode::lc, run_rng), std::logic_error);
}

TEST_CASE("spatial energy delta") {
  const NativeProblem p = square_lattice_afm(2);
  const EmbeddedProblem ep = embed_uniform(p, 1, -2.0);
  QmcRunConfig cfg;
  cfg.ell = 4;
  cfg.mode = QmcMode::standard;
  Rng rng(31);

  SUBCASE("flipping the entire lattice costs nothing") {
    PathIntegralState state = init_state(ep, cfg, rng);
    ClusterPartition whole;
    whole.num_clusters = 1;
    whole.cluster_of.assign(state.spins.size(), 0);
    whole.offsets = {0, static_cast<std::int32_t>(state.spins.size())};
    whole.members.resize(state.spins.size());
    for (std::size_t v = 0; v < state.spins.size(); ++v)
      whole.members[v] = static_cast<std::int32_t>(v);
    CHECK(spatial_energy_delta(state, whole, 0, ep) == doctest::Approx(0.0));
  }
  SUBCASE("single corner spin with two satisfied bonds costs +4 Delta") {
    PathIntegralState state = init_state(ep, cfg, rng);
    SpinConfig neel(4);
    for (int i = 0; i < 4; ++i) neel[i] = ((p.coords[i][0] + p.coords[i][1]) % 2 == 0) ? 1 : -1;
    fill_uniform_worldlines(state, neel);
    const TrotterCouplings tc{0.25, 0.0, 0.0};
    Rng coin(1);
    const ClusterPartition part = build_clusters(state, tc, ep, QmcMode::standard, coin);
    const int cluster_id = part.cluster_of[0];  // vertex (site 0, tau 0)
    CHECK(part.cluster(cluster_id).size() == 1);
    CHECK(spatial_energy_delta(state, part, cluster_id, ep) == doctest::Approx(4.0));
    CHECK(spatial_energy_delta(state, part, cluster_id, ep, 0.5) == doctest::Approx(2.0));
  }
  SUBCASE("matches a brute-force energy recomputation") {
    const EmbeddedProblem ep2 = embed_uniform(p, 2, -1.5);
    QmcRunConfig cfg2;
    cfg2.ell = 5;
    cfg2.mode = QmcMode::standard;
    Rng rng2(8);
    PathIntegralState state = init_state(ep2, cfg2, rng2);
    const TrotterCouplings tc = trotter_couplings(ModelParams{0.9, 1.5, 1.0}, cfg2.ell);
    const ClusterPartition part = build_clusters(state, tc, ep2, QmcMode::standard, rng2);
    const double delta = 1.0;
    for (int c = 0; c < part.num_clusters; ++c) {
      const double before = total_spatial_energy(state, ep2, delta);
      PathIntegralState flipped = state;
      for (std::int32_t v : part.cluster(c)) flipped.spins[v] = -flipped.spins[v];
      const double after = total_spatial_energy(flipped, ep2, delta);
      CHECK(spatial_energy_delta(state, part, c, ep2, delta) ==
            doctest::Approx(after - before).epsilon(1e-10));
    }
  }
}

TEST_CASE("metropolis acceptance") {
  const NativeProblem p = square_lattice_afm(2);
  const EmbeddedProblem ep = embed_uniform(p, 1, -2.0);
  QmcRunConfig cfg;
  cfg.ell = 4;
  cfg.mode = QmcMode::standard;
  Rng rng(3);

  SUBCASE("downhill flips always accepted") {
    PathIntegralState state = init_state(ep, cfg, rng);
    fill_uniform_worldlines(state, SpinConfig{1, 1, 1, 1});
    const TrotterCouplings tc{0.25, 0.0, 0.0};
    Rng coin(2);
    const ClusterPartition part = build_clusters(state, tc, ep, QmcMode::standard, coin);
    const int cid = part.cluster_of[0];
    CHECK(spatial_energy_delta(state, part, cid, ep) < 0.0);
    for (int trial = 0; trial < 50; ++trial) {
      PathIntegralState copy = state;
      CHECK(metropolis_flip(copy, part, cid, tc, ep, 1.0, coin));
      CHECK(copy.spins[0] == -state.spins[0]);
    }
  }
  SUBCASE("uphill flip accepted with probability exp(-beta_eff dE)") {
    PathIntegralState state = init_state(ep, cfg, rng);
    SpinConfig neel(4);
    for (int i = 0; i < 4; ++i) neel[i] = ((p.coords[i][0] + p.coords[i][1]) % 2 == 0) ? 1 : -1;
    fill_uniform_worldlines(state, neel);
    const TrotterCouplings tc{0.01, 0.0, 0.0};
    Rng coin(4);
    const ClusterPartition part = build_clusters(state, tc, ep, QmcMode::standard, coin);
    const int cid = part.cluster_of[0];
    REQUIRE(spatial_energy_delta(state, part, cid, ep) == doctest::Approx(4.0));
    const double p_accept = std::exp(-0.04);
    const int trials = 200000;
    int accepted = 0;
    for (int t = 0; t < trials; ++t) {
      PathIntegralState copy = state;
      if (metropolis_flip(copy, part, cid, tc, ep, 1.0, coin)) ++accepted;
    }
    const double rate = static_cast<double>(accepted) / trials;
    const double sigma = std::sqrt(p_accept * (1 - p_accept) / trials);
    CHECK(std::abs(rate - p_accept) < 4.0 * sigma);
  }
}

TEST_CASE("sweeps are reproducible and preserve the lc invariant") {
  const NativeProblem p = square_lattice_afm(2);
  Rng emb_rng(21);
  const EmbeddedProblem ep = embed_random(p, {2, 1, 2, 1}, -2.0, emb_rng);
  const ModelParams params{1.3, 1.2, 1.0};
  QmcRunConfig cfg;
  cfg.mode = QmcMode::lc;
  cfg.ell = 12;
  cfg.seed = 99;
  cfg.sweeps = 60;
  cfg.thermalization_sweeps = 0;

  SUBCASE("same seed, same trajectory") {
    QmcRun a(ep, params, cfg), b(ep, params, cfg);
    for (int i = 0; i < 40; ++i) {
      a.step();
      b.step();
    }
    CHECK(a.state().spins == b.state().spins);
  }
  SUBCASE("slice 0 stays logical through many sweeps") {
    QmcRun run(ep, params, cfg);
    for (int i = 0; i < 60; ++i) {
      run.step();
      CHECK(is_logical(ep, run.state().slice(0)));
    }
  }
}

TEST_CASE("classical limit relaxes to the Neel ground state") {
  const NativeProblem p = square_lattice_afm(2);
  const EmbeddedProblem ep = embed_uniform(p, 1, -2.0);
  const ModelParams params{0.0, 3.0, 1.0};
  QmcRunConfig cfg;
  cfg.mode = QmcMode::standard;
  cfg.ell = 8;
  cfg.seed = 17;
  cfg.sweeps = 200;
  cfg.thermalization_sweeps = 0;
  QmcRun run(ep, params, cfg);
  const RunSeries series = run.run();
  // Diagnostic with a pinned seed: by the end the diagonal energy sits at the
  // ground state -4.
  CHECK(series.e_sum.back() == doctest::Approx(-4.0));
}

TEST_CASE("thermalization") {
  SUBCASE("geometric schedule hits both endpoints") {
    const std::vector<double> betas = thermalization_schedule(1.645, 10);
    CHECK(betas.front() == doctest::Approx(0.1645).epsilon(1e-12));
    CHECK(betas.back() == doctest::Approx(1.645).epsilon(1e-15));
    for (std::size_t i = 1; i < betas.size(); ++i) {
      CHECK(betas[i] > betas[i - 1]);
      CHECK(betas[i] / betas[i - 1] ==
            doctest::Approx(std::pow(10.0, 1.0 / 9.0)).epsilon(1e-9));
    }
  }
  SUBCASE("zero thermalization sweeps leaves the state untouched") {
    const NativeProblem p = square_lattice_afm(2);
    const EmbeddedProblem ep = embed_uniform(p, 1, -2.0);
    QmcRunConfig cfg;
    cfg.mode = QmcMode::standard;
    cfg.ell = 6;
    cfg.seed = 12;
    cfg.thermalization_sweeps = 0;
    Rng rng(cfg.seed);
    PathIntegralState state = init_state(ep, cfg, rng);
    const PathIntegralState before = state;
    thermalize(state, ep, ModelParams{1.0, 1.0, 1.0}, cfg, rng);
    CHECK(state.spins == before.spins);
  }
  SUBCASE("short and long thermalization land in the same regime") {
    const NativeProblem p = square_lattice_afm(4);
    const EmbeddedProblem ep = embed_uniform(p, 1, -2.0);
    const ModelParams params{1.5, 2.0, 1.0};
    const auto run_with = [&](long therm, std::uint64_t seed) {
      QmcRunConfig cfg;
      cfg.mode = QmcMode::lc;
      cfg.ell = 24;
      cfg.seed = seed;
      cfg.sweeps = 600;
      cfg.thermalization_sweeps = therm;
      QmcRun run(ep, params, cfg);
      const RunSeries series = run.run();
      return ratio_binned_error(series.e_sum, series.count);
    };
    const RatioEstimate short_t = run_with(300, 1);
    const RatioEstimate long_t = run_with(3000, 2);
    const double sigma = std::hypot(short_t.stderr_estimate, long_t.stderr_estimate);
    CHECK(std::abs(short_t.value - long_t.value) < 4.0 * sigma);
  }
}

TEST_CASE("measure per mode") {
  const NativeProblem p = square_lattice_afm(2);
  QmcRunConfig cfg;
  cfg.ell = 10;
  cfg.seed = 44;

  SUBCASE("lc returns exactly one unembedded sample") {
    const EmbeddedProblem ep = embed_uniform(p, 2, -2.0);
    cfg.mode = QmcMode::lc;
    Rng rng(cfg.seed);
    const PathIntegralState state = init_state(ep, cfg, rng);
    const MeasureResult mr = measure(state, ep, QmcMode::lc);
    REQUIRE(mr.samples.size() == 1);
    CHECK(mr.samples[0].size() == 4);
    CHECK(mr.scanned == 1);
  }
  SUBCASE("rejection with K=1 accepts every slice") {
    const EmbeddedProblem ep = embed_uniform(p, 1, -2.0);
    cfg.mode = QmcMode::rejection;
    Rng rng(cfg.seed);
    const PathIntegralState state = init_state(ep, cfg, rng);
    const MeasureResult mr = measure(state, ep, QmcMode::rejection);
    CHECK(mr.samples.size() == 10);
    CHECK(mr.scanned == 10);
  }
  SUBCASE("standard returns the raw physical slice") {
    const EmbeddedProblem ep = embed_uniform(p, 2, -2.0);
    cfg.mode = QmcMode::standard;
    Rng rng(cfg.seed);
    const PathIntegralState state = init_state(ep, cfg, rng);
    const MeasureResult mr = measure(state, ep, QmcMode::standard);
    REQUIRE(mr.samples.size() == 1);
    CHECK(mr.samples[0].size() == 8);
    CHECK(mr.samples[0] == state.slice(0));
  }
}

TEST_CASE("logical probability estimator") {
  SUBCASE("K=1 gives exactly 1 with zero error") {
    const NativeProblem p = square_lattice_afm(2);
    const EmbeddedProblem ep = embed_uniform(p, 1, -2.0);
    QmcRunConfig cfg;
    cfg.mode = QmcMode::rejection;
    cfg.ell = 10;
    cfg.seed = 9;
    cfg.sweeps = 128;
    cfg.thermalization_sweeps = 10;
    QmcRun run(ep, ModelParams{1.0, 1.0, 1.0}, cfg);
    const PLEstimate est = estimate_logical_probability(run.run());
    CHECK(est.value == doctest::Approx(1.0));
    CHECK(est.stderr_estimate == doctest::Approx(0.0));
  }
  SUBCASE("Delta = 0 reproduces the closed-form 2^{-N(K-1)}") {
    const NativeProblem p = two_site_problem();
    const EmbeddedProblem ep = embed_uniform(p, 2, -2.0);
    const ModelParams params{1.0, 1.0, 0.0};
    QmcRunConfig cfg;
    cfg.mode = QmcMode::rejection;
    cfg.ell = 30;
    cfg.seed = 1234;
    cfg.sweeps = 4096;
    cfg.thermalization_sweeps = 100;
    QmcRun run(ep, params, cfg);
    const PLEstimate est = estimate_logical_probability(run.run());
    CHECK(std::abs(est.value - 0.25) < 3.0 * est.stderr_estimate);
    CHECK(est.stderr_estimate < 0.02);
  }
  SUBCASE("empty series rejected") {
    CHECK_THROWS_AS(estimate_logical_probability(RunSeries{}), InsufficientDataError);
  }
}

TEST_CASE("stationary distribution matches H_eff on a tiny lattice") {
  // Single free spin, ell = 3: 8 effective states, standard mode.
  const NativeProblem p = single_site_problem();
  const EmbeddedProblem ep = embed_uniform(p, 1, -2.0);
  const ModelParams params{0.9, 0.9, 1.0};
  QmcRunConfig cfg;
  cfg.mode = QmcMode::standard;
  cfg.ell = 3;
  cfg.seed = 2024;
  cfg.sweeps = 1;
  cfg.thermalization_sweeps = 0;
  QmcRun run(ep, params, cfg);
  const std::vector<double> expected =
      testutil::effective_distribution(ep, params, cfg.ell, false);
  std::vector<long> counts(expected.size(), 0);
  const long sweeps = 300000;
  for (long t = 0; t < sweeps; ++t) {
    run.step();
    ++counts[testutil::state_index(run.state())];
  }
  const double pvalue = testutil::chi_squared_pvalue(counts, expected, sweeps);
  CHECK(pvalue > 0.001);
}

TEST_CASE("checkpoint round trip resumes the exact trajectory") {
  const NativeProblem p = square_lattice_afm(2);
  Rng emb_rng(2);
  const EmbeddedProblem ep = embed_random(p, {2, 2, 1, 1}, -2.0, emb_rng);
  const ModelParams params{1.1, 1.0, 1.0};
  QmcRunConfig cfg;
  cfg.mode = QmcMode::lc;
  cfg.ell = 15;
  cfg.seed = 5150;
  cfg.sweeps = 50;
  cfg.thermalization_sweeps = 20;

  QmcRun reference(ep, params, cfg);
  reference.thermalize();
  for (int i = 0; i < 20; ++i) reference.step();

  std::stringstream blob;
  reference.save_checkpoint(blob);

  for (int i = 0; i < 30; ++i) reference.step();

  QmcRun resumed(ep, params, cfg);
  resumed.load_checkpoint(blob);
  CHECK(resumed.sweeps_done() == 20);
  for (int i = 0; i < 30; ++i) resumed.step();
  CHECK(resumed.state().spins == reference.state().spins);

  SUBCASE("corrupted blob rejected") {
    std::stringstream bad("not a checkpoint");
    QmcRun other(ep, params, cfg);
    CHECK_THROWS_AS(other.load_checkpoint(bad), std::runtime_error);
  }
}

TEST_CASE("run config validation") {
  QmcRunConfig cfg;
  cfg.sweeps = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.sweeps = 1;
  cfg.ell = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.ell = 2;
  CHECK_NOTHROW(cfg.validate());
}
