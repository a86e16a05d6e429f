#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "lcqmc/embedding.hpp"
#include "lcqmc/model.hpp"
#include "lcqmc/rng.hpp"

using namespace lcqmc;

namespace {

// Native problem with two sites and one bond, for single-bond checks.
NativeProblem two_site_problem() {
  NativeProblem p;
  p.side = 0;
  p.num_sites = 2;
  p.coords = {{0, 0}, {1, 0}};
  p.bonds = {{0, 1, 1.0}};
  return p;
}

}  // namespace

TEST_CASE("chain size distribution") {
  Rng rng(3);
  SUBCASE("K=1 gives all ones") {
    const auto sizes = chain_size_distribution(50, 1.0, rng);
    CHECK(std::all_of(sizes.begin(), sizes.end(), [](int s) { return s == 1; }));
  }
  SUBCASE("integer K gives uniform sizes") {
    const auto sizes = chain_size_distribution(4, 2.0, rng);
    CHECK(sizes == std::vector<int>{2, 2, 2, 2});
  }
  SUBCASE("K=1.1 over 100 qubits sums to 110 with sizes in {1,2,3}") {
    const auto sizes = chain_size_distribution(100, 1.1, rng);
    CHECK(std::accumulate(sizes.begin(), sizes.end(), 0) == 110);
    for (int s : sizes) {
      CHECK(s >= 1);
      CHECK(s <= 3);
    }
  }
  SUBCASE("K=2.5 keeps the size-3 cap") {
    const auto sizes = chain_size_distribution(40, 2.5, rng);
    CHECK(std::accumulate(sizes.begin(), sizes.end(), 0) == 100);
    CHECK(*std::max_element(sizes.begin(), sizes.end()) <= 3);
  }
  SUBCASE("non-integer K >= 3 is unsupported") {
    CHECK_THROWS_AS(chain_size_distribution(10, 3.5, rng), std::invalid_argument);
    CHECK_THROWS_AS(chain_size_distribution(10, 0.5, rng), std::invalid_argument);
  }
}

TEST_CASE("random embedding with trivial sizes reproduces the native problem") {
  const NativeProblem p = square_lattice_afm(2);
  Rng rng(5);
  const EmbeddedProblem ep = embed_random(p, std::vector<int>(4, 1), -2.0, rng);
  CHECK(ep.num_physical() == 4);
  REQUIRE(ep.all_bonds.size() == p.bonds.size());
  for (std::size_t i = 0; i < p.bonds.size(); ++i) {
    CHECK(ep.all_bonds[i].a == p.bonds[i].a);
    CHECK(ep.all_bonds[i].b == p.bonds[i].b);
    CHECK(ep.all_bonds[i].j == p.bonds[i].j);
  }
}

TEST_CASE("random embedding bond bookkeeping for L=2, K=2") {
  const NativeProblem p = square_lattice_afm(2);
  Rng rng(5);
  const EmbeddedProblem ep = embed_random(p, {2, 2, 2, 2}, -2.0, rng);
  CHECK(ep.num_physical() == 8);
  int ferro = 0, inter = 0;
  for (const Bond& b : ep.all_bonds) {
    if (b.j == -2.0) ++ferro;
    if (b.j == 1.0) ++inter;
  }
  CHECK(ferro == 4);
  CHECK(inter == 4);
  CHECK(ep.all_bonds.size() == 8);
  // Inter-chain endpoints stay inside the right chains.
  for (const Bond& b : ep.embedding.inter_bonds) {
    CHECK(ep.logical_of[b.a] != ep.logical_of[b.b]);
  }
}

TEST_CASE("random embedding is deterministic for a fixed seed") {
  const NativeProblem p = square_lattice_afm(3);
  Rng rng_a(42), rng_b(42);
  const auto sizes_a = chain_size_distribution(9, 1.4, rng_a);
  const auto sizes_b = chain_size_distribution(9, 1.4, rng_b);
  CHECK(sizes_a == sizes_b);
  const EmbeddedProblem a = embed_random(p, sizes_a, -2.0, rng_a);
  const EmbeddedProblem b = embed_random(p, sizes_b, -2.0, rng_b);
  REQUIRE(a.all_bonds.size() == b.all_bonds.size());
  for (std::size_t i = 0; i < a.all_bonds.size(); ++i) {
    CHECK(a.all_bonds[i].a == b.all_bonds[i].a);
    CHECK(a.all_bonds[i].b == b.all_bonds[i].b);
    CHECK(a.all_bonds[i].j == b.all_bonds[i].j);
  }
}

TEST_CASE("embedding rejects non-negative J_F") {
  const NativeProblem p = square_lattice_afm(2);
  Rng rng(1);
  CHECK_THROWS_AS(embed_random(p, {1, 1, 1, 1}, 0.5, rng), std::invalid_argument);
  CHECK_THROWS_AS(embed_uniform(p, 2, 0.0), std::invalid_argument);
}

TEST_CASE("uniform embedding K=1 is the native problem") {
  const NativeProblem p = square_lattice_afm(3);
  const EmbeddedProblem ep = embed_uniform(p, 1, -2.0);
  CHECK(ep.num_physical() == 9);
  REQUIRE(ep.all_bonds.size() == p.bonds.size());
  for (std::size_t i = 0; i < p.bonds.size(); ++i) CHECK(ep.all_bonds[i].j == 1.0);
}

TEST_CASE("uniform embedding splits couplings K ways") {
  SUBCASE("single native bond, K=3") {
    const EmbeddedProblem ep = embed_uniform(two_site_problem(), 3, -2.0);
    CHECK(ep.num_physical() == 6);
    CHECK(ep.embedding.inter_bonds.size() == 3);
    for (const Bond& b : ep.embedding.inter_bonds) CHECK(b.j == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("L=2, K=2: couplings per native bond sum to Delta") {
    const NativeProblem p = square_lattice_afm(2);
    const EmbeddedProblem ep = embed_uniform(p, 2, -2.0);
    CHECK(ep.num_physical() == 8);
    double inter_total = 0.0;
    for (const Bond& b : ep.embedding.inter_bonds) inter_total += b.j;
    CHECK(inter_total == doctest::Approx(static_cast<double>(p.bonds.size())));
    CHECK(ep.embedding.inter_bonds.size() == 2 * p.bonds.size());
  }
}

TEST_CASE("chains are ferromagnetic paths with consecutive ids") {
  const NativeProblem p = square_lattice_afm(2);
  const EmbeddedProblem ep = embed_uniform(p, 3, -1.5);
  std::set<std::pair<int, int>> ferro_bonds;
  for (const Bond& b : ep.all_bonds)
    if (b.j == -1.5) ferro_bonds.insert({std::min(b.a, b.b), std::max(b.a, b.b)});
  for (int l = 0; l < 4; ++l) {
    for (int i = 0; i + 1 < 3; ++i) {
      const int u = ep.embedding.physical_index(l, i);
      CHECK(ferro_bonds.count({u, u + 1}) == 1);
    }
  }
  CHECK(ferro_bonds.size() == 8);
}

TEST_CASE("is_logical and unembed") {
  const NativeProblem p = square_lattice_afm(2);
  const EmbeddedProblem native = embed_uniform(p, 1, -2.0);
  SUBCASE("all chains of size 1 are always logical") {
    CHECK(is_logical(native, SpinConfig{1, -1, 1, -1}));
    CHECK(unembed(native, SpinConfig{1, -1, 1, -1}) == SpinConfig{1, -1, 1, -1});
  }
  const EmbeddedProblem ep = embed_uniform(p, 2, -2.0);
  SUBCASE("broken chain detected") {
    SpinConfig c(8, 1);
    c[1] = -1;  // second spin of chain 0
    CHECK_FALSE(is_logical(ep, c));
    CHECK_THROWS_AS(unembed(ep, c), NotLogicalError);
  }
  SUBCASE("doubled Neel state unembeds to the Neel state") {
    SpinConfig neel{1, -1, -1, 1};
    SpinConfig doubled(8);
    for (int l = 0; l < 4; ++l) {
      doubled[2 * l] = neel[l];
      doubled[2 * l + 1] = neel[l];
    }
    CHECK(is_logical(ep, doubled));
    CHECK(unembed(ep, doubled) == neel);
  }
  SUBCASE("length mismatch throws") {
    CHECK_THROWS_AS(is_logical(ep, SpinConfig{1, 1}), std::invalid_argument);
  }
}

TEST_CASE("logical configurations see a constant energy shift") {
  const NativeProblem p = square_lattice_afm(2);
  Rng rng(9);
  const auto sizes = std::vector<int>{2, 2, 2, 2};
  for (const EmbeddedProblem& ep :
       {embed_uniform(p, 2, -2.0), embed_random(p, sizes, -2.0, rng)}) {
    int extra = 0;
    for (int s : ep.embedding.chain_sizes) extra += s - 1;
    const double shift = ep.embedding.j_ferro * extra;
    for (int z = 0; z < 16; ++z) {
      SpinConfig logical(4);
      for (int l = 0; l < 4; ++l) logical[l] = ((z >> l) & 1) ? -1 : 1;
      SpinConfig physical(ep.num_physical());
      for (int q = 0; q < ep.num_physical(); ++q) physical[q] = logical[ep.logical_of[q]];
      const double native_e = bond_energy(p.bonds, logical);
      const double embedded_e = bond_energy(ep.all_bonds, physical);
      CHECK(embedded_e == doctest::Approx(native_e + shift));
    }
  }
}

TEST_CASE("extra variable count matches the size distribution") {
  Rng rng(12);
  const NativeProblem p = square_lattice_afm(4);
  const auto sizes = chain_size_distribution(16, 1.5, rng);
  const EmbeddedProblem ep = embed_random(p, sizes, -2.0, rng);
  CHECK(ep.num_physical() - p.num_sites == std::accumulate(sizes.begin(), sizes.end(), 0) - 16);
  CHECK(ep.embedding.avg_size == doctest::Approx(1.5));
}

TEST_CASE("embedding JSON serialization shape") {
  const NativeProblem p = square_lattice_afm(2);
  const EmbeddedProblem ep = embed_uniform(p, 2, -2.0);
  const std::string text = embedding_to_json(ep);
  CHECK(text.find("\"chains\"") != std::string::npos);
  CHECK(text.find("\"J_F\":-2.0") != std::string::npos);
  CHECK(text.find("\"inter_bonds\"") != std::string::npos);
  CHECK(text.find("\"seed\"") != std::string::npos);
}
