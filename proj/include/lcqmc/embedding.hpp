#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcqmc/model.hpp"
#include "lcqmc/rng.hpp"

namespace lcqmc {

// Chain decomposition of the logical qubits. Physical qubit ids within a
// chain are consecutive, chain l occupying [offset[l], offset[l] + size[l]).
struct Embedding {
  std::vector<int> chain_sizes;
  std::vector<int> chain_offsets;
  int total_physical = 0;          // N~ = sum of chain sizes
  double avg_size = 1.0;           // K = N~ / N
  double j_ferro = -2.0;           // intra-chain coupling, < 0, units of Delta
  std::vector<Bond> inter_bonds;   // physical bonds realizing the native bonds
  std::uint64_t seed = 0;          // realization seed (0 for deterministic schemes)

  int physical_index(int logical, int i) const { return chain_offsets[logical] + i; }
  int num_logical() const { return static_cast<int>(chain_sizes.size()); }
};

struct EmbeddedProblem {
  NativeProblem native;
  Embedding embedding;
  std::vector<Bond> all_bonds;     // intra-chain (j_ferro) + inter-chain, merged
  std::vector<int> logical_of;     // physical qubit -> logical qubit

  // CSR adjacency over all_bonds, built at construction; used by the QMC
  // cluster updates.
  std::vector<int> adj_offsets;
  std::vector<int> adj_site;
  std::vector<double> adj_coupling;

  int num_physical() const { return embedding.total_physical; }
  void build_adjacency();
};

// Draws N chain sizes summing to round(K*N). Integer K gives all chains size
// K; otherwise the extra spins land one at a time on uniformly random logical
// qubits whose chain is still below size 3.
std::vector<int> chain_size_distribution(int num_logical, double k, Rng& rng);

// One randomly chosen inter-chain bond per native bond (coupling Delta).
EmbeddedProblem embed_random(const NativeProblem& problem, const std::vector<int>& sizes,
                             double j_ferro, Rng& rng);

// Every chain has size K and every native bond is realized by K parallel
// bonds of coupling Delta/K between replica spins.
EmbeddedProblem embed_uniform(const NativeProblem& problem, int k, double j_ferro);

// True iff no chain is broken (all physical spins of each chain agree).
bool is_logical(const EmbeddedProblem& embedded, const SpinConfig& config);

// Projects a logical physical configuration to the native variables.
SpinConfig unembed(const EmbeddedProblem& embedded, const SpinConfig& config);

std::string embedding_to_json(const EmbeddedProblem& embedded);

}  // namespace lcqmc
