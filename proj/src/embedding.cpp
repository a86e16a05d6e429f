#include "lcqmc/embedding.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <stdexcept>

namespace lcqmc {

namespace {

bool is_integral(double k) { return std::abs(k - std::round(k)) < 1e-9; }

Embedding make_chain_layout(const std::vector<int>& sizes, double j_ferro, std::uint64_t seed) {
  Embedding emb;
  emb.chain_sizes = sizes;
  emb.chain_offsets.resize(sizes.size());
  int offset = 0;
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    emb.chain_offsets[l] = offset;
    offset += sizes[l];
  }
  emb.total_physical = offset;
  emb.avg_size = static_cast<double>(offset) / static_cast<double>(sizes.size());
  emb.j_ferro = j_ferro;
  emb.seed = seed;
  return emb;
}

EmbeddedProblem assemble(const NativeProblem& problem, Embedding emb) {
  EmbeddedProblem ep;
  ep.native = problem;
  ep.logical_of.resize(emb.total_physical);
  for (int l = 0; l < emb.num_logical(); ++l)
    for (int i = 0; i < emb.chain_sizes[l]; ++i) ep.logical_of[emb.physical_index(l, i)] = l;
  // Intra-chain path bonds first, then the inter-chain bonds.
  for (int l = 0; l < emb.num_logical(); ++l)
    for (int i = 0; i + 1 < emb.chain_sizes[l]; ++i)
      ep.all_bonds.push_back({emb.physical_index(l, i), emb.physical_index(l, i + 1), emb.j_ferro});
  for (const Bond& b : emb.inter_bonds) ep.all_bonds.push_back(b);
  ep.embedding = std::move(emb);
  ep.build_adjacency();
  return ep;
}

}  // namespace

void EmbeddedProblem::build_adjacency() {
  const int n = embedding.total_physical;
  std::vector<int> degree(n, 0);
  for (const Bond& b : all_bonds) {
    ++degree[b.a];
    ++degree[b.b];
  }
  adj_offsets.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) adj_offsets[i + 1] = adj_offsets[i] + degree[i];
  adj_site.resize(adj_offsets[n]);
  adj_coupling.resize(adj_offsets[n]);
  std::vector<int> cursor(adj_offsets.begin(), adj_offsets.end() - 1);
  for (const Bond& b : all_bonds) {
    adj_site[cursor[b.a]] = b.b;
    adj_coupling[cursor[b.a]++] = b.j;
    adj_site[cursor[b.b]] = b.a;
    adj_coupling[cursor[b.b]++] = b.j;
  }
}

std::vector<int> chain_size_distribution(int num_logical, double k, Rng& rng) {
  if (k < 1.0) throw std::invalid_argument("chain_size_distribution: K must be >= 1");
  if (!is_integral(k) && k >= 3.0)
    throw std::invalid_argument("chain_size_distribution: non-integer K >= 3 is unsupported");
  if (is_integral(k)) return std::vector<int>(num_logical, static_cast<int>(std::round(k)));

  const long target = std::lround(k * num_logical);
  std::vector<int> sizes(num_logical, 1);
  long extra = target - num_logical;
  while (extra > 0) {
    const int l = static_cast<int>(rng.uniform_int(num_logical));
    if (sizes[l] < 3) {
      ++sizes[l];
      --extra;
    }
  }
  return sizes;
}

EmbeddedProblem embed_random(const NativeProblem& problem, const std::vector<int>& sizes,
                             double j_ferro, Rng& rng) {
  if (static_cast<int>(sizes.size()) != problem.num_sites)
    throw std::invalid_argument("embed_random: one chain size per logical qubit required");
  if (j_ferro >= 0.0) throw std::invalid_argument("embed_random: J_F must be < 0");
  Embedding emb = make_chain_layout(sizes, j_ferro, 0);
  emb.inter_bonds.reserve(problem.bonds.size());
  for (const Bond& b : problem.bonds) {
    const int p = emb.physical_index(b.a, static_cast<int>(rng.uniform_int(sizes[b.a])));
    const int q = emb.physical_index(b.b, static_cast<int>(rng.uniform_int(sizes[b.b])));
    emb.inter_bonds.push_back({p, q, b.j});
  }
  return assemble(problem, std::move(emb));
}

EmbeddedProblem embed_uniform(const NativeProblem& problem, int k, double j_ferro) {
  if (k < 1) throw std::invalid_argument("embed_uniform: K must be a positive integer");
  if (j_ferro >= 0.0) throw std::invalid_argument("embed_uniform: J_F must be < 0");
  Embedding emb = make_chain_layout(std::vector<int>(problem.num_sites, k), j_ferro, 0);
  emb.inter_bonds.reserve(problem.bonds.size() * k);
  for (const Bond& b : problem.bonds)
    for (int i = 0; i < k; ++i)
      emb.inter_bonds.push_back({emb.physical_index(b.a, i), emb.physical_index(b.b, i), b.j / k});
  return assemble(problem, std::move(emb));
}

bool is_logical(const EmbeddedProblem& embedded, const SpinConfig& config) {
  if (static_cast<int>(config.size()) != embedded.num_physical())
    throw std::invalid_argument("is_logical: config length does not match physical qubit count");
  const Embedding& emb = embedded.embedding;
  for (int l = 0; l < emb.num_logical(); ++l) {
    const int off = emb.chain_offsets[l];
    for (int i = 1; i < emb.chain_sizes[l]; ++i)
      if (config[off + i] != config[off]) return false;
  }
  return true;
}

SpinConfig unembed(const EmbeddedProblem& embedded, const SpinConfig& config) {
  if (!is_logical(embedded, config))
    throw NotLogicalError("unembed: configuration has a broken chain");
  const Embedding& emb = embedded.embedding;
  SpinConfig logical(emb.num_logical());
  for (int l = 0; l < emb.num_logical(); ++l) logical[l] = config[emb.chain_offsets[l]];
  return logical;
}

std::string embedding_to_json(const EmbeddedProblem& embedded) {
  nlohmann::json j;
  const Embedding& emb = embedded.embedding;
  auto& chains = j["chains"] = nlohmann::json::array();
  for (int l = 0; l < emb.num_logical(); ++l) {
    nlohmann::json chain = nlohmann::json::array();
    for (int i = 0; i < emb.chain_sizes[l]; ++i) chain.push_back(emb.physical_index(l, i));
    chains.push_back(std::move(chain));
  }
  j["J_F"] = emb.j_ferro;
  auto& ib = j["inter_bonds"] = nlohmann::json::array();
  for (const Bond& b : emb.inter_bonds) ib.push_back({b.a, b.b, b.j});
  j["seed"] = emb.seed;
  return j.dump();
}

}  // namespace lcqmc
