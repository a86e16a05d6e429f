#include "lcqmc/model.hpp"

#include <nlohmann/json.hpp>

#include <stdexcept>

namespace lcqmc {

void ModelParams::validate() const {
  if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
  if (beta <= 0.0) throw std::invalid_argument("beta must be > 0");
  if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
}

NativeProblem square_lattice_afm(int side) {
  if (side < 2) throw std::invalid_argument("square_lattice_afm: side length must be >= 2");
  NativeProblem p;
  p.side = side;
  p.num_sites = side * side;
  p.coords.reserve(p.num_sites);
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) p.coords.push_back({x, y});
  // Free boundaries: right and up neighbours only.
  p.bonds.reserve(2 * side * (side - 1));
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const int i = y * side + x;
      if (x + 1 < side) p.bonds.push_back({i, i + 1, 1.0});
      if (y + 1 < side) p.bonds.push_back({i, i + side, 1.0});
    }
  }
  return p;
}

double bond_energy(const std::vector<Bond>& bonds, const SpinConfig& config, double delta) {
  double e = 0.0;
  for (const Bond& b : bonds) e += b.j * config[b.a] * config[b.b];
  return delta * e;
}

double diagonal_energy(const NativeProblem& problem, const SpinConfig& config,
                       const ModelParams& params) {
  if (static_cast<int>(config.size()) != problem.num_sites)
    throw std::invalid_argument("diagonal_energy: config length does not match site count");
  return bond_energy(problem.bonds, config, params.delta);
}

std::string problem_to_json(const NativeProblem& problem) {
  nlohmann::json j;
  j["L"] = problem.side;
  auto& bonds = j["bonds"] = nlohmann::json::array();
  for (const Bond& b : problem.bonds) bonds.push_back({b.a, b.b, b.j});
  auto& coords = j["coords"] = nlohmann::json::array();
  for (const auto& c : problem.coords) coords.push_back({c[0], c[1]});
  return j.dump();
}

NativeProblem problem_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  NativeProblem p;
  p.side = j.at("L").get<int>();
  for (const auto& c : j.at("coords")) p.coords.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  p.num_sites = static_cast<int>(p.coords.size());
  for (const auto& b : j.at("bonds"))
    p.bonds.push_back({b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<double>()});
  return p;
}

}  // namespace lcqmc
