#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lcqmc/errors.hpp"

namespace lcqmc {

// One two-body coupling J * s_a * s_b. Couplings are dimensionless, in units
// of the problem scale Delta.
struct Bond {
  int a = 0;
  int b = 0;
  double j = 0.0;
};

// Spin configuration, one +/-1 entry per site.
using SpinConfig = std::vector<std::int8_t>;

// Antiferromagnet on an open L x L square lattice: N = L^2 sites with unit
// couplings between nearest neighbours.
struct NativeProblem {
  int side = 0;
  int num_sites = 0;
  std::vector<std::array<int, 2>> coords;
  std::vector<Bond> bonds;
};

// Model parameters in units of the coupling scale Delta. Delta itself is kept
// as a field (normally 1) so that the Delta=0 limit stays expressible.
struct ModelParams {
  double gamma = 0.0;  // transverse field, >= 0
  double beta = 1.0;   // inverse temperature, > 0
  double delta = 1.0;  // coupling scale, >= 0

  void validate() const;
};

NativeProblem square_lattice_afm(int side);

// Sum of Delta * J_ij * s_i * s_j over a bond list.
double bond_energy(const std::vector<Bond>& bonds, const SpinConfig& config, double delta = 1.0);

// Diagonal part of the native Hamiltonian, Delta * sum_<ij> s_i s_j.
double diagonal_energy(const NativeProblem& problem, const SpinConfig& config,
                       const ModelParams& params);

std::string problem_to_json(const NativeProblem& problem);
NativeProblem problem_from_json(const std::string& text);

}  // namespace lcqmc
