#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "lcqmc/embedding.hpp"
#include "lcqmc/model.hpp"

namespace lcqmc {

inline constexpr int kDefaultOracleCap = 12;

// Diagonal of exp(-beta H) in the computational basis. Weights are stored
// scaled by exp(-log_scale) so that large beta stays finite: the true weight
// of basis state z is weights[z] * exp(log_scale). Probabilities are exact.
struct DenseGibbs {
  Eigen::VectorXd weights;
  double partition = 0.0;  // sum of (scaled) weights
  double log_scale = 0.0;

  double prob(Eigen::Index z) const { return weights[z] / partition; }
};

// H = -Gamma sum_i X_i + Delta sum_bonds J Z_i Z_j over n qubits. Basis: bit
// i of the state index is qubit i, bit value 0 meaning s_i = +1.
Eigen::MatrixXd dense_hamiltonian(const std::vector<Bond>& bonds, int num_qubits,
                                  const ModelParams& params, int cap = kDefaultOracleCap);

DenseGibbs gibbs_diagonal(const Eigen::MatrixXd& hamiltonian, double beta);

// Gibbs probability mass of the logical configurations of an embedded
// Hamiltonian (exact, dense).
double logical_probability_exact(const EmbeddedProblem& embedded, const ModelParams& params,
                                 int cap = kDefaultOracleCap);

// Expectations of the native diagonal observables over the logical-subspace
// conditional distribution (what rejection/LC sampling estimates).
struct LogicalMoments {
  double p_logical = 0.0;
  double e_diag = 0.0;   // native H_Delta
  double abs_m = 0.0;    // |M_AFM|
  double m2 = 0.0;
  double m4 = 0.0;
};
LogicalMoments logical_observable_expectations(const EmbeddedProblem& embedded,
                                               const ModelParams& params,
                                               int cap = kDefaultOracleCap);

// Logical probability of a single size-2 chain, H = -Gamma(X1+X2)
// + Delta J_F Z1 Z2 + h (Z1+Z2). Closed form at h = 0, 4x4 dense Gibbs
// otherwise.
double p_l_two_chain(double gamma, double delta, double j_ferro, double beta, double h = 0.0);

// Independent-chain Ansatz: P_L ~ p_l^(N(K-1)).
double p_l_ansatz(double p_l, int num_logical, double k);

// Least-squares fit of the mean-field h in P_L(Gamma; h) =
// p_l_two_chain(Gamma, ..., h)^(N(K-1)) against observed (Gamma, P_L) points.
double fit_mean_field_h(const std::vector<std::pair<double, double>>& observed, int num_logical,
                        double k, double j_ferro, double beta, double delta = 1.0,
                        double h_max = 2.0);

}  // namespace lcqmc
