#include "lcqmc/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "lcqmc/observables.hpp"

namespace lcqmc {

namespace {

void check_cap(int num_qubits, int cap) {
  if (num_qubits > cap)
    throw SizeLimitError("dense oracle: " + std::to_string(num_qubits) +
                         " qubits exceeds cap of " + std::to_string(cap));
}

// Physical basis index of a logical configuration: all bits of chain l take
// logical bit l. Chain qubits are consecutive, so the chain is a bit run.
std::uint64_t physical_index_of_logical(const Embedding& emb, std::uint64_t logical_bits) {
  std::uint64_t z = 0;
  for (int l = 0; l < emb.num_logical(); ++l) {
    if ((logical_bits >> l) & 1ULL) {
      const std::uint64_t run = (emb.chain_sizes[l] == 64)
                                    ? ~0ULL
                                    : ((1ULL << emb.chain_sizes[l]) - 1ULL);
      z |= run << emb.chain_offsets[l];
    }
  }
  return z;
}

}  // namespace

Eigen::MatrixXd dense_hamiltonian(const std::vector<Bond>& bonds, int num_qubits,
                                  const ModelParams& params, int cap) {
  check_cap(num_qubits, cap);
  const Eigen::Index dim = Eigen::Index(1) << num_qubits;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index z = 0; z < dim; ++z) {
    double diag = 0.0;
    for (const Bond& b : bonds) {
      const int sa = ((z >> b.a) & 1) ? -1 : 1;
      const int sb = ((z >> b.b) & 1) ? -1 : 1;
      diag += b.j * sa * sb;
    }
    h(z, z) = params.delta * diag;
    for (int i = 0; i < num_qubits; ++i) h(z, z ^ (Eigen::Index(1) << i)) = -params.gamma;
  }
  return h;
}

DenseGibbs gibbs_diagonal(const Eigen::MatrixXd& hamiltonian, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("gibbs_diagonal: beta must be > 0");
  if (!hamiltonian.isApprox(hamiltonian.transpose(), 1e-12))
    throw std::invalid_argument("gibbs_diagonal: Hamiltonian must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const Eigen::MatrixXd& evecs = solver.eigenvectors();
  const double e_min = evals.minCoeff();
  // w_z = sum_k exp(-beta (E_k - E_min)) |V_zk|^2, all scaled by e^{-beta E_min}.
  const Eigen::VectorXd boltz = (-beta * (evals.array() - e_min)).exp().matrix();
  DenseGibbs g;
  g.weights = evecs.array().square().matrix() * boltz;
  g.partition = g.weights.sum();
  g.log_scale = -beta * e_min;
  return g;
}

double logical_probability_exact(const EmbeddedProblem& embedded, const ModelParams& params,
                                 int cap) {
  return logical_observable_expectations(embedded, params, cap).p_logical;
}

LogicalMoments logical_observable_expectations(const EmbeddedProblem& embedded,
                                               const ModelParams& params, int cap) {
  const int n = embedded.num_physical();
  check_cap(n, cap);
  const Eigen::MatrixXd h = dense_hamiltonian(embedded.all_bonds, n, params, cap);
  const DenseGibbs gibbs = gibbs_diagonal(h, params.beta);

  const int num_logical = embedded.embedding.num_logical();
  const ModelParams native_params{0.0, params.beta, params.delta};
  LogicalMoments out;
  double w_logical = 0.0;
  SpinConfig logical(num_logical);
  for (std::uint64_t y = 0; y < (1ULL << num_logical); ++y) {
    for (int l = 0; l < num_logical; ++l) logical[l] = ((y >> l) & 1ULL) ? -1 : 1;
    const std::uint64_t z = physical_index_of_logical(embedded.embedding, y);
    const double w = gibbs.weights[static_cast<Eigen::Index>(z)];
    const double e = bond_energy(embedded.native.bonds, logical, native_params.delta);
    const double m = staggered_magnetization(logical, embedded.native.coords);
    w_logical += w;
    out.e_diag += w * e;
    out.abs_m += w * std::abs(m);
    out.m2 += w * m * m;
    out.m4 += w * m * m * m * m;
  }
  out.p_logical = w_logical / gibbs.partition;
  out.e_diag /= w_logical;
  out.abs_m /= w_logical;
  out.m2 /= w_logical;
  out.m4 /= w_logical;
  return out;
}

double p_l_two_chain(double gamma, double delta, double j_ferro, double beta, double h) {
  if (beta <= 0.0) throw std::invalid_argument("p_l_two_chain: beta must be > 0");
  if (h == 0.0) {
    const double a = delta * std::abs(j_ferro);
    const double e = std::sqrt(4.0 * gamma * gamma + a * a);
    // Evaluated with the largest exponent factored out so that large beta*E
    // cannot overflow.
    const double s = std::max(beta * e, beta * a);
    const double sinh_e = 0.5 * (std::exp(beta * e - s) - std::exp(-beta * e - s));
    const double cosh_e = 0.5 * (std::exp(beta * e - s) + std::exp(-beta * e - s));
    const double cosh_a = 0.5 * (std::exp(beta * a - s) + std::exp(-beta * a - s));
    const double exp_a = std::exp(beta * a - s);
    return (a * sinh_e + e * cosh_e + e * exp_a) / (2.0 * e * (cosh_e + cosh_a));
  }
  // H = -Gamma (X1 + X2) + Delta J_F Z1 Z2 + h (Z1 + Z2); logical states are
  // the two aligned ones (indices 0 and 3).
  Eigen::MatrixXd ham = dense_hamiltonian({{0, 1, j_ferro}}, 2, ModelParams{gamma, beta, delta});
  const double field[4] = {2.0, 0.0, 0.0, -2.0};
  for (int z = 0; z < 4; ++z) ham(z, z) += h * field[z];
  const DenseGibbs g = gibbs_diagonal(ham, beta);
  return (g.weights[0] + g.weights[3]) / g.partition;
}

double p_l_ansatz(double p_l, int num_logical, double k) {
  if (p_l <= 0.0 || p_l > 1.0) throw std::invalid_argument("p_l_ansatz: p_l must be in (0, 1]");
  return std::pow(p_l, num_logical * (k - 1.0));
}

double fit_mean_field_h(const std::vector<std::pair<double, double>>& observed, int num_logical,
                        double k, double j_ferro, double beta, double delta, double h_max) {
  if (observed.size() < 3)
    throw std::invalid_argument("fit_mean_field_h: need at least 3 points");
  bool degenerate = true;
  for (const auto& [gamma, p] : observed) {
    if (p <= 0.0 || p > 1.0)
      throw std::invalid_argument("fit_mean_field_h: P_L values must be in (0, 1]");
    if (p != observed.front().second) degenerate = false;
  }
  if (degenerate) throw FitFailureError("fit_mean_field_h: all observed P_L equal");

  const auto loss = [&](double h) {
    double sum = 0.0;
    for (const auto& [gamma, p] : observed) {
      const double model = p_l_ansatz(p_l_two_chain(gamma, delta, j_ferro, beta, h),
                                      num_logical, k);
      sum += (model - p) * (model - p);
    }
    return sum;
  };

  // Coarse grid, then golden-section refinement around the best cell.
  const int grid = 81;
  double best_h = 0.0, best_loss = loss(0.0);
  for (int i = 1; i < grid; ++i) {
    const double h = h_max * i / (grid - 1);
    const double l = loss(h);
    if (l < best_loss) {
      best_loss = l;
      best_h = h;
    }
  }
  const double step = h_max / (grid - 1);
  double lo = std::max(0.0, best_h - step);
  double hi = std::min(h_max, best_h + step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = loss(x1), f2 = loss(x2);
  while (hi - lo > 1e-5) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = loss(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = loss(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace lcqmc
