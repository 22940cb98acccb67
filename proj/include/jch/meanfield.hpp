#pragma once

#include <Eigen/Dense>
#include <complex>

#include "jch/model.hpp"

namespace jch {

struct MeanFieldOptions {
  std::complex<double> psi0 = 0.1;  // iteration seed
  double damping = 0.5;             // mixing weight eta
  double mu = 0.0;                  // scalar chemical potential
  bool tune_mu_to_unit_filling = false;  // bisect mu so <n>_gs = 1
};

// Decoupled single-site solution with connectivity-weighted hopping field.
struct MeanFieldSolution {
  double k = 0.0;
  ModelParams params;
  int n_max = 5;
  std::complex<double> psi{0.0, 0.0};
  double energy = 0.0;              // ground-state energy of the MF Hamiltonian
  double variational_energy = 0.0;  // energy + J k |psi|^2, used for phase choice
  int iterations = 0;
  bool converged = false;
  std::complex<double> sigma_plus{0.0, 0.0};
  double n_mean = 0.0;              // <n> in the MF ground state
  double mu = 0.0;                  // chemical potential actually applied
};

// Single-site JC Hamiltonian plus the hopping field -J k (psi a+ + psi* a),
// over the full local space of dimension 2 (n_max + 1). Local index 2p + t
// matches the many-body basis convention. Not number conserving for psi != 0.
Eigen::MatrixXcd mf_hamiltonian(std::complex<double> psi, double k, const ModelParams& params,
                                int n_max, double mu = 0.0);

// Damped fixed-point iteration psi <- (1-eta) psi + eta <a>_gs(psi). The
// psi = 0 branch is always evaluated; whichever branch has the lower
// variational energy is reported. Returns converged = false (never throws)
// when max_iter is exhausted.
MeanFieldSolution solve_selfconsistent(double k, const ModelParams& params, int n_max,
                                       double tol = 1e-8, int max_iter = 10000,
                                       const MeanFieldOptions& options = {});

struct SigmaPlusDiagnostic {
  double lhs = 0.0;  // |<sigma+>| in the MF ground state
  double rhs = 0.0;  // g / (J k |psi|)
};

// Both sides of the atomic-expectation relation; throws ZeroPsi when the
// solution carries no condensate.
SigmaPlusDiagnostic sigma_plus_diagnostic(const MeanFieldSolution& solution);

}  // namespace jch
