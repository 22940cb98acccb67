#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <utility>
#include <vector>

#include "jch/graphs.hpp"
#include "jch/hilbert.hpp"

namespace jch {

// Energies are in units of the resonator frequency (omega = 1 by default).
// The detuning is applied to the TLS frequency: omega_0 = omega + delta.
struct ModelParams {
  double omega = 1.0;
  double delta = 0.0;          // omega_0 - omega
  double g = 1e-2;             // light-matter coupling
  double J = 1e-4;             // photon hopping
  std::vector<double> mu;      // per-site chemical potential, empty == all zero

  double mu_at(int site) const {
    return mu.empty() ? 0.0 : mu[static_cast<std::size_t>(site)];
  }
};

enum class Branch : int { minus = -1, plus = +1 };

// Single-site dressed level |n,b> = gamma |down,n> + rho |up,n-1>.
struct PolaritonLevel {
  int n = 1;
  Branch branch = Branch::minus;
  double energy = 0.0;
  double gamma = 0.0;
  double rho = 0.0;
};

// chi(n) = sqrt(delta^2/4 + g^2 n), the half Rabi splitting of level n.
double jc_chi(int n, const ModelParams& p);

// Analytic eigenpair of the n-excitation block, returned as (plus, minus).
// Mixing angle theta_n = atan2(2 g sqrt(n), delta) in (0, pi).
std::pair<PolaritonLevel, PolaritonLevel> jc_eigensystem(int n, const ModelParams& p);

double polariton_local_energy(int n, Branch branch, const ModelParams& p);

// Overlap <n-1,beta| a |n,alpha> = sqrt(n) gamma_na gamma_(n-1)b
//                                + sqrt(n-1) rho_na rho_(n-1)b,
// with the n=1 boundary fixed by |0,-> = |down,0> (gamma_0- = 1) and
// |0,+> unphysical. Throws UnphysicalTarget for (n=1, beta=+).
double polariton_hopping_element(int n, Branch alpha, Branch beta, const ModelParams& p);

// Hermitian JCH Hamiltonian over a basis. All couplings are real in the
// bare product basis, so the matrix is stored real symmetric.
class SparseHamiltonian {
 public:
  SparseHamiltonian() = default;
  SparseHamiltonian(std::shared_ptr<const Basis> basis, std::shared_ptr<const Graph> graph,
                    ModelParams params, Eigen::SparseMatrix<double> entries);

  const Basis& basis() const { return *basis_; }
  std::shared_ptr<const Basis> basis_ptr() const { return basis_; }
  const Graph& graph() const { return *graph_; }
  const ModelParams& params() const { return params_; }
  const Eigen::SparseMatrix<double>& matrix() const { return entries_; }
  std::int64_t dim() const { return entries_.rows(); }
  double norm_inf() const { return norm_inf_; }  // max absolute row sum

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  double expectation(const Eigen::VectorXcd& x) const;  // real part of <x|H|x>

 private:
  std::shared_ptr<const Basis> basis_;
  std::shared_ptr<const Graph> graph_;
  ModelParams params_;
  Eigen::SparseMatrix<double> entries_;
  double norm_inf_ = 0.0;
};

// H = sum_i [w a+a + (w+delta) s+s- + g(s+a + s-a+)]
//   - J sum_{i<j} A_ij (a+_i a_j + a+_j a_i) - sum_i mu_i n_i,
// restricted to the basis. Every term conserves total excitation number, so
// a sector basis is closed under H (up to the Fock cutoff, which only clips
// states already at photons = n_max).
SparseHamiltonian assemble_jch(std::shared_ptr<const Graph> graph, const ModelParams& params,
                               std::shared_ptr<const Basis> basis);

// Product state (|down,1> - |up,0>)/sqrt(2) on every site: the unit-filling
// Mott state of lower polaritons at delta = 0. Requires sector == L or an
// unrestricted basis.
StateVector prepare_mott_state(std::shared_ptr<const Basis> basis);

}  // namespace jch
