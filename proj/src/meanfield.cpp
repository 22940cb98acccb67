#include "jch/meanfield.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "jch/errors.hpp"

namespace jch {

namespace {

int local_index(int p, int t) { return 2 * p + t; }

struct GroundState {
  Eigen::VectorXcd vec;
  double energy = 0.0;
};

GroundState ground_state(const Eigen::MatrixXcd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  return {es.eigenvectors().col(0), es.eigenvalues()[0]};
}

std::complex<double> expect_annihilation(const Eigen::VectorXcd& v, int n_max) {
  // <a> = sum_{p,t} sqrt(p+1) conj(v[p,t]) v[p+1,t]
  std::complex<double> a{0.0, 0.0};
  for (int p = 0; p < n_max; ++p)
    for (int t = 0; t < 2; ++t)
      a += std::sqrt(static_cast<double>(p + 1)) *
           std::conj(v[local_index(p, t)]) * v[local_index(p + 1, t)];
  return a;
}

std::complex<double> expect_sigma_plus(const Eigen::VectorXcd& v, int n_max) {
  // <sigma+> = sum_p conj(v[p,up]) v[p,down]
  std::complex<double> s{0.0, 0.0};
  for (int p = 0; p <= n_max; ++p)
    s += std::conj(v[local_index(p, 1)]) * v[local_index(p, 0)];
  return s;
}

double expect_excitation(const Eigen::VectorXcd& v, int n_max) {
  double n = 0.0;
  for (int p = 0; p <= n_max; ++p)
    for (int t = 0; t < 2; ++t) n += (p + t) * std::norm(v[local_index(p, t)]);
  return n;
}

MeanFieldSolution solve_fixed_mu(double k, const ModelParams& params, int n_max, double tol,
                                 int max_iter, const MeanFieldOptions& options, double mu) {
  MeanFieldSolution sol;
  sol.k = k;
  sol.params = params;
  sol.n_max = n_max;
  sol.mu = mu;

  std::complex<double> psi = options.psi0;
  const double eta = options.damping;
  GroundState gs;
  int iter = 0;
  bool converged = false;
  for (; iter < max_iter; ++iter) {
    gs = ground_state(mf_hamiltonian(psi, k, params, n_max, mu));
    const std::complex<double> next = (1.0 - eta) * psi + eta * expect_annihilation(gs.vec, n_max);
    const double update = std::abs(next - psi);
    psi = next;
    if (update < tol) {
      converged = true;
      ++iter;
      break;
    }
  }
  gs = ground_state(mf_hamiltonian(psi, k, params, n_max, mu));

  // The trivial branch is always a fixed point; keep whichever product
  // ansatz has the lower decoupled energy (the -<a+><a> counterterm of the
  // decoupling adds +J k |psi|^2 to the bare MF ground energy).
  const GroundState gs0 = ground_state(mf_hamiltonian(0.0, k, params, n_max, mu));
  const double var_psi = gs.energy + params.J * k * std::norm(psi);
  const double var_zero = gs0.energy;

  sol.iterations = iter;
  sol.converged = converged;
  if (var_psi < var_zero - 1e-12 && std::abs(psi) > 10.0 * tol) {
    sol.psi = psi;
    sol.energy = gs.energy;
    sol.variational_energy = var_psi;
    sol.sigma_plus = expect_sigma_plus(gs.vec, n_max);
    sol.n_mean = expect_excitation(gs.vec, n_max);
  } else {
    sol.psi = 0.0;
    sol.energy = gs0.energy;
    sol.variational_energy = var_zero;
    sol.sigma_plus = expect_sigma_plus(gs0.vec, n_max);
    sol.n_mean = expect_excitation(gs0.vec, n_max);
  }
  return sol;
}

}  // namespace

Eigen::MatrixXcd mf_hamiltonian(std::complex<double> psi, double k, const ModelParams& params,
                                int n_max, double mu) {
  if (n_max < 1) throw IndexOutOfRange("mf_hamiltonian: n_max must be >= 1");
  const int dim = 2 * (n_max + 1);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  const double w0 = params.omega + params.delta;

  for (int p = 0; p <= n_max; ++p) {
    for (int t = 0; t < 2; ++t) {
      const int i = local_index(p, t);
      H(i, i) = params.omega * p + (t ? w0 : 0.0) - mu * (p + t);
    }
    // g (sigma+ a + sigma- a+): couples (p, down) <-> (p-1, up)
    if (p >= 1) {
      const int down = local_index(p, 0);
      const int up = local_index(p - 1, 1);
      H(up, down) += params.g * std::sqrt(static_cast<double>(p));
      H(down, up) += params.g * std::sqrt(static_cast<double>(p));
    }
    // -J k (psi a+ + psi* a): couples (p, t) <-> (p+1, t)
    if (p < n_max) {
      const double root = std::sqrt(static_cast<double>(p + 1));
      for (int t = 0; t < 2; ++t) {
        const int lo = local_index(p, t);
        const int hi = local_index(p + 1, t);
        H(hi, lo) += -params.J * k * psi * root;
        H(lo, hi) += -params.J * k * std::conj(psi) * root;
      }
    }
  }
  return H;
}

MeanFieldSolution solve_selfconsistent(double k, const ModelParams& params, int n_max,
                                       double tol, int max_iter,
                                       const MeanFieldOptions& options) {
  if (tol <= 0.0) throw Error("solve_selfconsistent: tol must be positive");
  if (!options.tune_mu_to_unit_filling)
    return solve_fixed_mu(k, params, n_max, tol, max_iter, options, options.mu);

  // Bisect mu so the MF ground state carries one excitation. <n>(mu) is a
  // nondecreasing staircase in the Mott regime and continuous in the
  // superfluid, so plain bisection on <n> - 1 suffices.
  double lo = 0.0;
  double hi = 2.0 * params.omega;
  MeanFieldSolution sol;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    sol = solve_fixed_mu(k, params, n_max, tol, max_iter, options, mid);
    if (std::abs(sol.n_mean - 1.0) < 1e-9) return sol;
    (sol.n_mean < 1.0 ? lo : hi) = mid;
  }
  return solve_fixed_mu(k, params, n_max, tol, max_iter, options, 0.5 * (lo + hi));
}

SigmaPlusDiagnostic sigma_plus_diagnostic(const MeanFieldSolution& solution) {
  const double abs_psi = std::abs(solution.psi);
  if (abs_psi == 0.0)
    throw ZeroPsi("sigma_plus_diagnostic: solution has no condensate (psi = 0)");
  SigmaPlusDiagnostic d;
  d.lhs = std::abs(solution.sigma_plus);
  d.rhs = solution.params.g / (solution.params.J * solution.k * abs_psi);
  return d;
}

}  // namespace jch
