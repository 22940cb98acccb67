#include "jch/model.hpp"

#include <cmath>

#include "jch/errors.hpp"

namespace jch {

double jc_chi(int n, const ModelParams& p) {
  return std::sqrt(0.25 * p.delta * p.delta + p.g * p.g * n);
}

std::pair<PolaritonLevel, PolaritonLevel> jc_eigensystem(int n, const ModelParams& p) {
  if (n < 1) throw IndexOutOfRange("jc_eigensystem: n must be >= 1");
  const double chi = jc_chi(n, p);
  const double theta = std::atan2(2.0 * p.g * std::sqrt(static_cast<double>(n)), p.delta);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);

  PolaritonLevel plus{n, Branch::plus, n * p.omega + 0.5 * p.delta + chi, s, c};
  PolaritonLevel minus{n, Branch::minus, n * p.omega + 0.5 * p.delta - chi, c, -s};
  return {plus, minus};
}

double polariton_local_energy(int n, Branch branch, const ModelParams& p) {
  if (n < 1) throw IndexOutOfRange("polariton_local_energy: n must be >= 1");
  const double chi = jc_chi(n, p);
  return n * p.omega + 0.5 * p.delta + (branch == Branch::plus ? chi : -chi);
}

double polariton_hopping_element(int n, Branch alpha, Branch beta, const ModelParams& p) {
  if (n < 1) throw IndexOutOfRange("polariton_hopping_element: n must be >= 1");
  if (n == 1 && beta == Branch::plus)
    throw UnphysicalTarget("polariton_hopping_element: |0,+> is not a physical state");

  const auto [p_n, m_n] = jc_eigensystem(n, p);
  const PolaritonLevel& src = (alpha == Branch::plus) ? p_n : m_n;

  double gamma_t, rho_t;
  if (n == 1) {
    gamma_t = 1.0;  // |0,-> = |down,0>
    rho_t = 0.0;
  } else {
    const auto [p_t, m_t] = jc_eigensystem(n - 1, p);
    const PolaritonLevel& tgt = (beta == Branch::plus) ? p_t : m_t;
    gamma_t = tgt.gamma;
    rho_t = tgt.rho;
  }
  return std::sqrt(static_cast<double>(n)) * src.gamma * gamma_t +
         std::sqrt(static_cast<double>(n - 1)) * src.rho * rho_t;
}

SparseHamiltonian::SparseHamiltonian(std::shared_ptr<const Basis> basis,
                                     std::shared_ptr<const Graph> graph, ModelParams params,
                                     Eigen::SparseMatrix<double> entries)
    : basis_(std::move(basis)),
      graph_(std::move(graph)),
      params_(std::move(params)),
      entries_(std::move(entries)) {
  Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(entries_.rows());
  for (int k = 0; k < entries_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(entries_, k); it; ++it)
      rowsum[it.row()] += std::abs(it.value());
  norm_inf_ = rowsum.size() ? rowsum.maxCoeff() : 0.0;
}

Eigen::VectorXcd SparseHamiltonian::apply(const Eigen::VectorXcd& x) const {
  // H is real symmetric; act on real and imaginary parts separately.
  const Eigen::VectorXd yr = entries_ * x.real().matrix();
  const Eigen::VectorXd yi = entries_ * x.imag().matrix();
  Eigen::VectorXcd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = {yr[i], yi[i]};
  return y;
}

double SparseHamiltonian::expectation(const Eigen::VectorXcd& x) const {
  return x.dot(apply(x)).real();
}

SparseHamiltonian assemble_jch(std::shared_ptr<const Graph> graph, const ModelParams& params,
                               std::shared_ptr<const Basis> basis) {
  if (basis->sites() != graph->sites())
    throw DimensionMismatch("assemble_jch: basis has L=" + std::to_string(basis->sites()) +
                            " but graph has L=" + std::to_string(graph->sites()));
  if (!params.mu.empty() && static_cast<int>(params.mu.size()) != graph->sites())
    throw DimensionMismatch("assemble_jch: mu length does not match site count");

  const Basis& b = *basis;
  const std::int64_t dim = b.dim();
  const int L = b.sites();
  const double w0 = params.omega + params.delta;
  const auto edges = graph->edges();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(dim) * (L + 2 * edges.size() + 1));

  // Off-diagonal couplings are emitted as (r,c) and (c,r) from one computed
  // value, which keeps the matrix exactly Hermitian.
  auto couple = [&](std::int64_t r, std::int64_t c, double v) {
    if (r == c) {
      trip.emplace_back(r, c, v);
    } else {
      trip.emplace_back(r, c, v);
      trip.emplace_back(c, r, v);
    }
  };

  for (std::int64_t s = 0; s < dim; ++s) {
    const std::uint64_t k = b.key(s);
    double diag = 0.0;
    for (int i = 0; i < L; ++i) {
      const int p = b.photons(s, i);
      const bool up = b.tls_up(s, i);
      diag += params.omega * p + (up ? w0 : 0.0) - params.mu_at(i) * (p + (up ? 1 : 0));

      // g sigma+_i a_i : (p, down) -> (p-1, up). The h.c. partner is the
      // mirrored triplet, so only this direction is scanned.
      if (!up && p >= 1) {
        const auto target = b.with_site(k, i, p - 1, Tls::up);
        const auto r = b.index_of(target);
        if (r >= 0 && r > s) couple(r, s, params.g * std::sqrt(static_cast<double>(p)));
      }
      if (up && p + 1 <= b.n_max()) {
        const auto target = b.with_site(k, i, p + 1, Tls::down);
        const auto r = b.index_of(target);
        if (r >= 0 && r > s) couple(r, s, params.g * std::sqrt(static_cast<double>(p + 1)));
      }
    }
    if (diag != 0.0) trip.emplace_back(s, s, diag);

    if (params.J != 0.0) {
      for (auto [i, j] : edges) {
        // -J a+_i a_j and -J a+_j a_i; scan both directions, keep r > s.
        for (int dir = 0; dir < 2; ++dir) {
          const int src = dir ? i : j;
          const int dst = dir ? j : i;
          const int ps = b.photons(s, src);
          const int pd = b.photons(s, dst);
          if (ps < 1 || pd + 1 > b.n_max()) continue;
          auto target = b.with_site(k, src, ps - 1, b.tls_up(s, src) ? Tls::up : Tls::down);
          target = b.with_site(target, dst, pd + 1, b.tls_up(s, dst) ? Tls::up : Tls::down);
          const auto r = b.index_of(target);
          if (r >= 0 && r > s)
            couple(r, s, -params.J * std::sqrt(static_cast<double>(ps) * (pd + 1)));
        }
      }
    }
  }

  Eigen::SparseMatrix<double> H(dim, dim);
  H.setFromTriplets(trip.begin(), trip.end());
  return SparseHamiltonian(std::move(basis), std::move(graph), params, std::move(H));
}

StateVector prepare_mott_state(std::shared_ptr<const Basis> basis) {
  const Basis& b = *basis;
  const int L = b.sites();
  if (b.sector() && *b.sector() != L)
    throw SectorMismatch("prepare_mott_state: basis sector N=" + std::to_string(*b.sector()) +
                         " != L=" + std::to_string(L) + " (unit filling)");

  StateVector psi{basis, Eigen::VectorXcd::Zero(b.dim())};
  const double amp = std::pow(std::sqrt(0.5), L);
  // Expand the product over sites of (|down,1> - |up,0>)/sqrt(2).
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << L); ++m) {
    std::uint64_t key = 0;
    int ups = 0;
    for (int i = 0; i < L; ++i) {
      const bool up = (m >> i) & 1;
      if (up) ++ups;
      key = b.with_site(key, i, up ? 0 : 1, up ? Tls::up : Tls::down);
    }
    const auto idx = b.index_of(key);
    if (idx < 0)
      throw SectorMismatch("prepare_mott_state: basis is missing a unit-filling product state");
    psi.amplitudes[idx] = (ups % 2 ? -amp : amp);
  }
  return psi;
}

}  // namespace jch
