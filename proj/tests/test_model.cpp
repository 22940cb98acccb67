#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "jch/errors.hpp"
#include "jch/model.hpp"

using namespace jch;

namespace {

ModelParams params_with(double delta, double g = 1e-2, double J = 1e-4) {
  ModelParams p;
  p.delta = delta;
  p.g = g;
  p.J = J;
  return p;
}

// Numeric 2x2 eigensystem of the n-excitation JC block in the bare basis
// (|down,n>, |up,n-1>), independent of the closed-form route.
struct NumericLevel {
  double energy;
  Eigen::Vector2d vec;  // (gamma, rho)
};

std::pair<NumericLevel, NumericLevel> numeric_jc_block(int n, const ModelParams& p) {
  Eigen::Matrix2d h;
  const double g = p.g * std::sqrt(static_cast<double>(n));
  h << n * p.omega, g, g, n * p.omega + p.delta;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
  NumericLevel lo{es.eigenvalues()[0], es.eigenvectors().col(0)};
  NumericLevel hi{es.eigenvalues()[1], es.eigenvectors().col(1)};
  return {hi, lo};
}

}  // namespace

TEST_CASE("jc_eigensystem closed forms") {
  // Resonant doublet: chi(1) = g.
  auto [p1, m1] = jc_eigensystem(1, params_with(0.0, 0.01));
  CHECK(p1.energy == doctest::Approx(1.0 + 0.01).epsilon(1e-14));
  CHECK(m1.energy == doctest::Approx(1.0 - 0.01).epsilon(1e-14));
  CHECK(p1.gamma == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));

  // chi(1) = g sqrt(2) at delta = 2g.
  const ModelParams p2 = params_with(2.0 * 0.01, 0.01);
  CHECK(jc_chi(1, p2) == doctest::Approx(0.01 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("jc_eigensystem matches the numeric 2x2 block over a detuning grid") {
  for (int n = 1; n <= 5; ++n) {
    for (double x = 0.0; x <= 3.0; x += 0.1) {
      const ModelParams p = params_with(x == 0.0 ? 0.0 : 0.01 * std::pow(10.0, x), 0.01);
      auto [plus, minus] = jc_eigensystem(n, p);
      auto [nplus, nminus] = numeric_jc_block(n, p);
      CHECK(plus.energy == doctest::Approx(nplus.energy).epsilon(1e-12));
      CHECK(minus.energy == doctest::Approx(nminus.energy).epsilon(1e-12));
      // Coefficients match up to a global sign.
      const double op = std::abs(plus.gamma * nplus.vec[0] + plus.rho * nplus.vec[1]);
      const double om = std::abs(minus.gamma * nminus.vec[0] + minus.rho * nminus.vec[1]);
      CHECK(op == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(om == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(plus.gamma * plus.gamma + plus.rho * plus.rho ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("polariton_local_energy identities at resonance") {
  const ModelParams p = params_with(0.0, 0.01);
  CHECK(polariton_local_energy(1, Branch::minus, p) == doctest::Approx(1.0 - 0.01));
  CHECK(polariton_local_energy(1, Branch::plus, p) -
            polariton_local_energy(1, Branch::minus, p) ==
        doctest::Approx(2.0 * 0.01).epsilon(1e-13));
  // Photon blockade gap: e2- - 2 e1- = (2 - sqrt(2)) g > 0.
  const double gap = polariton_local_energy(2, Branch::minus, p) -
                     2.0 * polariton_local_energy(1, Branch::minus, p);
  CHECK(gap == doctest::Approx((2.0 - std::sqrt(2.0)) * 0.01).epsilon(1e-12));
  CHECK(gap > 0.0);
}

TEST_CASE("hopping elements from direct overlaps") {
  const ModelParams p0 = params_with(0.0, 0.01);
  CHECK(polariton_hopping_element(1, Branch::minus, Branch::minus, p0) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
  CHECK(polariton_hopping_element(2, Branch::minus, Branch::minus, p0) ==
        doctest::Approx(0.5 * (std::sqrt(2.0) + 1.0)).epsilon(1e-13));
  CHECK_THROWS_AS(polariton_hopping_element(1, Branch::minus, Branch::plus, p0),
                  UnphysicalTarget);
}

TEST_CASE("hopping elements agree with the two-term level expansion for n >= 2") {
  // Independent route: expand source and target levels in the bare basis and
  // contract with the annihilation operator explicitly.
  for (double x : {0.0, 0.3, 1.0, 3.0, 10.0}) {
    const ModelParams p = params_with(0.01 * x, 0.01);
    for (int n = 2; n <= 5; ++n) {
      auto [pn, mn] = jc_eigensystem(n, p);
      auto [pt, mt] = jc_eigensystem(n - 1, p);
      for (const auto* src : {&pn, &mn}) {
        for (const auto* tgt : {&pt, &mt}) {
          const double printed = std::sqrt(static_cast<double>(n)) * src->gamma * tgt->gamma +
                                 std::sqrt(static_cast<double>(n - 1)) * src->rho * tgt->rho;
          const double got =
              polariton_hopping_element(n, src->branch, tgt->branch, p);
          CHECK(got == doctest::Approx(printed).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("single-site JC doublet from the assembled Hamiltonian") {
  const ModelParams p = params_with(0.0, 0.01, 0.0);
  auto basis = std::make_shared<const Basis>(enumerate_basis(1, 5, 1));
  auto graph = std::make_shared<const Graph>(build_graph({}, 1));
  const SparseHamiltonian H = assemble_jch(graph, p, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(H.matrix()));
  REQUIRE(es.eigenvalues().size() == 2);
  CHECK(es.eigenvalues()[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-14));
  CHECK(es.eigenvalues()[1] == doctest::Approx(1.0 + 0.01).epsilon(1e-14));
}

TEST_CASE("assembled Hamiltonian is exactly Hermitian and commutes with N") {
  const ModelParams p = params_with(0.05, 0.01, 2e-4);
  struct Case {
    std::vector<std::pair<int, int>> edges;
    int L;
  };
  for (const auto& [edges, L] : {Case{{{0, 1}}, 2}, Case{{{0, 1}, {1, 2}, {2, 0}}, 3}}) {
    auto basis = std::make_shared<const Basis>(enumerate_basis(L, 4));
    auto graph = std::make_shared<const Graph>(build_graph(edges, L));
    const SparseHamiltonian H = assemble_jch(graph, p, basis);

    const Eigen::MatrixXd Hd = Eigen::MatrixXd(H.matrix());
    CHECK((Hd - Hd.transpose()).cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd N = Eigen::MatrixXd::Zero(H.dim(), H.dim());
    for (int i = 0; i < L; ++i)
      N += Eigen::MatrixXd(site_operator(*basis, i, SiteOp::excitation_number).matrix);
    const double comm = (Hd * N - N * Hd).cwiseAbs().maxCoeff();
    CHECK(comm < 1e-12 * H.norm_inf());
  }
}

TEST_CASE("dimer assembly matches a dense operator-algebra oracle") {
  ModelParams p = params_with(0.02, 0.01, 5e-4);
  auto full = std::make_shared<const Basis>(enumerate_basis(2, 1));
  auto graph = std::make_shared<const Graph>(build_graph({{0, 1}}, 2));

  // Oracle: compose the Hamiltonian from one-site operator products on the
  // unrestricted space, independent of the assembly path.
  const Basis& b = *full;
  const auto op = [&](int site, SiteOp kind) {
    return Eigen::MatrixXd(site_operator(b, site, kind).matrix);
  };
  Eigen::MatrixXd Ho = Eigen::MatrixXd::Zero(b.dim(), b.dim());
  for (int i = 0; i < 2; ++i) {
    Ho += p.omega * op(i, SiteOp::photon_number) +
          (p.omega + p.delta) * op(i, SiteOp::tls_number) +
          p.g * (op(i, SiteOp::sigma_plus) * op(i, SiteOp::annihilate) +
                 op(i, SiteOp::sigma_minus) * op(i, SiteOp::create));
  }
  Ho += -p.J * (op(0, SiteOp::create) * op(1, SiteOp::annihilate) +
                op(1, SiteOp::create) * op(0, SiteOp::annihilate));

  const SparseHamiltonian Hf = assemble_jch(graph, p, full);
  CHECK((Eigen::MatrixXd(Hf.matrix()) - Ho).cwiseAbs().maxCoeff() < 1e-15);

  // Sector eigenvalues embed in the full spectrum; the lowest matches the
  // dense oracle to 1e-12.
  auto sector = std::make_shared<const Basis>(enumerate_basis(2, 1, 2));
  const SparseHamiltonian Hs = assemble_jch(graph, p, sector);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esf(Ho);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ess(Eigen::MatrixXd(Hs.matrix()));
  CHECK(full->dim() == 8);
  for (int k = 0; k < ess.eigenvalues().size(); ++k) {
    double best = 1e300;
    for (int j = 0; j < esf.eigenvalues().size(); ++j)
      best = std::min(best, std::abs(esf.eigenvalues()[j] - ess.eigenvalues()[k]));
    CHECK(best < 1e-12);
  }
}

TEST_CASE("mott state amplitudes and moments") {
  auto basis1 = std::make_shared<const Basis>(enumerate_basis(1, 5, 1));
  const StateVector psi1 = prepare_mott_state(basis1);
  const auto i_down1 = basis1->index_of(basis1->with_site(0, 0, 1, Tls::down));
  const auto i_up0 = basis1->index_of(basis1->with_site(0, 0, 0, Tls::up));
  CHECK(psi1.amplitudes[i_down1].real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(psi1.amplitudes[i_up0].real() == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-15));
  CHECK(psi1.norm() == doctest::Approx(1.0).epsilon(1e-14));

  auto basis3 = std::make_shared<const Basis>(enumerate_basis(3, 5, 3));
  const StateVector psi3 = prepare_mott_state(basis3);
  CHECK(psi3.norm() == doctest::Approx(1.0).epsilon(1e-12));

  auto wrong = std::make_shared<const Basis>(enumerate_basis(3, 5, 2));
  CHECK_THROWS_AS(prepare_mott_state(wrong), SectorMismatch);
}

TEST_CASE("J=0 makes the Mott state an exact eigenstate") {
  ModelParams p = params_with(0.0, 0.01, 0.0);
  auto basis = std::make_shared<const Basis>(enumerate_basis(3, 5, 3));
  auto graph = std::make_shared<const Graph>(build_graph({{0, 1}, {1, 2}}, 3));
  const SparseHamiltonian H = assemble_jch(graph, p, basis);
  const StateVector psi = prepare_mott_state(basis);
  const double e1m = polariton_local_energy(1, Branch::minus, p);
  const Eigen::VectorXcd residual = H.apply(psi.amplitudes) - 3.0 * e1m * psi.amplitudes;
  CHECK(residual.norm() < 1e-10);
}
