// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Individual criteria can be selected by number on the command line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jch/errors.hpp"
#include "jch/experiments.hpp"

using namespace jch;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ModelParams sweep_params(double delta_over_g = 0.0) {
  ModelParams p;
  p.g = 1e-2;
  p.J = 1e-4;  // J = 1e-2 g
  p.delta = delta_over_g * p.g;
  return p;
}

std::vector<Graph> conservation_matrix() {
  std::vector<Graph> graphs;
  Graph dimer = build_graph({{0, 1}}, 2);
  dimer.set_name("dimer");
  graphs.push_back(dimer);
  Graph chain3 = build_graph({{0, 1}, {1, 2}}, 3);
  chain3.set_name("chain3");
  graphs.push_back(chain3);
  for (auto& e : enumerate_connected_graphs(4)) graphs.push_back(e.graph);
  return graphs;
}

const std::vector<double> kFiveDetunings = {-1.0, -0.5, 0.0, 0.5, 1.0};  // log10(delta/g)

std::string temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("jch_acceptance_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

// Minimal curve-file reader: first two columns of every data row.
std::vector<std::pair<double, double>> read_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("acceptance: cannot open " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double a, b;
    ss >> a >> b;
    rows.emplace_back(a, b);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// 1. Conservation suite over the protocol matrix.
Check criterion_conservation() {
  Check c;
  double worst_norm = 0, worst_n = 0, worst_var = 0, worst_energy_rel = 0;
  for (const Graph& g : conservation_matrix()) {
    for (double lg : kFiveDetunings) {
      const ModelParams p = sweep_params();
      const double delta = std::pow(10.0, lg) * p.g;
      for (int proto = 0; proto < 2; ++proto) {
        Schedule sched;
        sched.delta_target = delta;
        sched.measure_time = 1.0 / p.J;
        PropagationReport report;
        if (proto == 0) {
          sched.kind = Schedule::Kind::quench;
          report = run_quench(g, p, sched);
        } else {
          sched.kind = Schedule::Kind::adiabatic;
          sched.ramp_time = 20.0 / p.J;
          report = run_adiabatic(g, p, sched);
        }
        worst_norm = std::max(worst_norm, report.norm_drift);
        worst_n = std::max(worst_n, report.n_drift);
        worst_var = std::max(worst_var, report.n_variance_max);
        worst_energy_rel =
            std::max(worst_energy_rel, report.energy_drift / report.h_norm_inf);
      }
    }
  }
  c.require(worst_norm < 1e-8, "norm drift " + fmt(worst_norm));
  c.require(worst_n < 1e-8, "<N> drift " + fmt(worst_n));
  c.require(worst_var < 1e-8, "Var(N) " + fmt(worst_var));
  c.require(worst_energy_rel < 1e-8, "energy drift " + fmt(worst_energy_rel));
  c.note("max norm " + fmt(worst_norm) + ", N " + fmt(worst_n) + ", VarN " + fmt(worst_var) +
         ", E/||H|| " + fmt(worst_energy_rel));
  return c;
}

// ---------------------------------------------------------------------------
// 2. Krylov propagation against the dense eigendecomposition oracle.
Check criterion_oracle() {
  Check c;
  std::vector<Graph> systems = conservation_matrix();
  Graph chain5 = build_graph({{0, 1}, {1, 2}, {2, 3}, {3, 4}}, 5);
  chain5.set_name("chain5");
  systems.push_back(chain5);

  std::mt19937 rng(2024);
  std::normal_distribution<double> normal;
  double worst = 1.0;
  for (const Graph& g : systems) {
    const ModelParams p = sweep_params(std::pow(10.0, 0.5));
    auto basis = std::make_shared<const Basis>(enumerate_basis(g.sites(), 5, g.sites()));
    if (basis->dim() > 2000) continue;
    auto graph = std::make_shared<const Graph>(g);
    const SparseHamiltonian H = assemble_jch(graph, p, basis);

    std::vector<StateVector> starts;
    starts.push_back(prepare_mott_state(basis));
    StateVector random{basis, Eigen::VectorXcd(basis->dim())};
    for (Eigen::Index i = 0; i < random.amplitudes.size(); ++i)
      random.amplitudes[i] = {normal(rng), normal(rng)};
    random.amplitudes.normalize();
    starts.push_back(random);

    for (const StateVector& psi : starts) {
      const double t = 1.0 / p.J;
      const StateVector dense = evolve(psi, H, t, 1e-12, PropagatorKind::dense);
      const StateVector krylov = evolve(psi, H, t, 1e-10, PropagatorKind::krylov);
      worst = std::min(worst, std::abs(dense.amplitudes.dot(krylov.amplitudes)));
    }
  }
  c.require(worst >= 1.0 - 1e-8, "worst overlap " + fmt(worst));
  c.note("worst overlap 1 - " + fmt(1.0 - worst));
  return c;
}

// ---------------------------------------------------------------------------
// 3. Analytic Jaynes-Cummings suite.
Check criterion_analytic() {
  Check c;
  double worst = 0.0;
  for (int n = 1; n <= 5; ++n) {
    for (int k = 0; k < 30; ++k) {
      const double delta_over_g = k == 0 ? 0.0 : std::pow(10.0, -2.0 + 5.0 * k / 29.0);
      const ModelParams p = sweep_params(delta_over_g);
      auto [plus, minus] = jc_eigensystem(n, p);
      // Closed forms against an explicit 2x2 diagonalization.
      const double a = n * p.omega, b = p.g * std::sqrt(static_cast<double>(n));
      const double d = n * p.omega + p.delta;
      const double tr = 0.5 * (a + d);
      const double disc = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
      worst = std::max(worst, std::abs(plus.energy - (tr + disc)));
      worst = std::max(worst, std::abs(minus.energy - (tr - disc)));
      worst = std::max(worst, std::abs(plus.gamma * plus.gamma + plus.rho * plus.rho - 1.0));
      // Eigenvector residual of the analytic coefficients.
      const double r1 = std::abs((a - plus.energy) * plus.gamma + b * plus.rho);
      const double r2 = std::abs(b * minus.gamma + (d - minus.energy) * minus.rho);
      worst = std::max(worst, std::max(r1, r2));
    }
  }
  c.require(worst < 1e-8, "polariton closed-form residual " + fmt(worst));

  // Rabi oscillation from |down,1> at resonance.
  const ModelParams p = sweep_params(0.0);
  auto basis = std::make_shared<const Basis>(enumerate_basis(1, 5, 1));
  auto graph = std::make_shared<const Graph>(build_graph({}, 1));
  const SparseHamiltonian H = assemble_jch(graph, p, basis);
  StateVector psi{basis, Eigen::VectorXcd::Zero(basis->dim())};
  psi.amplitudes[basis->index_of(basis->with_site(0, 0, 1, Tls::down))] = 1.0;
  double worst_rabi = 0.0;
  for (int k = 1; k <= 12; ++k) {
    const double t = k * M_PI / (4.0 * p.g) / 3.0;
    const StateVector out = evolve(psi, H, t, 1e-12);
    const MomentSample m = measure_moments(*basis, out.amplitudes, t);
    const double want = std::sin(p.g * t) * std::sin(p.g * t);
    worst_rabi = std::max(worst_rabi, std::abs(m.tls_occ[0] - want));
  }
  c.require(worst_rabi < 1e-8, "Rabi residual " + fmt(worst_rabi));
  c.note("closed-form residual " + fmt(worst) + ", Rabi " + fmt(worst_rabi));
  return c;
}

// ---------------------------------------------------------------------------
// 4. Dimer detuning sweep contract.
Check criterion_dimer_sweep() {
  Check c;
  const std::string dir = temp_dir("dimer");
  ExperimentConfig cfg = parse_config_text("experiment = dimer_sweep\n", "acceptance");
  cfg.out_dir = dir;
  const ExperimentResult res = run_experiment(cfg);

  const auto quench = read_curve(dir + "/L2_g0_quench_curve.tsv");
  const auto adiab = read_curve(dir + "/L2_g0_adiabatic_curve.tsv");
  c.require(quench.size() == 26 && adiab.size() == 26, "curve sizes");
  c.require(quench.front().first == 0.0, "delta=0 point present");

  // Start below 0.05 at delta = 0.
  c.require(quench.front().second < 0.05, "quench OP(0) = " + fmt(quench.front().second));
  c.require(adiab.front().second < 0.05, "adiabatic OP(0) = " + fmt(adiab.front().second));

  // Slope ratio on the log grid.
  const double sq = res.metrics.at("L2_g0_quench_max_slope");
  const double sa = res.metrics.at("L2_g0_adiabatic_max_slope");
  c.require(sq >= 3.0 * sa, "slope ratio " + fmt(sq / sa));

  // Monotone nondecreasing within 5% of the plateau.
  for (const auto* curve : {&quench, &adiab}) {
    double plateau = 0.0;
    int np = 0;
    for (auto [d, op] : *curve) {
      if (d <= 0.0) continue;
      const double lg = std::log10(d);
      if (lg >= 0.75 - 1e-9 && lg <= 0.9 + 1e-9) {
        plateau += op;
        ++np;
      }
    }
    plateau /= np;
    for (std::size_t k = 1; k < curve->size(); ++k)
      c.require((*curve)[k].second >= (*curve)[k - 1].second - 0.05 * plateau,
                std::string(curve == &quench ? "quench" : "adiabatic") +
                    " non-monotone at point " + std::to_string(k));
  }
  c.note("slope ratio " + fmt(sq / sa) + ", OP(0) q=" + fmt(quench.front().second) +
         " a=" + fmt(adiab.front().second));
  return c;
}

// ---------------------------------------------------------------------------
// 5. Connectivity scaling of the quench plateau.
Check criterion_scaling() {
  Check c;
  const std::string dir = temp_dir("scaling");
  ExperimentConfig cfg = parse_config_text(
      "experiment = catalog_scaling\n[sweep]\nprotocols = quench\n", "acceptance");
  cfg.out_dir = dir;
  const ExperimentResult res = run_experiment(cfg);
  const double r = res.metrics.at("scaling_r_quench");
  const double slope = res.metrics.at("scaling_slope_quench");
  c.require(r >= 0.95, "pearson r = " + fmt(r));
  c.require(slope > 0.0, "slope = " + fmt(slope));
  c.note("r = " + fmt(r) + ", slope = " + fmt(slope));
  return c;
}

// ---------------------------------------------------------------------------
// 6. Nucleation map contract.
Check criterion_nucleation() {
  Check c;

  // Star graph: the hub nucleates before the leaves.
  ModelParams p;
  p.g = 1e-2;
  p.J = 1e-3;  // fig4 parameters
  const Graph star = enumerate_connected_graphs(4)[0].graph;
  int hub = 0;
  for (int i = 0; i < 4; ++i)
    if (star.degree(i) == 3) hub = i;
  Schedule sched{Schedule::Kind::quench, std::pow(10.0, 0.7) * p.g, 0.0, 1.0 / p.J};
  const PropagationReport report = run_quench(star, p, sched);
  const Eigen::VectorXd var = per_site_variances(report);
  double max_leaf = 0.0;
  for (int i = 0; i < 4; ++i)
    if (i != hub) max_leaf = std::max(max_leaf, var[i]);
  c.require(var[hub] > max_leaf, "hub var " + fmt(var[hub]) + " vs leaf " + fmt(max_leaf));

  // Pooled rank correlation across the full 4-node catalog.
  const std::string dir = temp_dir("nucleation");
  ExperimentConfig cfg = parse_config_text("experiment = nucleation_map\n", "acceptance");
  cfg.out_dir = dir;
  const ExperimentResult res = run_experiment(cfg);
  const double rho = res.metrics.at("spearman_log0.7000");
  c.require(rho >= 0.8, "pooled spearman " + fmt(rho));
  c.note("hub " + fmt(var[hub]) + " > leaves " + fmt(max_leaf) + ", spearman " + fmt(rho));
  return c;
}

// ---------------------------------------------------------------------------
// 7. Supplementary contracts.
Check criterion_supplementary() {
  Check c;

  // (a) Integration-time study.
  {
    const std::string dir = temp_dir("inttime");
    ExperimentConfig cfg = parse_config_text("experiment = integration_time\n", "acceptance");
    cfg.out_dir = dir;
    const ExperimentResult res = run_experiment(cfg);
    for (const std::string g : {"L2_g0", "L3_g0"}) {
      for (const std::string pair : {"T1J_T3J", "T1J_T4J", "T3J_T4J"}) {
        const double r = res.metrics.at("pearson_" + g + "_" + pair);
        c.require(r >= 0.95, g + " " + pair + " r = " + fmt(r));
      }
    }
  }

  // (b) Partition connectivities, exact.
  {
    const GraphFile gf = reference_partition_array();
    const std::vector<Rational> want = {{3, 2}, {1, 1}, {1, 1}, {2, 3}, {1, 3}};
    for (std::size_t i = 0; i < want.size(); ++i) {
      const Rational got = partition_connectivity(gf.graph, gf.partitions[i]);
      c.require(got == want[i], gf.partitions[i].name + " = " + got.str());
    }
  }

  // (c) Bipartite fluctuation plateaus ordered by partition connectivity.
  {
    const std::string dir = temp_dir("bipartite");
    ExperimentConfig cfg = parse_config_text("experiment = bipartite\n", "acceptance");
    cfg.out_dir = dir;
    const ExperimentResult res = run_experiment(cfg);
    const double rho = res.metrics.at("bipartite_spearman");
    c.require(std::abs(rho - 1.0) < 1e-12, "bipartite spearman " + fmt(rho));
    c.note("bipartite spearman " + fmt(rho));
  }
  return c;
}

// ---------------------------------------------------------------------------
// 8. Mean-field suite.
Check criterion_meanfield() {
  Check c;

  // psi = 0 at J = 0 for every detuning.
  for (double d : {0.0, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
    ModelParams p;
    p.g = 1e-2;
    p.J = 0.0;
    p.delta = d * p.g;
    const MeanFieldSolution sol = solve_selfconsistent(2.0, p, 5);
    c.require(std::abs(sol.psi) == 0.0, "psi != 0 at J=0, delta/g=" + fmt(d));
  }

  MeanFieldOptions tuned;
  tuned.tune_mu_to_unit_filling = true;
  ModelParams sf;
  sf.g = 1e-2;
  sf.J = 0.5 * sf.g;
  sf.delta = 1000.0 * sf.g;

  // Gauge covariance under a rotated seed.
  const MeanFieldSolution ref = solve_selfconsistent(2.0, sf, 5, 1e-10, 20000, tuned);
  c.require(std::abs(ref.psi) > 0.0, "reference superfluid point is Mott");
  for (double phase : {1.0, 2.5}) {
    MeanFieldOptions rot = tuned;
    rot.psi0 = std::polar(0.1, phase);
    const MeanFieldSolution sol = solve_selfconsistent(2.0, sf, 5, 1e-10, 20000, rot);
    c.require(std::abs(std::abs(sol.psi) - std::abs(ref.psi)) < 1e-8,
              "gauge |psi| shift " + fmt(std::abs(std::abs(sol.psi) - std::abs(ref.psi))));
    c.require(std::abs(sol.energy - ref.energy) < 1e-8,
              "gauge energy shift " + fmt(std::abs(sol.energy - ref.energy)));
    c.require(std::abs(std::abs(sol.sigma_plus) - std::abs(ref.sigma_plus)) < 1e-8,
              "gauge sigma shift");
  }

  // Monotone contracts along a detuning scan.
  double last_sigma = 1e300, last_psi = -1.0;
  bool any = false;
  for (double d : {200.0, 500.0, 1000.0, 2000.0, 5000.0}) {
    ModelParams p = sf;
    p.delta = d * p.g;
    const MeanFieldSolution sol = solve_selfconsistent(2.0, p, 5, 1e-9, 20000, tuned);
    if (std::abs(sol.psi) == 0.0) continue;
    const SigmaPlusDiagnostic diag = sigma_plus_diagnostic(sol);
    if (any) {
      c.require(diag.lhs <= last_sigma + 1e-9, "|<sigma+>| rose along the scan");
      c.require(std::abs(sol.psi) >= last_psi - 1e-9, "|psi| fell along the scan");
    }
    last_sigma = diag.lhs;
    last_psi = std::abs(sol.psi);
    any = true;
  }
  c.require(any, "no superfluid point found for the scan");

  // Truncation audit.
  double worst = 0.0;
  for (double d : {0.0, 100.0, 1000.0}) {
    ModelParams p = sf;
    p.delta = d * p.g;
    p.J = 0.3 * p.g;
    const MeanFieldSolution a = solve_selfconsistent(2.0, p, 5, 1e-10, 20000, tuned);
    const MeanFieldSolution b = solve_selfconsistent(2.0, p, 7, 1e-10, 20000, tuned);
    worst = std::max(worst, std::abs(std::abs(a.psi) - std::abs(b.psi)));
  }
  c.require(worst < 1e-6, "truncation shift " + fmt(worst));
  c.note("truncation shift " + fmt(worst));
  return c;
}

// ---------------------------------------------------------------------------
// 9. Determinism of the dimer sweep experiment.
Check criterion_determinism() {
  Check c;
  std::vector<std::vector<std::string>> contents;
  for (int round = 0; round < 2; ++round) {
    const std::string dir = temp_dir("det" + std::to_string(round));
    ExperimentConfig cfg = parse_config_text("experiment = dimer_sweep\n", "acceptance");
    cfg.out_dir = dir;
    const ExperimentResult res = run_experiment(cfg);
    std::vector<std::string> files;
    for (const auto& a : res.artifacts) {
      std::ifstream in(a, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      files.push_back(ss.str());
    }
    contents.push_back(std::move(files));
  }
  c.require(contents[0].size() == contents[1].size(), "artifact counts differ");
  for (std::size_t i = 0; i < contents[0].size(); ++i)
    c.require(contents[0][i] == contents[1][i],
              "artifact " + std::to_string(i) + " differs between runs");
  c.note(std::to_string(contents[0].size()) + " artifacts byte-identical");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* label;
    std::function<Check()> run;
  };
  const std::vector<Entry> entries = {
      {1, "conservation suite (norm, N, Var(N), energy)", criterion_conservation},
      {2, "Krylov vs dense propagation oracle", criterion_oracle},
      {3, "analytic Jaynes-Cummings suite", criterion_analytic},
      {4, "dimer sweep contract (slope ratio, monotonicity)", criterion_dimer_sweep},
      {5, "connectivity scaling of the quench plateau", criterion_scaling},
      {6, "nucleation map contract", criterion_nucleation},
      {7, "supplementary contracts (windows, partitions, bipartite)",
       criterion_supplementary},
      {8, "mean-field suite", criterion_meanfield},
      {9, "determinism of the dimer sweep", criterion_determinism},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& entry : entries) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), entry.id) == selected.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    Check result;
    try {
      result = entry.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n", result.ok ? "PASS" : "FAIL", entry.id,
                entry.label, result.detail.c_str(), secs);
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
