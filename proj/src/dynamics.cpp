#include "jch/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include "jch/errors.hpp"

namespace jch {

namespace {

using Cplx = std::complex<double>;
constexpr Cplx kMinusI{0.0, -1.0};

class DensePropagator final : public Propagator {
 public:
  explicit DensePropagator(const SparseHamiltonian& H) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(H.matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
  }

  void advance(Eigen::VectorXcd& psi, double dt, double /*tol*/) override {
    if (dt == 0.0) return;
    Eigen::VectorXcd c = evecs_.transpose() * psi;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::exp(kMinusI * (evals_[k] * dt));
    psi = evecs_ * c;
  }

 private:
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;  // real orthogonal, H is real symmetric
};

// Lanczos propagator with full reorthogonalization and adaptive substeps.
// The local step error is estimated from the amplitude leaking onto the
// (m+1)-th Krylov vector, integrated with Simpson's rule over the substep.
class KrylovPropagator final : public Propagator {
 public:
  KrylovPropagator(const SparseHamiltonian& H, int m)
      : h_(&H), m_(std::min<std::int64_t>(std::max(m, 2), H.dim())) {}

  void advance(Eigen::VectorXcd& psi, double dt, double tol) override {
    if (dt == 0.0) return;
    if (dt < 0.0) throw Error("KrylovPropagator: negative time step");
    const double tol_rate = std::max(tol, 1e-15) / dt;
    double remaining = dt;

    while (remaining > 0.0) {
      const double beta0 = psi.norm();
      if (beta0 == 0.0) return;

      build_subspace(psi, beta0);

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat_);
      const Eigen::VectorXd& theta = es.eigenvalues();
      const Eigen::MatrixXd& s = es.eigenvectors();
      const Eigen::VectorXd c0 = s.row(0).transpose();  // S^T e_1

      const bool happy = h_last_ <= 1e-13 * std::max(1.0, h_->norm_inf());
      double tau = happy ? remaining : std::min(remaining, suggestion(theta));
      double est = 0.0;
      if (!happy) {
        const double floor_tau = remaining * 1e-13;
        while (true) {
          est = step_error(theta, s, c0, tau);
          if (est <= tol_rate * tau) break;
          tau *= 0.5;
          if (tau < floor_tau)
            throw ToleranceNotMet("KrylovPropagator: step size collapsed before meeting tol");
        }
        // Grow while comfortably inside the budget.
        while (tau < remaining) {
          const double trial = std::min(remaining, tau * 1.8);
          const double e2 = step_error(theta, s, c0, trial);
          if (e2 > 0.5 * tol_rate * trial) break;
          tau = trial;
          est = e2;
          if (trial == remaining) break;
        }
        last_tau_ = tau;
      }

      Eigen::VectorXcd d(krylov_m_);
      for (int k = 0; k < krylov_m_; ++k) d[k] = std::exp(kMinusI * (theta[k] * tau)) * c0[k];
      const Eigen::VectorXcd y = s * d;
      psi = basis_ * (beta0 * y);
      remaining -= tau;
    }
  }

 private:
  void build_subspace(const Eigen::VectorXcd& psi, double beta0) {
    const std::int64_t n = h_->dim();
    krylov_m_ = static_cast<int>(m_);
    basis_.resize(n, krylov_m_);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(krylov_m_);
    Eigen::VectorXd off = Eigen::VectorXd::Zero(krylov_m_);

    basis_.col(0) = psi / beta0;
    Eigen::VectorXcd w;
    int built = krylov_m_;
    h_last_ = 0.0;
    for (int j = 0; j < krylov_m_; ++j) {
      w = h_->apply(basis_.col(j));
      alpha[j] = basis_.col(j).dot(w).real();
      w -= alpha[j] * basis_.col(j);
      if (j > 0) w -= off[j - 1] * basis_.col(j - 1);
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) w -= basis_.col(i).dot(w) * basis_.col(i);
      const double b = w.norm();
      if (j + 1 < krylov_m_) {
        if (b <= 1e-13 * std::max(1.0, h_->norm_inf())) {
          built = j + 1;
          h_last_ = 0.0;
          break;
        }
        off[j] = b;
        basis_.col(j + 1) = w / b;
      } else {
        h_last_ = b;
      }
    }
    krylov_m_ = built;
    tmat_ = Eigen::MatrixXd::Zero(krylov_m_, krylov_m_);
    for (int j = 0; j < krylov_m_; ++j) {
      tmat_(j, j) = alpha[j];
      if (j + 1 < krylov_m_) tmat_(j, j + 1) = tmat_(j + 1, j) = off[j];
    }
    if (built < static_cast<int>(m_)) h_last_ = 0.0;
    basis_.conservativeResize(Eigen::NoChange, krylov_m_);
  }

  // Leak amplitude onto the next Krylov vector at substep time s.
  double leak(const Eigen::VectorXd& theta, const Eigen::MatrixXd& s_vecs,
              const Eigen::VectorXd& c0, double t) const {
    Cplx a{0.0, 0.0};
    for (int k = 0; k < krylov_m_; ++k)
      a += s_vecs(krylov_m_ - 1, k) * std::exp(kMinusI * (theta[k] * t)) * c0[k];
    return std::abs(a);
  }

  double step_error(const Eigen::VectorXd& theta, const Eigen::MatrixXd& s_vecs,
                    const Eigen::VectorXd& c0, double tau) const {
    // err(tau) ~ h_last * integral_0^tau |leak(s)| ds, Simpson's rule.
    const double l0 = krylov_m_ > 1 ? 0.0 : 1.0;
    const double lm = leak(theta, s_vecs, c0, 0.5 * tau);
    const double l1 = leak(theta, s_vecs, c0, tau);
    return h_last_ * tau / 6.0 * (l0 + 4.0 * lm + l1);
  }

  double suggestion(const Eigen::VectorXd& theta) const {
    if (last_tau_ > 0.0) return last_tau_;
    const double spread = theta[krylov_m_ - 1] - theta[0];
    return krylov_m_ / std::max(spread, 1e-12);
  }

  const SparseHamiltonian* h_;
  std::int64_t m_;
  int krylov_m_ = 0;
  double h_last_ = 0.0;
  double last_tau_ = 0.0;
  Eigen::MatrixXcd basis_;
  Eigen::MatrixXd tmat_;
};

}  // namespace

std::unique_ptr<Propagator> make_propagator(const SparseHamiltonian& H, PropagatorKind kind,
                                            int krylov_dim) {
  if (kind == PropagatorKind::automatic)
    kind = H.dim() <= 2000 ? PropagatorKind::dense : PropagatorKind::krylov;
  if (kind == PropagatorKind::dense) return std::make_unique<DensePropagator>(H);
  return std::make_unique<KrylovPropagator>(H, krylov_dim);
}

StateVector evolve(const StateVector& psi, const SparseHamiltonian& H, double t, double tol,
                   PropagatorKind kind, int krylov_dim) {
  if (!psi.basis || !psi.basis->same_space(H.basis()) || psi.amplitudes.size() != H.dim())
    throw DimensionMismatch("evolve: state and Hamiltonian bases differ");
  if (t < 0.0) throw Error("evolve: t must be >= 0");
  StateVector out{psi.basis, psi.amplitudes};
  if (t == 0.0) return out;
  auto prop = make_propagator(H, kind, krylov_dim);
  prop->advance(out.amplitudes, t, tol);
  return out;
}

double time_average(const std::vector<std::pair<double, double>>& samples, double window) {
  const std::size_t n = samples.size();
  if (n < 8)
    throw InsufficientSamples("time_average: need at least 8 samples, got " + std::to_string(n));
  if (window <= 0.0) throw Error("time_average: window must be positive");
  const double t0 = samples.front().first;
  const double span = samples.back().first - t0;
  if (std::abs(span - window) > 1e-6 * window)
    throw Error("time_average: samples do not cover the window");
  const double h = span / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(samples[k].first - t0 - static_cast<double>(k) * h) > 1e-6 * window)
      throw Error("time_average: samples are not uniform in time");
  double acc = 0.5 * (samples.front().second + samples.back().second);
  for (std::size_t k = 1; k + 1 < n; ++k) acc += samples[k].second;
  return acc * h / window;
}

MomentSample measure_moments(const Basis& basis, const Eigen::VectorXcd& psi, double time,
                             const SparseHamiltonian* energy_h) {
  const int L = basis.sites();
  const std::int64_t dim = basis.dim();
  MomentSample m;
  m.time = time;
  m.n_mean = Eigen::VectorXd::Zero(L);
  m.n_second = Eigen::VectorXd::Zero(L);
  m.tls_occ = Eigen::VectorXd::Zero(L);
  m.photon_occ = Eigen::VectorXd::Zero(L);
  m.nn = Eigen::MatrixXd::Zero(L, L);

  std::vector<double> exc(L);
  double norm2 = 0.0;
  for (std::int64_t s = 0; s < dim; ++s) {
    const double w = std::norm(psi[s]);
    norm2 += w;
    if (w == 0.0) continue;
    for (int i = 0; i < L; ++i) {
      const int p = basis.photons(s, i);
      const int t = basis.tls_up(s, i) ? 1 : 0;
      const double e = p + t;
      exc[i] = e;
      m.n_mean[i] += w * e;
      m.n_second[i] += w * e * e;
      m.tls_occ[i] += w * t;
      m.photon_occ[i] += w * p;
    }
    for (int i = 0; i < L; ++i)
      for (int j = i; j < L; ++j) m.nn(i, j) += w * exc[i] * exc[j];
  }
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < i; ++j) m.nn(i, j) = m.nn(j, i);

  m.norm_error = std::abs(1.0 - std::sqrt(norm2));
  m.n_total = m.n_mean.sum();
  m.n_variance = m.nn.sum() - m.n_total * m.n_total;
  if (energy_h) m.energy = energy_h->expectation(psi);
  return m;
}

void PropagationReport::validate() const {
  if (!(norm_drift < 1e-8))
    throw ConservationViolation("norm drift " + std::to_string(norm_drift) + " exceeds 1e-8 (" +
                                graph_name + ")");
  if (!(n_drift < 1e-8))
    throw ConservationViolation("excitation drift " + std::to_string(n_drift) +
                                " exceeds 1e-8 (" + graph_name + ")");
}

namespace {

struct RunCore {
  StateVector psi;
  std::shared_ptr<const Basis> basis;
  std::shared_ptr<const Graph> graph;
};

RunCore prepare_initial(const Graph& graph, const RunOptions& opts) {
  RunCore core;
  core.graph = std::make_shared<const Graph>(graph);
  core.basis = std::make_shared<const Basis>(enumerate_basis(
      graph.sites(), opts.n_max,
      opts.sector_restricted ? std::optional<int>(graph.sites()) : std::nullopt));
  core.psi = prepare_mott_state(core.basis);
  return core;
}

// Shared measurement phase: evolve under a fixed H, sampling uniformly.
void measure_window(RunCore& core, const SparseHamiltonian& H, const Schedule& schedule,
                    const RunOptions& opts, PropagationReport& report) {
  const int S = std::max(opts.sample_count, 2);
  const double dt = schedule.measure_time / static_cast<double>(S - 1);
  auto prop = make_propagator(H, opts.propagator, opts.krylov_dim);
  const double seg_tol = 0.5 * opts.tol / static_cast<double>(S - 1);

  report.samples.clear();
  report.samples.reserve(S);
  report.samples.push_back(measure_moments(*core.basis, core.psi.amplitudes, 0.0, &H));
  for (int k = 1; k < S; ++k) {
    prop->advance(core.psi.amplitudes, dt, seg_tol);
    report.samples.push_back(
        measure_moments(*core.basis, core.psi.amplitudes, k * dt, &H));
  }

  const double n0 = report.samples.front().n_total;
  const double e0 = report.samples.front().energy;
  for (const auto& s : report.samples) {
    report.norm_drift = std::max(report.norm_drift, s.norm_error);
    report.n_drift = std::max(report.n_drift, std::abs(s.n_total - n0));
    report.n_variance_max = std::max(report.n_variance_max, std::abs(s.n_variance));
    report.energy_drift = std::max(report.energy_drift, std::abs(s.energy - e0));
  }
  report.measure_time = schedule.measure_time;
  report.h_norm_inf = H.norm_inf();
  report.final_state = core.psi;
}

PropagationReport run_protocol(const Graph& graph, const ModelParams& params,
                               const Schedule& schedule, const RunOptions& opts) {
  if (schedule.measure_time <= 0.0) throw Error("run: measure_time must be positive");

  RunCore core = prepare_initial(graph, opts);
  PropagationReport report;
  report.graph_name = graph.name();
  report.schedule = schedule;

  ModelParams target = params;
  target.delta = schedule.delta_target;
  report.params = target;

  const double n_ref = static_cast<double>(graph.sites());

  if (schedule.kind == Schedule::Kind::adiabatic && schedule.delta_target != 0.0) {
    if (schedule.ramp_time <= 0.0) throw Error("run_adiabatic: ramp_time must be positive");
    const double dstep = opts.ramp_delta_step > 0.0 ? opts.ramp_delta_step : params.g / 50.0;
    const int n_steps =
        static_cast<int>(std::ceil(std::abs(schedule.delta_target) / dstep));
    const double dt = schedule.ramp_time / n_steps;
    const double step_tol = 0.5 * opts.tol / n_steps;
    for (int s = 0; s < n_steps; ++s) {
      ModelParams rung = params;
      rung.delta = schedule.delta_target * (s + 0.5) / n_steps;
      const SparseHamiltonian H = assemble_jch(core.graph, rung, core.basis);
      auto prop = make_propagator(H, opts.propagator, opts.krylov_dim);
      prop->advance(core.psi.amplitudes, dt, step_tol);
      report.norm_drift = std::max(report.norm_drift, std::abs(1.0 - core.psi.norm()));
    }
    MomentSample post = measure_moments(*core.basis, core.psi.amplitudes, 0.0, nullptr);
    report.n_drift = std::max(report.n_drift, std::abs(post.n_total - n_ref));
  }

  const SparseHamiltonian H = assemble_jch(core.graph, target, core.basis);
  measure_window(core, H, schedule, opts, report);
  // The initial state is an exact N = L eigenstate; drift is measured
  // against that reference rather than the first sample.
  report.n_drift = std::max(report.n_drift,
                            std::abs(report.samples.front().n_total - n_ref));
  report.validate();
  return report;
}

double summed_variance_average(const PropagationReport& report) {
  std::vector<std::pair<double, double>> series;
  series.reserve(report.samples.size());
  for (const auto& s : report.samples)
    series.emplace_back(s.time, (s.n_second - s.n_mean.cwiseProduct(s.n_mean)).sum());
  return time_average(series, report.measure_time);
}

}  // namespace

PropagationReport run_quench(const Graph& graph, const ModelParams& params,
                             const Schedule& schedule, const RunOptions& opts) {
  if (schedule.kind != Schedule::Kind::quench)
    throw Error("run_quench: schedule kind is not quench");
  return run_protocol(graph, params, schedule, opts);
}

PropagationReport run_adiabatic(const Graph& graph, const ModelParams& params,
                                const Schedule& schedule, const RunOptions& opts) {
  if (schedule.kind != Schedule::Kind::adiabatic)
    throw Error("run_adiabatic: schedule kind is not adiabatic");
  PropagationReport report = run_protocol(graph, params, schedule, opts);
  if (opts.audit_ramp) {
    Schedule doubled = schedule;
    doubled.ramp_time = 2.0 * schedule.ramp_time;
    RunOptions quiet = opts;
    quiet.audit_ramp = false;
    const PropagationReport check = run_protocol(graph, params, doubled, quiet);
    const double a = summed_variance_average(report);
    const double b = summed_variance_average(check);
    const double scale = std::max({std::abs(a), std::abs(b), 1e-12});
    report.ramp_audit_rel_change = std::abs(a - b) / scale;
    report.adiabaticity_warning = report.ramp_audit_rel_change > 0.01;
  }
  return report;
}

void write_timeseries(const PropagationReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# time\tsite\tn_mean\tn_second\ttls_occ\tphoton_occ\n";
  char buf[160];
  const int L = report.samples.empty() ? 0 : static_cast<int>(report.samples[0].n_mean.size());
  for (const auto& s : report.samples) {
    for (int i = 0; i < L; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\t%d\t%.17g\t%.17g\t%.17g\t%.17g\n", s.time, i,
                    s.n_mean[i], s.n_second[i], s.tls_occ[i], s.photon_occ[i]);
      out << buf;
    }
  }
}

}  // namespace jch
