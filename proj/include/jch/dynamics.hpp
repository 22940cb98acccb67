#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "jch/model.hpp"

namespace jch {

// Detuning protocol. For a quench the target detuning is applied at t=0;
// for the adiabatic protocol it is reached linearly over ramp_time, then
// observables are averaged over the trailing measure_time window.
struct Schedule {
  enum class Kind { quench, adiabatic };
  Kind kind = Kind::quench;
  double delta_target = 0.0;
  double ramp_time = 0.0;
  double measure_time = 0.0;
};

enum class PropagatorKind { automatic, dense, krylov };

struct RunOptions {
  int sample_count = 200;
  int n_max = 5;
  bool sector_restricted = true;   // fix N = L (the Mott sector)
  double tol = 1e-10;              // propagation error budget for the whole run
  PropagatorKind propagator = PropagatorKind::automatic;
  int krylov_dim = 30;
  bool audit_ramp = false;         // adiabatic: rerun with doubled ramp_time
  double ramp_delta_step = 0.0;    // max detuning increment per rung; 0 -> g/50
};

// Instantaneous per-site moments of the polariton number n_i and friends.
struct MomentSample {
  double time = 0.0;                      // relative to the measurement window
  Eigen::VectorXd n_mean;                 // <n_i>
  Eigen::VectorXd n_second;               // <n_i^2>
  Eigen::VectorXd tls_occ;                // <sigma+_i sigma-_i>
  Eigen::VectorXd photon_occ;             // <a+_i a_i>
  Eigen::MatrixXd nn;                     // <n_i n_j>, symmetric
  double norm_error = 0.0;                // |1 - ||psi|| |
  double n_total = 0.0;                   // <N>
  double n_variance = 0.0;                // <N^2> - <N>^2
  double energy = 0.0;                    // <H> under the measurement Hamiltonian
};

struct PropagationReport {
  StateVector final_state;
  double norm_drift = 0.0;
  double n_drift = 0.0;
  double n_variance_max = 0.0;
  double energy_drift = 0.0;              // over the fixed-H measurement window
  std::vector<MomentSample> samples;      // uniform over [0, measure_time]
  double measure_time = 0.0;
  double h_norm_inf = 0.0;                // of the measurement Hamiltonian
  std::string graph_name;
  ModelParams params;                      // parameters at measurement time
  Schedule schedule;
  bool adiabaticity_warning = false;
  double ramp_audit_rel_change = 0.0;

  // Hard conservation gates; throws ConservationViolation.
  void validate() const;
};

// psi <- exp(-i H dt) psi, without renormalization.
class Propagator {
 public:
  virtual ~Propagator() = default;
  virtual void advance(Eigen::VectorXcd& psi, double dt, double tol) = 0;
};

// automatic: dense eigendecomposition up to dim 2000, Krylov above.
std::unique_ptr<Propagator> make_propagator(const SparseHamiltonian& H,
                                            PropagatorKind kind = PropagatorKind::automatic,
                                            int krylov_dim = 30);

// One-shot exp(-iHt)|psi> within tol (vector 2-norm). Throws
// DimensionMismatch if the state and Hamiltonian bases differ, and
// ToleranceNotMet if adaptive stepping cannot certify the accuracy.
StateVector evolve(const StateVector& psi, const SparseHamiltonian& H, double t, double tol,
                   PropagatorKind kind = PropagatorKind::automatic, int krylov_dim = 30);

// Trapezoidal (1/T) integral of uniformly sampled values covering [0, window].
// Throws InsufficientSamples for fewer than 8 samples.
double time_average(const std::vector<std::pair<double, double>>& samples, double window);

// Moments of one state; used by the runners at every sample time.
MomentSample measure_moments(const Basis& basis, const Eigen::VectorXcd& psi, double time,
                             const SparseHamiltonian* energy_h = nullptr);

PropagationReport run_quench(const Graph& graph, const ModelParams& params,
                             const Schedule& schedule, const RunOptions& opts = {});
PropagationReport run_adiabatic(const Graph& graph, const ModelParams& params,
                                const Schedule& schedule, const RunOptions& opts = {});

// Time-series dump: tab-separated time, site, <n>, <n^2>, <s+s->, <a+a>.
void write_timeseries(const PropagationReport& report, const std::string& path);

}  // namespace jch
