#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jch/dynamics.hpp"
#include "jch/graphs.hpp"
#include "jch/meanfield.hpp"
#include "jch/observables.hpp"

namespace jch {

enum class ExperimentKind {
  dimer_sweep,
  catalog_scaling,
  nucleation_map,
  integration_time,
  bipartite,
  meanfield_scan,
};

// Log-spaced detuning grid over log10(delta/g) in [log10_min, log10_max],
// optionally with an exact delta = 0 point prepended.
struct DeltaGrid {
  double log10_min = -1.0;
  double log10_max = 1.0;
  int points = 25;
  bool include_zero = false;

  std::vector<double> values_over_g() const;

  friend bool operator==(const DeltaGrid&, const DeltaGrid&) = default;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::dimer_sweep;

  // Graph source: a file, or the enumerated catalog of connected graphs.
  std::string graph_file;
  std::vector<int> catalog_nodes;  // one entry per node count, e.g. 4,5
  int catalog_index = -1;          // -1 = every graph of each count

  std::string preset;              // "", "sweep-params", "fig4-params"
  double omega = 1.0;
  double g_over_omega = 1e-2;
  double J_over_omega = 1e-4;      // canonical form; J_over_g input is converted
  int n_max = 5;
  bool sector_restricted = true;

  ModelParams base_params() const {
    ModelParams p;
    p.omega = omega;
    p.g = g_over_omega * omega;
    p.J = J_over_omega * omega;
    return p;
  }

  DeltaGrid grid;
  std::vector<Schedule::Kind> protocols{Schedule::Kind::quench};

  double measure_time_J = 1.0;                // window T in units of 1/J
  std::vector<double> window_list_J{1, 3, 4}; // integration_time windows
  double ramp_time_J = 20.0;
  int samples = 200;

  std::vector<double> map_log10_deltas{0.5, 0.7, 0.75, 0.8};

  std::vector<double> mf_k_list{1, 2, 3};
  bool mf_tune_mu = false;
  double mf_tol = 1e-8;
  int mf_max_iter = 10000;

  std::string out_dir = "out";
  bool write_timeseries = false;
  int threads = 0;     // 0 = hardware concurrency
  unsigned seed = 0;   // reserved for randomized tie-breaking; none by default

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Strict key=value/section parser; unknown sections or keys raise
// ConfigInvalid with the offending line. All defaults are applied here so
// the echoed config is complete.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Canonical echo: parseable by parse_config_text and round-trips exactly.
std::string config_echo(const ExperimentConfig& config);

struct ExperimentResult {
  std::string manifest_path;
  std::vector<std::string> artifacts;
  // Scalar summaries (slopes, correlations, drift maxima) keyed by name,
  // so downstream checks do not have to re-parse the data files.
  std::map<std::string, double> metrics;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

struct GraphSweep {
  Graph graph;
  OrderParameterCurve curve;
};

struct ScalingPoint {
  std::string graph_id;
  double mean_connectivity = 0.0;
  double plateau = 0.0;  // order parameter averaged over the plateau window
};

struct ScalingReport {
  Schedule::Kind protocol = Schedule::Kind::quench;
  std::vector<ScalingPoint> points;
  LinearFit fit;
  bool non_monotone = false;  // flagged when |r| < 0.9
};

// Plateau = mean order parameter over grid points with log10(delta/g) in
// [0.75, 0.9]. Requires at least 3 sweeps and a nonempty plateau window.
ScalingReport fit_and_report_scaling(const std::vector<GraphSweep>& sweeps,
                                     Schedule::Kind protocol);

// The reference array for the partition study: a 5-site chain with the five
// partitions whose connectivities are 3/2, 1, 1, 2/3, 1/3.
GraphFile reference_partition_array();

const char* experiment_name(ExperimentKind kind);
const char* protocol_name(Schedule::Kind kind);

}  // namespace jch
