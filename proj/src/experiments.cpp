#include "jch/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "jch/errors.hpp"
#include "jch/parallel.hpp"

namespace fs = std::filesystem;

namespace jch {

GraphFile reference_partition_array() {
  // 5-site chain; the five partitions have external connectivity over size
  // 3/2, 1, 1, 2/3 and 1/3.
  GraphFile gf;
  gf.graph = build_graph({{0, 1}, {1, 2}, {2, 3}, {3, 4}}, 5);
  gf.graph.set_name("chain5");
  gf.partitions = {
      {"M1", {1, 4}}, {"M2", {1, 2}}, {"M3", {2, 3}}, {"M4", {1, 2, 3}}, {"M5", {0, 1, 2}},
  };
  return gf;
}

namespace {

constexpr double kPlateauLogMin = 0.75;
constexpr double kPlateauLogMax = 0.9;
constexpr double kPlateauEps = 1e-9;

struct NamedGraph {
  Graph graph;
  std::vector<Partition> partitions;
};

std::vector<NamedGraph> resolve_graphs(const ExperimentConfig& c) {
  std::vector<NamedGraph> out;
  if (!c.graph_file.empty()) {
    GraphFile gf = read_graph_file(c.graph_file);
    out.push_back({std::move(gf.graph), std::move(gf.partitions)});
    return out;
  }
  if (c.catalog_nodes.empty()) {
    if (c.experiment == ExperimentKind::bipartite) {
      GraphFile gf = reference_partition_array();
      out.push_back({std::move(gf.graph), std::move(gf.partitions)});
    }
    return out;
  }
  for (int L : c.catalog_nodes) {
    auto entries = enumerate_connected_graphs(L);
    if (c.catalog_index >= 0) {
      if (c.catalog_index >= static_cast<int>(entries.size()))
        throw ConfigInvalid("graph.index " + std::to_string(c.catalog_index) +
                            " out of range for the L=" + std::to_string(L) + " catalog");
      out.push_back({std::move(entries[c.catalog_index].graph), {}});
    } else {
      for (auto& e : entries) out.push_back({std::move(e.graph), {}});
    }
  }
  return out;
}

std::string delta_tag(double d_over_g) {
  if (d_over_g == 0.0) return "d0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "log%.4f", std::log10(d_over_g));
  return buf;
}

std::string fmtg(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct PointResult {
  double delta_over_g = 0.0;
  double op = 0.0;
  Eigen::VectorXd site_var;
  Eigen::MatrixXd corr;
  std::vector<double> window_ops;
  double norm_drift = 0.0, n_drift = 0.0, nvar_max = 0.0, energy_drift = 0.0;
};

struct DriftMax {
  double norm = 0.0, n = 0.0, nvar = 0.0, energy = 0.0;
  void absorb(const PointResult& p) {
    norm = std::max(norm, p.norm_drift);
    n = std::max(n, p.n_drift);
    nvar = std::max(nvar, p.nvar_max);
    energy = std::max(energy, p.energy_drift);
  }
};

PointResult run_point(const NamedGraph& ng, const ExperimentConfig& c, Schedule::Kind kind,
                      double d_over_g, bool want_corr,
                      const std::vector<int>* window_prefixes = nullptr) {
  const ModelParams params = c.base_params();
  if (params.J <= 0.0) throw ConfigInvalid("experiment requires J > 0");

  Schedule sched;
  sched.kind = kind;
  sched.delta_target = d_over_g * params.g;
  sched.measure_time = c.measure_time_J / params.J;
  sched.ramp_time = c.ramp_time_J / params.J;

  RunOptions opts;
  opts.n_max = c.n_max;
  opts.sector_restricted = c.sector_restricted;
  opts.sample_count = c.samples;

  if (window_prefixes) {
    const double wmax = *std::max_element(c.window_list_J.begin(), c.window_list_J.end());
    sched.measure_time = wmax / params.J;
    opts.sample_count = static_cast<int>(std::lround(wmax * c.samples)) + 1;
  }

  PropagationReport report = kind == Schedule::Kind::quench
                                 ? run_quench(ng.graph, params, sched, opts)
                                 : run_adiabatic(ng.graph, params, sched, opts);

  PointResult out;
  out.delta_over_g = d_over_g;
  out.op = order_parameter(report);
  out.site_var = per_site_variances(report);
  if (want_corr) out.corr = correlation_matrix(report).C;
  out.norm_drift = report.norm_drift;
  out.n_drift = report.n_drift;
  out.nvar_max = report.n_variance_max;
  out.energy_drift = report.energy_drift;

  if (window_prefixes) {
    for (std::size_t w = 0; w < c.window_list_J.size(); ++w) {
      const int steps = (*window_prefixes)[w];
      std::vector<std::pair<double, double>> series;
      series.reserve(steps + 1);
      for (int k = 0; k <= steps; ++k) {
        const auto& s = report.samples[k];
        series.emplace_back(s.time, (s.n_second - s.n_mean.cwiseProduct(s.n_mean)).sum());
      }
      out.window_ops.push_back(time_average(series, c.window_list_J[w] / params.J));
    }
  }

  if (c.write_timeseries) {
    const std::string path = c.out_dir + "/" + ng.graph.name() + "_" + protocol_name(kind) +
                             "_" + delta_tag(d_over_g) + ".tsv";
    write_timeseries(report, path);
  }
  return out;
}

// Wraps a job so any failure carries the (graph, delta) key.
template <typename Fn>
auto keyed(const std::string& graph, double d_over_g, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw Error("[graph=" + graph + " delta_over_g=" + fmtg(d_over_g) + "] " + e.what());
  }
}

void write_map_file(const std::string& path, const Graph& g, const Eigen::VectorXd& var) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# graph=" << g.name() << "\n# site\tconnectivity\tvariance\n";
  char buf[80];
  for (int i = 0; i < g.sites(); ++i) {
    std::snprintf(buf, sizeof buf, "%d\t%d\t%.17g\n", i, g.degree(i), var[i]);
    out << buf;
  }
}

double curve_plateau(const OrderParameterCurve& curve) {
  double sum = 0.0;
  int count = 0;
  for (const auto& pt : curve.points) {
    if (pt.delta_over_g <= 0.0) continue;
    const double lg = std::log10(pt.delta_over_g);
    if (lg >= kPlateauLogMin - kPlateauEps && lg <= kPlateauLogMax + kPlateauEps) {
      sum += pt.order_parameter;
      ++count;
    }
  }
  if (count == 0)
    throw InsufficientSamples("no sweep points fall in the plateau window log10(delta/g) in [" +
                              std::to_string(kPlateauLogMin) + ", " +
                              std::to_string(kPlateauLogMax) + "]");
  return sum / count;
}

struct SweepOutput {
  std::vector<GraphSweep> by_protocol[2];  // index 0 quench, 1 adiabatic
  DriftMax drift;
};

int protocol_slot(Schedule::Kind k) { return k == Schedule::Kind::quench ? 0 : 1; }

// Shared (graph x protocol x delta) fan-out used by the sweep experiments.
SweepOutput run_sweep_matrix(const ExperimentConfig& c, const std::vector<NamedGraph>& graphs,
                             bool want_corr) {
  const std::vector<double> deltas = c.grid.values_over_g();
  struct Job {
    const NamedGraph* g;
    Schedule::Kind kind;
    double d;
    std::size_t graph_idx, delta_idx;
  };
  std::vector<Job> jobs;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi)
    for (Schedule::Kind kind : c.protocols)
      for (std::size_t di = 0; di < deltas.size(); ++di)
        jobs.push_back({&graphs[gi], kind, deltas[di], gi, di});

  std::vector<PointResult> results(jobs.size());
  parallel_for(jobs.size(), c.threads, [&](std::size_t i) {
    const Job& j = jobs[i];
    results[i] = keyed(j.g->graph.name(), j.d, [&] {
      return run_point(*j.g, c, j.kind, j.d, want_corr);
    });
  });

  SweepOutput out;
  for (int slot = 0; slot < 2; ++slot)
    out.by_protocol[slot].resize(graphs.size());
  for (std::size_t gi = 0; gi < graphs.size(); ++gi)
    for (int slot = 0; slot < 2; ++slot) {
      out.by_protocol[slot][gi].graph = graphs[gi].graph;
      out.by_protocol[slot][gi].curve.graph_id = graphs[gi].graph.name();
      out.by_protocol[slot][gi].curve.protocol =
          slot == 0 ? Schedule::Kind::quench : Schedule::Kind::adiabatic;
    }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& j = jobs[i];
    PointResult& r = results[i];
    out.drift.absorb(r);
    CurvePoint pt{r.delta_over_g, r.op, r.site_var};
    out.by_protocol[protocol_slot(j.kind)][j.graph_idx].curve.points.push_back(pt);
  }
  // Jobs were enqueued in delta order per (graph, protocol), so points are
  // already sorted; assert the curve invariant anyway.
  for (int slot = 0; slot < 2; ++slot)
    for (auto& sweep : out.by_protocol[slot])
      for (std::size_t k = 1; k < sweep.curve.points.size(); ++k)
        if (!(sweep.curve.points[k - 1].delta_over_g < sweep.curve.points[k].delta_over_g))
          throw Error("sweep grid produced non-increasing deltas");
  return out;
}

void write_scaling_file(const std::string& path, const ScalingReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# protocol=" << protocol_name(report.protocol)
      << "\n# graph\tmean_connectivity\tplateau_order_parameter\n";
  for (const auto& p : report.points)
    out << p.graph_id << "\t" << fmtg(p.mean_connectivity) << "\t" << fmtg(p.plateau) << "\n";
  out << "# fit slope=" << fmtg(report.fit.slope) << " intercept=" << fmtg(report.fit.intercept)
      << " pearson_r=" << fmtg(report.fit.pearson_r)
      << (report.non_monotone ? " non-monotone" : "") << "\n";
}

void sweep_experiment(const ExperimentConfig& c, ExperimentResult& res, DriftMax& drift) {
  const std::vector<NamedGraph> graphs = resolve_graphs(c);
  if (graphs.empty()) throw ConfigInvalid("experiment needs at least one graph");
  SweepOutput sweep = run_sweep_matrix(c, graphs, false);
  drift = sweep.drift;

  for (Schedule::Kind kind : c.protocols) {
    const int slot = protocol_slot(kind);
    for (const auto& gs : sweep.by_protocol[slot]) {
      const std::string path =
          c.out_dir + "/" + gs.curve.graph_id + "_" + protocol_name(kind) + "_curve.tsv";
      write_curve(gs.curve, path);
      res.artifacts.push_back(path);
      res.metrics[gs.curve.graph_id + "_" + protocol_name(kind) + "_max_slope"] =
          gs.curve.max_discrete_slope();
      if (gs.curve.points.front().delta_over_g == 0.0)
        res.metrics[gs.curve.graph_id + "_" + protocol_name(kind) + "_op_at_zero"] =
            gs.curve.points.front().order_parameter;
    }
    if (c.experiment == ExperimentKind::catalog_scaling) {
      ScalingReport sr = fit_and_report_scaling(sweep.by_protocol[slot], kind);
      const std::string path =
          c.out_dir + "/scaling_" + std::string(protocol_name(kind)) + ".tsv";
      write_scaling_file(path, sr);
      res.artifacts.push_back(path);
      res.metrics[std::string("scaling_r_") + protocol_name(kind)] = sr.fit.pearson_r;
      res.metrics[std::string("scaling_slope_") + protocol_name(kind)] = sr.fit.slope;
    }
  }
}

void nucleation_experiment(const ExperimentConfig& c, ExperimentResult& res, DriftMax& drift) {
  const std::vector<NamedGraph> graphs = resolve_graphs(c);
  if (graphs.empty()) throw ConfigInvalid("nucleation_map needs at least one graph");
  struct Job {
    const NamedGraph* g;
    double d;
  };
  std::vector<Job> jobs;
  for (const auto& g : graphs)
    for (double lg : c.map_log10_deltas) jobs.push_back({&g, std::pow(10.0, lg)});

  std::vector<PointResult> results(jobs.size());
  parallel_for(jobs.size(), c.threads, [&](std::size_t i) {
    results[i] = keyed(jobs[i].g->graph.name(), jobs[i].d, [&] {
      return run_point(*jobs[i].g, c, Schedule::Kind::quench, jobs[i].d, false);
    });
  });

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    drift.absorb(results[i]);
    const std::string path = c.out_dir + "/" + jobs[i].g->graph.name() + "_map_" +
                             delta_tag(jobs[i].d) + ".tsv";
    write_map_file(path, jobs[i].g->graph, results[i].site_var);
    res.artifacts.push_back(path);
  }

  // Pooled rank correlation of per-site variance against connectivity.
  for (std::size_t di = 0; di < c.map_log10_deltas.size(); ++di) {
    std::vector<double> ks, vars;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (i % c.map_log10_deltas.size() != di) continue;
      for (int s = 0; s < jobs[i].g->graph.sites(); ++s) {
        ks.push_back(jobs[i].g->graph.degree(s));
        vars.push_back(results[i].site_var[s]);
      }
    }
    res.metrics["spearman_" + delta_tag(std::pow(10.0, c.map_log10_deltas[di]))] =
        spearman_correlation(ks, vars, 1e-9);
  }
}

void integration_time_experiment(const ExperimentConfig& c, ExperimentResult& res,
                                 DriftMax& drift) {
  const std::vector<NamedGraph> graphs = resolve_graphs(c);
  if (graphs.empty()) throw ConfigInvalid("integration_time needs at least one graph");

  // Every window must land exactly on the shared sample grid.
  std::vector<int> prefixes;
  for (double w : c.window_list_J) {
    const double steps = w * c.samples;
    const int rounded = static_cast<int>(std::lround(steps));
    if (std::abs(steps - rounded) > 1e-9)
      throw ConfigInvalid("windows_J entry " + fmtg(w) + " does not align with the sample grid");
    prefixes.push_back(rounded);
  }

  const std::vector<double> deltas = c.grid.values_over_g();
  struct Job {
    const NamedGraph* g;
    double d;
    std::size_t graph_idx, delta_idx;
  };
  std::vector<Job> jobs;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi)
    for (std::size_t di = 0; di < deltas.size(); ++di)
      jobs.push_back({&graphs[gi], deltas[di], gi, di});

  std::vector<PointResult> results(jobs.size());
  parallel_for(jobs.size(), c.threads, [&](std::size_t i) {
    results[i] = keyed(jobs[i].g->graph.name(), jobs[i].d, [&] {
      return run_point(*jobs[i].g, c, Schedule::Kind::quench, jobs[i].d, false, &prefixes);
    });
  });

  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = graphs[gi].graph;
    std::vector<std::vector<double>> per_window(c.window_list_J.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].graph_idx != gi) continue;
      drift.absorb(results[i]);
      for (std::size_t w = 0; w < c.window_list_J.size(); ++w)
        per_window[w].push_back(results[i].window_ops[w]);
    }
    for (std::size_t w = 0; w < c.window_list_J.size(); ++w) {
      char tag[32];
      std::snprintf(tag, sizeof tag, "T%gJ", c.window_list_J[w]);
      const std::string path = c.out_dir + "/" + g.name() + "_" + tag + "_curve.tsv";
      std::ofstream out(path);
      if (!out) throw IoError("cannot open '" + path + "' for writing");
      out << "# graph=" << g.name() << " window_J=" << fmtg(c.window_list_J[w])
          << "\n# delta_over_g\torder_parameter\n";
      for (std::size_t di = 0; di < deltas.size(); ++di)
        out << fmtg(deltas[di]) << "\t" << fmtg(per_window[w][di]) << "\n";
      res.artifacts.push_back(path);
    }
    for (std::size_t a = 0; a < c.window_list_J.size(); ++a)
      for (std::size_t b = a + 1; b < c.window_list_J.size(); ++b) {
        char key[96];
        std::snprintf(key, sizeof key, "pearson_%s_T%gJ_T%gJ", g.name().c_str(),
                      c.window_list_J[a], c.window_list_J[b]);
        res.metrics[key] = pearson_correlation(per_window[a], per_window[b]);
      }
  }
}

void bipartite_experiment(const ExperimentConfig& c, ExperimentResult& res, DriftMax& drift) {
  const std::vector<NamedGraph> graphs = resolve_graphs(c);
  if (graphs.empty() || graphs[0].partitions.empty())
    throw ConfigInvalid("bipartite experiment needs a graph with partitions");
  const NamedGraph& ng = graphs[0];

  {
    const std::string path = c.out_dir + "/partition_connectivities.tsv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "# graph=" << ng.graph.name() << "\n# partition\tconnectivity\tvalue\n";
    for (const auto& p : ng.partitions) {
      const Rational r = partition_connectivity(ng.graph, p);
      out << p.name << "\t" << r.str() << "\t" << fmtg(r.value()) << "\n";
    }
    res.artifacts.push_back(path);
  }

  const std::vector<double> deltas = c.grid.values_over_g();
  std::vector<PointResult> results(deltas.size());
  parallel_for(deltas.size(), c.threads, [&](std::size_t i) {
    results[i] = keyed(ng.graph.name(), deltas[i], [&] {
      return run_point(ng, c, Schedule::Kind::quench, deltas[i], true);
    });
  });

  std::vector<std::vector<double>> fluct(ng.partitions.size(),
                                         std::vector<double>(deltas.size()));
  for (std::size_t di = 0; di < deltas.size(); ++di) {
    drift.absorb(results[di]);
    CorrelationMatrix cm{results[di].corr};
    for (std::size_t pi = 0; pi < ng.partitions.size(); ++pi)
      fluct[pi][di] = bipartite_fluctuation(cm, ng.partitions[pi]);
  }

  {
    const std::string path = c.out_dir + "/bipartite_fluctuations.tsv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "# graph=" << ng.graph.name() << "\n# delta_over_g";
    for (const auto& p : ng.partitions) out << "\t" << p.name;
    out << "\n";
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      out << fmtg(deltas[di]);
      for (std::size_t pi = 0; pi < ng.partitions.size(); ++pi)
        out << "\t" << fmtg(fluct[pi][di]);
      out << "\n";
    }
    res.artifacts.push_back(path);
  }

  // Plateau per partition against exact partition connectivity.
  std::vector<double> conn, plateaus;
  for (std::size_t pi = 0; pi < ng.partitions.size(); ++pi) {
    conn.push_back(partition_connectivity(ng.graph, ng.partitions[pi]).value());
    double sum = 0.0;
    int count = 0;
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      if (deltas[di] <= 0.0) continue;
      const double lg = std::log10(deltas[di]);
      if (lg >= kPlateauLogMin - kPlateauEps && lg <= kPlateauLogMax + kPlateauEps) {
        sum += fluct[pi][di];
        ++count;
      }
    }
    if (count == 0) throw InsufficientSamples("bipartite plateau window is empty");
    plateaus.push_back(sum / count);
  }
  if (conn.size() >= 3)
    res.metrics["bipartite_spearman"] = spearman_correlation(conn, plateaus, 1e-6);
}

void meanfield_experiment(const ExperimentConfig& c, ExperimentResult& res) {
  const ModelParams base = c.base_params();
  const std::vector<double> deltas = c.grid.values_over_g();
  struct Row {
    double k, d;
    MeanFieldSolution sol;
  };
  std::vector<Row> rows;
  for (double k : c.mf_k_list)
    for (double d : deltas) rows.push_back({k, d, {}});

  parallel_for(rows.size(), c.threads, [&](std::size_t i) {
    ModelParams p = base;
    p.delta = rows[i].d * p.g;
    MeanFieldOptions mo;
    mo.tune_mu_to_unit_filling = c.mf_tune_mu;
    rows[i].sol = solve_selfconsistent(rows[i].k, p, c.n_max, c.mf_tol, c.mf_max_iter, mo);
  });

  const std::string path = c.out_dir + "/meanfield_scan.tsv";
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# k\tdelta_over_g\tJ_over_g\tabs_psi\tenergy\tabs_sigma_plus\tconverged\n";
  const double J_over_g = base.J / base.g;
  for (const auto& r : rows) {
    out << fmtg(r.k) << "\t" << fmtg(r.d) << "\t" << fmtg(J_over_g) << "\t"
        << fmtg(std::abs(r.sol.psi)) << "\t" << fmtg(r.sol.energy) << "\t"
        << fmtg(std::abs(r.sol.sigma_plus)) << "\t" << (r.sol.converged ? 1 : 0) << "\n";
  }
  res.artifacts.push_back(path);

  int superfluid = 0;
  for (const auto& r : rows)
    if (std::abs(r.sol.psi) > 0.0) ++superfluid;
  res.metrics["superfluid_points"] = superfluid;
}

}  // namespace

ScalingReport fit_and_report_scaling(const std::vector<GraphSweep>& sweeps,
                                     Schedule::Kind protocol) {
  if (sweeps.size() < 3)
    throw InsufficientSamples("fit_and_report_scaling: need at least 3 graphs, got " +
                              std::to_string(sweeps.size()));
  ScalingReport report;
  report.protocol = protocol;
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : sweeps) {
    ScalingPoint p;
    p.graph_id = s.curve.graph_id;
    p.mean_connectivity = s.graph.mean_connectivity();
    p.plateau = curve_plateau(s.curve);
    pts.emplace_back(p.mean_connectivity, p.plateau);
    report.points.push_back(std::move(p));
  }
  report.fit = scaling_fit(pts);
  report.non_monotone = std::abs(report.fit.pearson_r) < 0.9;
  return report;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (!fs::is_directory(c.out_dir))
    throw ConfigInvalid("cannot create output directory '" + c.out_dir + "'");

  ExperimentResult res;
  DriftMax drift;
  switch (c.experiment) {
    case ExperimentKind::dimer_sweep:
    case ExperimentKind::catalog_scaling:
      sweep_experiment(c, res, drift);
      break;
    case ExperimentKind::nucleation_map:
      nucleation_experiment(c, res, drift);
      break;
    case ExperimentKind::integration_time:
      integration_time_experiment(c, res, drift);
      break;
    case ExperimentKind::bipartite:
      bipartite_experiment(c, res, drift);
      break;
    case ExperimentKind::meanfield_scan:
      meanfield_experiment(c, res);
      break;
  }

  res.metrics["max_norm_drift"] = drift.norm;
  res.metrics["max_n_drift"] = drift.n;
  res.metrics["max_n_variance"] = drift.nvar;
  res.metrics["max_energy_drift"] = drift.energy;

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Every artifact is expected to exist and to start with its header line.
  for (const auto& path : res.artifacts) {
    std::ifstream in(path);
    std::string first;
    if (!in || !std::getline(in, first) || first.empty() || first[0] != '#')
      throw IoError("artifact '" + path + "' is missing or malformed");
  }

  res.manifest_path = c.out_dir + "/manifest.txt";
  std::ofstream man(res.manifest_path);
  if (!man) throw IoError("cannot open '" + res.manifest_path + "' for writing");
  man << "# jch experiment manifest\n# version: jch 0.1.0\n";
  man << config_echo(c);
  man << "# walltime_s: " << wall << "\n";
  man << "# max_norm_drift: " << fmtg(drift.norm) << "\n";
  man << "# max_n_drift: " << fmtg(drift.n) << "\n";
  man << "# max_n_variance: " << fmtg(drift.nvar) << "\n";
  man << "# max_energy_drift: " << fmtg(drift.energy) << "\n";
  for (const auto& a : res.artifacts) man << "# artifact: " << a << "\n";
  return res;
}

}  // namespace jch
