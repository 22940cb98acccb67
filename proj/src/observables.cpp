#include "jch/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "jch/errors.hpp"

namespace jch {

std::pair<double, double> site_moments(const StateVector& psi, int site) {
  const Basis& b = *psi.basis;
  if (site < 0 || site >= b.sites())
    throw SiteOutOfRange("site_moments: site " + std::to_string(site) + " out of range");
  double mean = 0.0, second = 0.0;
  for (std::int64_t s = 0; s < b.dim(); ++s) {
    const double w = std::norm(psi.amplitudes[s]);
    if (w == 0.0) continue;
    const double e = b.excitation(s, site);
    mean += w * e;
    second += w * e * e;
  }
  return {mean, second};
}

double order_parameter(const PropagationReport& report) {
  std::vector<std::pair<double, double>> series;
  series.reserve(report.samples.size());
  for (const auto& s : report.samples)
    series.emplace_back(s.time, (s.n_second - s.n_mean.cwiseProduct(s.n_mean)).sum());
  return time_average(series, report.measure_time);
}

Eigen::VectorXd per_site_variances(const PropagationReport& report) {
  if (report.samples.empty()) throw InsufficientSamples("per_site_variances: no samples");
  const int L = static_cast<int>(report.samples[0].n_mean.size());
  Eigen::VectorXd out(L);
  std::vector<std::pair<double, double>> series(report.samples.size());
  for (int i = 0; i < L; ++i) {
    for (std::size_t k = 0; k < report.samples.size(); ++k) {
      const auto& s = report.samples[k];
      series[k] = {s.time, s.n_second[i] - s.n_mean[i] * s.n_mean[i]};
    }
    out[i] = time_average(series, report.measure_time);
  }
  return out;
}

CorrelationMatrix correlation_matrix(const PropagationReport& report) {
  if (report.samples.empty()) throw InsufficientSamples("correlation_matrix: no samples");
  const int L = static_cast<int>(report.samples[0].n_mean.size());
  CorrelationMatrix cm;
  cm.C = Eigen::MatrixXd::Zero(L, L);
  std::vector<std::pair<double, double>> series(report.samples.size());
  for (int i = 0; i < L; ++i)
    for (int j = i; j < L; ++j) {
      for (std::size_t k = 0; k < report.samples.size(); ++k) {
        const auto& s = report.samples[k];
        series[k] = {s.time, s.nn(i, j) - s.n_mean[i] * s.n_mean[j]};
      }
      cm.C(i, j) = cm.C(j, i) = time_average(series, report.measure_time);
    }
  return cm;
}

double bipartite_fluctuation(const CorrelationMatrix& cm, const Partition& p) {
  if (p.members.empty()) throw EmptyPartition("bipartite_fluctuation: empty partition");
  double sum = 0.0;
  for (int i : p.members)
    for (int j : p.members) {
      if (i < 0 || j < 0 || i >= cm.C.rows() || j >= cm.C.cols())
        throw IndexOutOfRange("bipartite_fluctuation: member out of range");
      sum += cm.C(i, j);
    }
  return sum;
}

LinearFit scaling_fit(const std::vector<std::pair<double, double>>& points) {
  const std::size_t n = points.size();
  if (n < 3) throw InsufficientSamples("scaling_fit: need at least 3 points");
  double sx = 0, sy = 0;
  for (auto [x, y] : points) { sx += x; sy += y; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (auto [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw DegenerateInput("scaling_fit: all abscissae are equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.pearson_r = syy == 0.0 ? 0.0 : sxy / std::sqrt(sxx * syy);
  return fit;
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, double>> pts(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pts[i] = {x[i], y[i]};
  return scaling_fit(pts).pearson_r;
}

namespace {

// Average ranks; values closer than tol*(range) share one tie class.
std::vector<double> tied_ranks(const std::vector<double>& v, double tie_tol) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double tol = tie_tol * std::max(*hi - *lo, 1e-300);
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] - v[idx[j]] <= tol) ++j;
    const double r = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y,
                            double tie_tol) {
  if (x.size() != y.size() || x.size() < 3)
    throw InsufficientSamples("spearman_correlation: need matching lists of >= 3 values");
  return pearson_correlation(tied_ranks(x, tie_tol), tied_ranks(y, tie_tol));
}

double OrderParameterCurve::max_discrete_slope() const {
  double best = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    if (points[k].delta_over_g <= 0.0 || points[k + 1].delta_over_g <= 0.0) continue;
    const double dx =
        std::log10(points[k + 1].delta_over_g) - std::log10(points[k].delta_over_g);
    if (dx == 0.0) continue;
    best = std::max(best,
                    std::abs((points[k + 1].order_parameter - points[k].order_parameter) / dx));
  }
  return best;
}

void write_curve(const OrderParameterCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const int L = curve.points.empty()
                    ? 0
                    : static_cast<int>(curve.points[0].per_site_variances.size());
  out << "# graph=" << curve.graph_id << " protocol="
      << (curve.protocol == Schedule::Kind::quench ? "quench" : "adiabatic") << "\n";
  out << "# delta_over_g\torder_parameter";
  for (int i = 0; i < L; ++i) out << "\tvar_site" << i;
  out << "\n";
  char buf[64];
  for (const auto& pt : curve.points) {
    std::snprintf(buf, sizeof buf, "%.17g\t%.17g", pt.delta_over_g, pt.order_parameter);
    out << buf;
    for (int i = 0; i < L; ++i) {
      std::snprintf(buf, sizeof buf, "\t%.17g", pt.per_site_variances[i]);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace jch
