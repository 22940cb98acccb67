#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "jch/dynamics.hpp"
#include "jch/graphs.hpp"

namespace jch {

// (<n_i>, <n_i^2>) of the per-site excitation number in one state.
std::pair<double, double> site_moments(const StateVector& psi, int site);

// Time-averaged sum over sites of the instantaneous number variance,
// the order parameter of the Mott-to-superfluid crossover.
double order_parameter(const PropagationReport& report);

// Per-site time-averaged variances <n_i^2> - <n_i>^2 (the nucleation map).
Eigen::VectorXd per_site_variances(const PropagationReport& report);

struct CorrelationMatrix {
  Eigen::MatrixXd C;  // time average of <n_i n_j> - <n_i><n_j>
};

CorrelationMatrix correlation_matrix(const PropagationReport& report);

// Sum of C_ij over i,j in the partition: the number variance of the block.
double bipartite_fluctuation(const CorrelationMatrix& C, const Partition& p);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double pearson_r = 0.0;
};

// Least-squares line through (x, y) points plus the Pearson correlation.
// Throws DegenerateInput when all x coincide, InsufficientSamples below 3.
LinearFit scaling_fit(const std::vector<std::pair<double, double>>& points);

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

// Spearman rank correlation with average ranks for ties; values within
// tie_tol (relative to the data range) are grouped into one tie class.
double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y,
                            double tie_tol = 1e-9);

struct CurvePoint {
  double delta_over_g = 0.0;
  double order_parameter = 0.0;
  Eigen::VectorXd per_site_variances;
};

struct OrderParameterCurve {
  std::string graph_id;
  Schedule::Kind protocol = Schedule::Kind::quench;
  std::vector<CurvePoint> points;  // strictly increasing in delta_over_g

  // Max |d(order parameter) / d log10(delta/g)| over consecutive grid points
  // with delta > 0.
  double max_discrete_slope() const;
};

// Columns: delta_over_g, order_parameter, then one variance column per site.
void write_curve(const OrderParameterCurve& curve, const std::string& path);

}  // namespace jch
