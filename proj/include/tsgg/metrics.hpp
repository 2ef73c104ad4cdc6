#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsgg/graph.hpp"

namespace tsgg::metrics {

struct MetricConfig {
  std::optional<double> gamma;  // Lorentzian half-width, valid for gamma_n nodes only
  std::size_t gamma_n = 0;
  double xi = 1.0;
  double grid_step = 1e-3;

  // Config with gamma calibrated for n-node graphs.
  static MetricConfig for_nodes(std::size_t n, double xi = 1.0, double grid_step = 1e-3);
};

// Sum over i != j of |A_ij - B_ij|, divided by 2 n (n - 1).
double hamming_distance(const WeightedDigraph& a, const WeightedDigraph& b);

// Eigenvalues (ascending) of the Laplacian of W = (|A| + |A|^T) / 2.
std::vector<double> laplacian_spectrum(const WeightedDigraph& g);

// Unnormalized distance for an explicit gamma; exposed for calibration.
double ipsen_mikhailov_raw(const std::vector<double>& spectrum_a, const std::vector<double>& spectrum_b,
                           double gamma, double grid_step = 1e-3);

double ipsen_mikhailov(const WeightedDigraph& a, const WeightedDigraph& b, const MetricConfig& cfg);

// Bisection on gamma in [1e-4, 1] so that IM(empty_n, complete_n) = 1. Memoized per (n, grid_step).
double calibrate_gamma(std::size_t n, double grid_step = 1e-3);

double him_distance(const WeightedDigraph& a, const WeightedDigraph& b, const MetricConfig& cfg);

// rho = L / tr(L); an edgeless graph maps to I / n.
Matrix density_matrix(const WeightedDigraph& g);
double von_neumann_entropy(const Matrix& rho);  // base 2, 0 log 0 := 0
double qjsd_distance(const WeightedDigraph& a, const WeightedDigraph& b);

struct PairMetrics {
  double hamming = 0.0;
  double im = 0.0;
  double him = 0.0;
  double qjsd = 0.0;
};

struct BatchReport {
  std::vector<PairMetrics> pairs;
  double mean_hamming = 0.0;
  double mean_im = 0.0;
  double mean_him = 0.0;
  double mean_qjsd = 0.0;
  MetricConfig config;
};

struct BatchOptions {
  bool abs_predictions = false;  // compare |pred| against unsigned gold networks
};

// A single truth is compared against every prediction (replicates of one network).
BatchReport evaluate_batch(const std::vector<WeightedDigraph>& preds,
                           const std::vector<WeightedDigraph>& truths, const MetricConfig& cfg,
                           const BatchOptions& opts = {});

}  // namespace tsgg::metrics
