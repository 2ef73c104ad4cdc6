#include "tsgg/pci.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace tsgg {

CorrelationEstimate estimate_correlation(const MultivariateSeries& ts, double ridge) {
  const std::size_t n = ts.n();
  const std::size_t T = ts.t_len();
  if (T < 3) throw ValidationError("PCI needs at least 3 time points, got " + std::to_string(T));
  if (!(ridge > 0.0)) throw ValidationError("PCI ridge must be positive");

  std::vector<double> mean(n, 0.0), sd(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < T; ++t) mean[i] += ts.values(i, t);
    mean[i] /= static_cast<double>(T);
    for (std::size_t t = 0; t < T; ++t) {
      const double d = ts.values(i, t) - mean[i];
      sd[i] += d * d;
    }
    sd[i] = std::sqrt(sd[i] / static_cast<double>(T));
  }

  CorrelationEstimate est;
  est.ridge = ridge;
  std::vector<bool> constant(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    // relative floor so that rescaling a row never flips this decision
    if (!(sd[i] > 1e-12 * std::max(1.0, std::abs(mean[i])))) {
      constant[i] = true;
      est.constant_nodes.push_back(i);
    }
  }

  est.corr = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    est.corr(i, i) = 1.0;
    if (constant[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (constant[j]) continue;
      double c = 0.0;
      for (std::size_t t = 0; t < T; ++t)
        c += (ts.values(i, t) - mean[i]) / sd[i] * ((ts.values(j, t) - mean[j]) / sd[j]);
      c /= static_cast<double>(T);
      est.corr(i, j) = est.corr(j, i) = std::clamp(c, -1.0, 1.0);
    }
  }

  Eigen::MatrixXd R(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) R(i, j) = est.corr(i, j) + (i == j ? ridge : 0.0);
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) throw NumericError("PCI: regularized correlation is not positive definite");
  Eigen::MatrixXd P = llt.solve(Eigen::MatrixXd::Identity(n, n));
  est.precision = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) est.precision(i, j) = 0.5 * (P(i, j) + P(j, i));
  return est;
}

WeightedDigraph pci_infer(const MultivariateSeries& ts, double ridge,
                          std::vector<std::size_t>* constant_nodes) {
  const CorrelationEstimate est = estimate_correlation(ts, ridge);
  const std::size_t n = ts.n();
  std::vector<bool> constant(n, false);
  for (std::size_t i : est.constant_nodes) constant[i] = true;
  WeightedDigraph g(n);
  const Matrix& th = est.precision;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || constant[i] || constant[j]) continue;
      g(i, j) = std::clamp(-th(i, j) / std::sqrt(th(i, i) * th(j, j)), -1.0, 1.0);
    }
  if (constant_nodes) *constant_nodes = est.constant_nodes;
  return g;
}

}  // namespace tsgg
