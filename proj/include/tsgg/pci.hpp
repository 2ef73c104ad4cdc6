#pragma once

#include <vector>

#include "tsgg/graph.hpp"

namespace tsgg {

// Partial-correlation network estimate ("PCI-surrogate" in reports).
struct CorrelationEstimate {
  Matrix corr;       // Pearson correlation over the time axis, unit diagonal
  Matrix precision;  // inverse of corr + ridge * I
  double ridge = 1e-3;
  std::vector<std::size_t> constant_nodes;  // zero-variance rows, excluded from the estimate
};

CorrelationEstimate estimate_correlation(const MultivariateSeries& ts, double ridge = 1e-3);

// p_ij = -Theta_ij / sqrt(Theta_ii Theta_jj); symmetric, zero diagonal,
// clamped to [-1, 1]. Nodes with constant series get no edges.
WeightedDigraph pci_infer(const MultivariateSeries& ts, double ridge = 1e-3,
                          std::vector<std::size_t>* constant_nodes = nullptr);

}  // namespace tsgg
