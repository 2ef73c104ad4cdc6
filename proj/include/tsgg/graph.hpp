#pragma once

#include <cstddef>

#include "tsgg/matrix.hpp"

namespace tsgg {

// A[i][j] is the weight of the edge from node j to node i.
struct WeightedDigraph {
  Matrix adj;

  WeightedDigraph() = default;
  explicit WeightedDigraph(Matrix a) : adj(std::move(a)) {
    if (adj.rows() != adj.cols()) throw ShapeError("adjacency must be square, got " + adj.shape_str());
  }
  explicit WeightedDigraph(std::size_t n) : adj(n, n) {}

  std::size_t n() const { return adj.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return adj(i, j); }
  double& operator()(std::size_t i, std::size_t j) { return adj(i, j); }
  friend bool operator==(const WeightedDigraph&, const WeightedDigraph&) = default;
};

// N x T: row i is the expression series of node i.
struct MultivariateSeries {
  Matrix values;

  MultivariateSeries() = default;
  explicit MultivariateSeries(Matrix v) : values(std::move(v)) {}

  std::size_t n() const { return values.rows(); }
  std::size_t t_len() const { return values.cols(); }
  friend bool operator==(const MultivariateSeries&, const MultivariateSeries&) = default;
};

struct PairedSample {
  MultivariateSeries series;
  WeightedDigraph graph;

  friend bool operator==(const PairedSample&, const PairedSample&) = default;
};

}  // namespace tsgg
