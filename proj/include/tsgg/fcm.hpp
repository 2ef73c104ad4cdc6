#pragma once

#include <span>
#include <vector>

#include "tsgg/autodiff.hpp"
#include "tsgg/graph.hpp"

namespace tsgg {

// One fuzzy-cognitive-map update: out_i = sigmoid(sum_j A[i][j] * state_j).
std::vector<double> fcm_step(const WeightedDigraph& g, std::span<const double> state);

// Column 0 is `init`; column t is fcm_step of column t-1. init must lie in [0,1].
MultivariateSeries fcm_simulate(const WeightedDigraph& g, std::span<const double> init,
                                std::size_t steps);

// Differentiable counterpart with respect to A (n x n). Returns the series in
// time-major layout (steps x n), the layout the encoders consume. Produces
// the same bits as the plain version for the same inputs.
ad::Var fcm_simulate_time_major(ad::Var A, std::span<const double> init, std::size_t steps);

}  // namespace tsgg
