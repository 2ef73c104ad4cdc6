#include "tsgg/fcm.hpp"

namespace tsgg {

namespace {

void check_init(std::size_t n, std::span<const double> init, std::size_t steps) {
  if (init.size() != n) {
    throw ShapeError("fcm: initial state has " + std::to_string(init.size()) + " values for " +
                     std::to_string(n) + " nodes");
  }
  if (steps < 1) throw ValidationError("fcm: need at least one time step");
  for (double v : init) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("fcm: initial values must lie in [0,1]");
  }
}

}  // namespace

std::vector<double> fcm_step(const WeightedDigraph& g, std::span<const double> state) {
  if (state.size() != g.n()) {
    throw ShapeError("fcm_step: state has " + std::to_string(state.size()) + " values for " +
                     std::to_string(g.n()) + " nodes");
  }
  // Same kernel as the tape path: row-vector state times A^T.
  Matrix s(1, state.size(), std::vector<double>(state.begin(), state.end()));
  Matrix pre = matmul_bt(s, g.adj);
  std::vector<double> out(g.n());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid(pre[i]);
  return out;
}

MultivariateSeries fcm_simulate(const WeightedDigraph& g, std::span<const double> init,
                                std::size_t steps) {
  check_init(g.n(), init, steps);
  Matrix series(g.n(), steps);
  std::vector<double> state(init.begin(), init.end());
  for (std::size_t t = 0; t < steps; ++t) {
    if (t > 0) state = fcm_step(g, state);
    for (std::size_t i = 0; i < g.n(); ++i) series(i, t) = state[i];
  }
  return MultivariateSeries(std::move(series));
}

ad::Var fcm_simulate_time_major(ad::Var A, std::span<const double> init, std::size_t steps) {
  if (A.rows() != A.cols()) throw ShapeError("fcm: adjacency not square " + A.value().shape_str());
  check_init(A.rows(), init, steps);
  ad::Tape& tape = *A.tape();
  std::vector<ad::Var> rows;
  rows.reserve(steps);
  rows.push_back(tape.constant(Matrix(1, init.size(), std::vector<double>(init.begin(), init.end()))));
  for (std::size_t t = 1; t < steps; ++t) rows.push_back(ad::sigmoid(ad::matmul_bt(rows.back(), A)));
  return ad::stack_rows(rows);
}

}  // namespace tsgg
