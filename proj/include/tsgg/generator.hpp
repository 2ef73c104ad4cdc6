#pragma once

#include "tsgg/layers.hpp"

namespace tsgg {

struct GeneratorConfig {
  std::size_t n = 10;             // graph size; the output projection is n*n wide
  std::size_t hidden = 32;        // per-direction SRU width
  std::size_t sru_layers = 2;
  std::size_t noise_dim = 32;
  std::size_t mlp1 = 32;
  std::size_t mlp2 = 64;
  double leaky_slope = ad::kLeakySlope;
  bool zero_diagonal = true;
};

struct GeneratorParams {
  GeneratorConfig cfg;
  nn::BiSruEncoderParams encoder;
  nn::LinearParams l1, l2, out;
  nn::InstanceNormParams n1, n2;

  static GeneratorParams init(const GeneratorConfig& cfg, Rng& rng);
  nn::ParamList parameters();
};

// i.i.d. standard normal row vector.
Matrix sample_noise(Rng& rng, std::size_t dim = 32);

// Differentiable generator pass. X is the time-major series (T x n).
// Returns the n x n weight matrix: tanh of the MLP output on [h_ts, z],
// reshaped row-major, with the diagonal zeroed when configured.
ad::Var generate(ad::Tape& tape, ad::Var X, ad::Var z, GeneratorParams& p);

WeightedDigraph generate(const MultivariateSeries& ts, const Matrix& z, GeneratorParams& p);

}  // namespace tsgg
