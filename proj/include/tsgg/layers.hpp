#pragma once

#include <string>
#include <vector>

#include "tsgg/autodiff.hpp"
#include "tsgg/graph.hpp"
#include "tsgg/rng.hpp"

namespace tsgg::nn {

using ad::Parameter;
using ad::Tape;
using ad::Var;
using ParamList = std::vector<Parameter*>;

// U[-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))]
Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

struct LinearParams {
  Parameter W;  // out x in
  Parameter b;  // 1 x out

  static LinearParams init(const std::string& name, std::size_t in, std::size_t out, Rng& rng);
  std::size_t in_dim() const { return W.value.cols(); }
  std::size_t out_dim() const { return W.value.rows(); }
  void collect(ParamList& out);
};

// x * W^T + b, bias broadcast per row.
Var linear_forward(Tape& tape, Var x, LinearParams& p);

struct InstanceNormParams {
  Parameter gain;  // 1 x d, starts at 1
  Parameter bias;  // 1 x d, starts at 0
  double eps = 1e-5;

  static InstanceNormParams init(const std::string& name, std::size_t d);
  void collect(ParamList& out);
};

// Normalizes each row over its features. A single feature has zero variance,
// so d = 1 yields the bias.
Var instance_norm(Tape& tape, Var x, InstanceNormParams& p);

struct SruLayerParams {
  Parameter W, W_f, W_r, W_h;  // hidden x in
  Parameter v_f, v_r;          // 1 x hidden
  Parameter b_f, b_r;          // 1 x hidden

  static SruLayerParams init(const std::string& name, std::size_t in, std::size_t hidden, Rng& rng);
  std::size_t in_dim() const { return W.value.cols(); }
  std::size_t hidden_dim() const { return W.value.rows(); }
  void collect(ParamList& out);
};

struct SruOutput {
  std::vector<Var> hidden;  // hidden[t] belongs to input row t, whatever the direction
  Var cell;                 // final cell state in processing order
};

// One SRU pass over the rows of X (T x in), starting from c_0 = 0:
//   f_t = sigmoid(W_f x_t + v_f . c_{t-1} + b_f)
//   c_t = f_t . c_{t-1} + (1 - f_t) . (W x_t)
//   r_t = sigmoid(W_r x_t + v_r . c_{t-1} + b_r)
//   h_t = r_t . c_t + (1 - r_t) . (W_h x_t)
// `reversed` processes rows T-1 .. 0.
SruOutput sru_layer_forward(Tape& tape, Var X, SruLayerParams& p, bool reversed);

struct BiSruEncoderParams {
  struct Layer {
    SruLayerParams fwd;
    SruLayerParams bwd;
  };
  std::vector<Layer> layers;

  static BiSruEncoderParams init(const std::string& name, std::size_t input_dim,
                                 std::size_t hidden, std::size_t num_layers, Rng& rng);
  std::size_t input_dim() const { return layers.front().fwd.in_dim(); }
  std::size_t hidden_dim() const { return layers.front().fwd.hidden_dim(); }
  std::size_t latent_dim() const { return 2 * hidden_dim(); }
  void collect(ParamList& out);
};

// X is time-major (T x N). Returns 1 x 2H: the last forward hidden state of
// the top layer followed by the last backward hidden state of the top layer.
Var encode_series(Tape& tape, Var X, BiSruEncoderParams& enc);
Var encode_series(Tape& tape, const MultivariateSeries& ts, BiSruEncoderParams& enc);

// Time-major tape constant for a series.
Var series_input(Tape& tape, const MultivariateSeries& ts);

}  // namespace tsgg::nn
