#include "tsgg/layers.hpp"

#include <cmath>

namespace tsgg::nn {

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(-limit, limit);
  return m;
}

LinearParams LinearParams::init(const std::string& name, std::size_t in, std::size_t out, Rng& rng) {
  return {Parameter(name + ".W", glorot_uniform(out, in, rng)), Parameter(name + ".b", Matrix(1, out))};
}

void LinearParams::collect(ParamList& out) {
  out.push_back(&W);
  out.push_back(&b);
}

Var linear_forward(Tape& tape, Var x, LinearParams& p) {
  if (x.cols() != p.in_dim()) {
    throw ShapeError("linear: input " + x.value().shape_str() + " does not match weight " +
                     p.W.value.shape_str());
  }
  return ad::add(ad::matmul_bt(x, tape.param(p.W)), tape.param(p.b));
}

InstanceNormParams InstanceNormParams::init(const std::string& name, std::size_t d) {
  return {Parameter(name + ".gain", Matrix(1, d, 1.0)), Parameter(name + ".bias", Matrix(1, d)), 1e-5};
}

void InstanceNormParams::collect(ParamList& out) {
  out.push_back(&gain);
  out.push_back(&bias);
}

Var instance_norm(Tape& tape, Var x, InstanceNormParams& p) {
  Var xhat = ad::instance_norm(x, p.eps);
  return ad::add(ad::hadamard(xhat, tape.param(p.gain)), tape.param(p.bias));
}

SruLayerParams SruLayerParams::init(const std::string& name, std::size_t in, std::size_t hidden,
                                    Rng& rng) {
  SruLayerParams p;
  p.W = Parameter(name + ".W", glorot_uniform(hidden, in, rng));
  p.W_f = Parameter(name + ".W_f", glorot_uniform(hidden, in, rng));
  p.W_r = Parameter(name + ".W_r", glorot_uniform(hidden, in, rng));
  p.W_h = Parameter(name + ".W_h", glorot_uniform(hidden, in, rng));
  p.v_f = Parameter(name + ".v_f", Matrix(1, hidden));
  p.v_r = Parameter(name + ".v_r", Matrix(1, hidden));
  p.b_f = Parameter(name + ".b_f", Matrix(1, hidden));
  p.b_r = Parameter(name + ".b_r", Matrix(1, hidden));
  return p;
}

void SruLayerParams::collect(ParamList& out) {
  for (Parameter* p : {&W, &W_f, &W_r, &W_h, &v_f, &v_r, &b_f, &b_r}) out.push_back(p);
}

SruOutput sru_layer_forward(Tape& tape, Var X, SruLayerParams& p, bool reversed) {
  const std::size_t T = X.rows();
  if (T == 0) throw ContractError("sru_layer_forward: empty sequence");
  if (X.cols() != p.in_dim()) {
    throw ShapeError("sru: input width " + std::to_string(X.cols()) + " does not match layer input " +
                     std::to_string(p.in_dim()));
  }
  const std::size_t H = p.hidden_dim();

  // Input projections for the whole sequence at once.
  Var xt = ad::matmul_bt(X, tape.param(p.W));
  Var xf = ad::add(ad::matmul_bt(X, tape.param(p.W_f)), tape.param(p.b_f));
  Var xr = ad::add(ad::matmul_bt(X, tape.param(p.W_r)), tape.param(p.b_r));
  Var xh = ad::matmul_bt(X, tape.param(p.W_h));
  Var vf = tape.param(p.v_f);
  Var vr = tape.param(p.v_r);

  SruOutput out;
  out.hidden.resize(T);
  Var c = tape.constant(Matrix(1, H));
  for (std::size_t step = 0; step < T; ++step) {
    const std::size_t t = reversed ? T - 1 - step : step;
    Var x_tilde = ad::row(xt, t);
    Var f = ad::sigmoid(ad::add(ad::row(xf, t), ad::hadamard(vf, c)));
    Var r = ad::sigmoid(ad::add(ad::row(xr, t), ad::hadamard(vr, c)));
    // f.c + (1-f).x~ == x~ + f.(c - x~)
    c = ad::add(x_tilde, ad::hadamard(f, ad::sub(c, x_tilde)));
    Var highway = ad::row(xh, t);
    out.hidden[t] = ad::add(highway, ad::hadamard(r, ad::sub(c, highway)));
  }
  out.cell = c;
  return out;
}

BiSruEncoderParams BiSruEncoderParams::init(const std::string& name, std::size_t input_dim,
                                            std::size_t hidden, std::size_t num_layers, Rng& rng) {
  BiSruEncoderParams enc;
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::string base = name + ".l" + std::to_string(l);
    Layer layer;
    layer.fwd = SruLayerParams::init(base + ".fwd", in, hidden, rng);
    layer.bwd = SruLayerParams::init(base + ".bwd", in, hidden, rng);
    enc.layers.push_back(std::move(layer));
    in = 2 * hidden;
  }
  return enc;
}

void BiSruEncoderParams::collect(ParamList& out) {
  for (Layer& l : layers) {
    l.fwd.collect(out);
    l.bwd.collect(out);
  }
}

Var encode_series(Tape& tape, Var X, BiSruEncoderParams& enc) {
  if (X.cols() != enc.input_dim()) {
    throw ShapeError("encoder expects " + std::to_string(enc.input_dim()) + " nodes, series has " +
                     std::to_string(X.cols()));
  }
  Var input = X;
  Var last_fwd, last_bwd;
  for (std::size_t l = 0; l < enc.layers.size(); ++l) {
    SruOutput f = sru_layer_forward(tape, input, enc.layers[l].fwd, false);
    SruOutput b = sru_layer_forward(tape, input, enc.layers[l].bwd, true);
    last_fwd = f.hidden.back();
    last_bwd = b.hidden.front();
    if (l + 1 < enc.layers.size()) {
      input = ad::concat_cols(ad::stack_rows(f.hidden), ad::stack_rows(b.hidden));
    }
  }
  return ad::concat_cols(last_fwd, last_bwd);
}

Var series_input(Tape& tape, const MultivariateSeries& ts) {
  return tape.constant(transpose(ts.values));
}

Var encode_series(Tape& tape, const MultivariateSeries& ts, BiSruEncoderParams& enc) {
  if (ts.t_len() == 0) throw ContractError("encode_series: empty series");
  return encode_series(tape, series_input(tape, ts), enc);
}

}  // namespace tsgg::nn
