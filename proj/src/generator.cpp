#include "tsgg/generator.hpp"

namespace tsgg {

GeneratorParams GeneratorParams::init(const GeneratorConfig& cfg, Rng& rng) {
  if (cfg.n < 1) throw ValidationError("generator needs at least one node");
  GeneratorParams p;
  p.cfg = cfg;
  p.encoder = nn::BiSruEncoderParams::init("g.enc", cfg.n, cfg.hidden, cfg.sru_layers, rng);
  const std::size_t in = 2 * cfg.hidden + cfg.noise_dim;
  p.l1 = nn::LinearParams::init("g.mlp.l1", in, cfg.mlp1, rng);
  p.n1 = nn::InstanceNormParams::init("g.mlp.n1", cfg.mlp1);
  p.l2 = nn::LinearParams::init("g.mlp.l2", cfg.mlp1, cfg.mlp2, rng);
  p.n2 = nn::InstanceNormParams::init("g.mlp.n2", cfg.mlp2);
  p.out = nn::LinearParams::init("g.mlp.out", cfg.mlp2, cfg.n * cfg.n, rng);
  return p;
}

nn::ParamList GeneratorParams::parameters() {
  nn::ParamList ps;
  encoder.collect(ps);
  l1.collect(ps);
  n1.collect(ps);
  l2.collect(ps);
  n2.collect(ps);
  out.collect(ps);
  return ps;
}

Matrix sample_noise(Rng& rng, std::size_t dim) {
  Matrix z(1, dim);
  for (double& v : z.data()) v = rng.normal();
  return z;
}

ad::Var generate(ad::Tape& tape, ad::Var X, ad::Var z, GeneratorParams& p) {
  const std::size_t n = p.cfg.n;
  if (X.cols() != n) {
    throw ShapeError("generator built for " + std::to_string(n) + " nodes, series has " +
                     std::to_string(X.cols()));
  }
  if (z.rows() != 1 || z.cols() != p.cfg.noise_dim) {
    throw ShapeError("noise must be 1x" + std::to_string(p.cfg.noise_dim) + ", got " +
                     z.value().shape_str());
  }
  ad::Var h_ts = nn::encode_series(tape, X, p.encoder);
  ad::Var h = ad::concat_cols(h_ts, z);
  h = ad::leaky_relu(nn::instance_norm(tape, nn::linear_forward(tape, h, p.l1), p.n1), p.cfg.leaky_slope);
  h = ad::leaky_relu(nn::instance_norm(tape, nn::linear_forward(tape, h, p.l2), p.n2), p.cfg.leaky_slope);
  ad::Var a = ad::tanh(ad::reshape(nn::linear_forward(tape, h, p.out), n, n));
  if (p.cfg.zero_diagonal) {
    Matrix mask(n, n, 1.0);
    for (std::size_t i = 0; i < n; ++i) mask(i, i) = 0.0;
    a = ad::hadamard(a, tape.constant(std::move(mask)));
  }
  return a;
}

WeightedDigraph generate(const MultivariateSeries& ts, const Matrix& z, GeneratorParams& p) {
  ad::Tape tape;
  ad::Var a = generate(tape, nn::series_input(tape, ts), tape.constant(z), p);
  return WeightedDigraph(a.value());
}

}  // namespace tsgg
