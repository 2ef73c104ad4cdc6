#include "tsgg/discriminator.hpp"

#include <cmath>

namespace tsgg {

NormalizedAdjacency normalize_adjacency(const WeightedDigraph& g, double threshold) {
  ad::Tape tape;
  ad::Var a = ad::normalize_adjacency(tape.constant(g.adj), threshold);
  NormalizedAdjacency out;
  out.a_tilde = a.value();
  out.threshold = threshold;
  out.degree.resize(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j)
      if (std::abs(g(i, j)) >= threshold) d += std::abs(g(i, j));
    out.degree[i] = d;
  }
  return out;
}

void GcnParams::collect(nn::ParamList& out) {
  out.push_back(&W0);
  out.push_back(&W1);
}

void ReadoutParams::collect(nn::ParamList& out) {
  pre1.collect(out);
  norm1.collect(out);
  pre2.collect(out);
  norm2.collect(out);
  gate_i.collect(out);
  content_j.collect(out);
}

void NtnParams::collect(nn::ParamList& out) {
  for (auto& w : W_slices) out.push_back(&w);
  out.push_back(&V);
  out.push_back(&b);
  head.collect(out);
}

DiscriminatorParams DiscriminatorParams::init(const DiscriminatorConfig& cfg, Rng& rng) {
  DiscriminatorParams p;
  p.cfg = cfg;
  const std::size_t L = cfg.latent_dim();
  p.encoder = nn::BiSruEncoderParams::init("d.enc", cfg.n, cfg.hidden, cfg.sru_layers, rng);
  const std::size_t in0 = L + cfg.node_series_len;
  p.gcn.W0 = ad::Parameter("d.gcn.W0", nn::glorot_uniform(in0, cfg.gcn_dim, rng));
  p.gcn.W1 = ad::Parameter("d.gcn.W1", nn::glorot_uniform(cfg.gcn_dim + L, cfg.gcn_dim, rng));
  p.readout.pre1 = nn::LinearParams::init("d.readout.pre1", cfg.gcn_dim + L, cfg.readout1, rng);
  p.readout.norm1 = nn::InstanceNormParams::init("d.readout.norm1", cfg.readout1);
  p.readout.pre2 = nn::LinearParams::init("d.readout.pre2", cfg.readout1, cfg.readout2, rng);
  p.readout.norm2 = nn::InstanceNormParams::init("d.readout.norm2", cfg.readout2);
  p.readout.gate_i = nn::LinearParams::init("d.readout.gate_i", cfg.readout2, cfg.graph_dim, rng);
  p.readout.content_j = nn::LinearParams::init("d.readout.content_j", cfg.readout2, cfg.graph_dim, rng);
  for (std::size_t k = 0; k < cfg.ntn_k; ++k) {
    p.ntn.W_slices.emplace_back("d.ntn.W" + std::to_string(k),
                                nn::glorot_uniform(L, cfg.graph_dim, rng));
  }
  p.ntn.V = ad::Parameter("d.ntn.V", nn::glorot_uniform(cfg.ntn_k, L + cfg.graph_dim, rng));
  p.ntn.b = ad::Parameter("d.ntn.b", Matrix(1, cfg.ntn_k));
  p.ntn.head = nn::LinearParams::init("d.ntn.head", cfg.ntn_k, 1, rng);
  return p;
}

nn::ParamList DiscriminatorParams::parameters() {
  nn::ParamList ps;
  encoder.collect(ps);
  gcn.collect(ps);
  readout.collect(ps);
  ntn.collect(ps);
  return ps;
}

ad::Var gcn_forward(ad::Tape& tape, ad::Var a_tilde, ad::Var h_ts, GcnParams& p, ad::Var node_extra) {
  const std::size_t N = a_tilde.rows();
  ad::Var h_nodes = ad::broadcast_rows(h_ts, N);
  ad::Var x0 = node_extra.valid() ? ad::concat_cols(h_nodes, node_extra) : h_nodes;
  if (x0.cols() != p.W0.value.rows()) {
    throw ShapeError("gcn: node features " + x0.value().shape_str() + " vs W0 " +
                     p.W0.value.shape_str());
  }
  ad::Var h1 = ad::relu(ad::matmul(ad::matmul(a_tilde, x0), tape.param(p.W0)));
  ad::Var x1 = ad::concat_cols(h1, h_nodes);
  return ad::matmul(ad::matmul(a_tilde, x1), tape.param(p.W1));
}

ad::Var aggregate_nodes(ad::Tape& tape, ad::Var H, ad::Var h_ts, ReadoutParams& p, double leaky_slope) {
  ad::Var m = ad::concat_cols(H, ad::broadcast_rows(h_ts, H.rows()));
  m = ad::leaky_relu(nn::instance_norm(tape, nn::linear_forward(tape, m, p.pre1), p.norm1), leaky_slope);
  m = ad::leaky_relu(nn::instance_norm(tape, nn::linear_forward(tape, m, p.pre2), p.norm2), leaky_slope);
  ad::Var gate = ad::sigmoid(nn::linear_forward(tape, m, p.gate_i));
  ad::Var content = ad::tanh(nn::linear_forward(tape, m, p.content_j));
  return ad::sum_cols(ad::hadamard(gate, content));
}

NtnOutput ntn_score(ad::Tape& tape, ad::Var h_ts, ad::Var h_g, NtnParams& p) {
  if (p.W_slices.empty()) throw ContractError("ntn: no slices");
  const Matrix& w0 = p.W_slices.front().value;
  if (h_ts.rows() != 1 || h_ts.cols() != w0.rows() || h_g.rows() != 1 || h_g.cols() != w0.cols()) {
    throw ShapeError("ntn: latents " + h_ts.value().shape_str() + " and " + h_g.value().shape_str() +
                     " do not fit slices " + w0.shape_str());
  }
  std::vector<ad::Var> bilinear;
  bilinear.reserve(p.W_slices.size());
  for (auto& w : p.W_slices) bilinear.push_back(ad::matmul_bt(ad::matmul(h_ts, tape.param(w)), h_g));
  ad::Var bil = ad::transpose(ad::stack_rows(bilinear));
  ad::Var lin = ad::matmul_bt(ad::concat_cols(h_ts, h_g), tape.param(p.V));
  NtnOutput out;
  out.scores = ad::tanh(ad::add(ad::add(bil, lin), tape.param(p.b)));
  out.score = nn::linear_forward(tape, out.scores, p.head);
  return out;
}

namespace {

ad::Var padded_series(ad::Tape& tape, ad::Var X, std::size_t len) {
  // X is T x n; node v gets its own series as a feature row of width len.
  const Matrix& x = X.value();
  const std::size_t T = x.rows();
  Matrix sel(T, len);  // X^T * sel picks (and zero-pads) the time axis
  for (std::size_t t = 0; t < std::min(T, len); ++t) sel(t, t) = 1.0;
  return ad::matmul(ad::transpose(X), tape.constant(std::move(sel)));
}

}  // namespace

Discrimination discriminate_with_latent(ad::Tape& tape, ad::Var A, ad::Var h_ts, ad::Var X,
                                        DiscriminatorParams& p) {
  if (A.rows() != p.cfg.n || A.cols() != p.cfg.n) {
    throw ShapeError("discriminator built for " + std::to_string(p.cfg.n) + " nodes, graph is " +
                     A.value().shape_str());
  }
  ad::Var a_tilde = ad::normalize_adjacency(A, p.cfg.threshold);
  ad::Var extra;
  if (p.cfg.node_series_len > 0) extra = padded_series(tape, X, p.cfg.node_series_len);
  ad::Var H = gcn_forward(tape, a_tilde, h_ts, p.gcn, extra);
  ad::Var h_g = aggregate_nodes(tape, H, h_ts, p.readout, p.cfg.leaky_slope);
  NtnOutput s = ntn_score(tape, h_ts, h_g, p.ntn);
  return {s.score, h_g, h_ts};
}

Discrimination discriminate(ad::Tape& tape, ad::Var A, ad::Var X, DiscriminatorParams& p) {
  if (X.cols() != A.rows()) {
    throw ShapeError("graph has " + std::to_string(A.rows()) + " nodes, series has " +
                     std::to_string(X.cols()));
  }
  ad::Var h_ts = nn::encode_series(tape, X, p.encoder);
  return discriminate_with_latent(tape, A, h_ts, X, p);
}

double discriminate(const WeightedDigraph& g, const MultivariateSeries& ts, DiscriminatorParams& p) {
  ad::Tape tape;
  return discriminate(tape, tape.constant(g.adj), nn::series_input(tape, ts), p).score.scalar();
}

}  // namespace tsgg
