#pragma once

#include <vector>

#include "tsgg/layers.hpp"

namespace tsgg {

inline constexpr double kEdgeThreshold = 0.05;

struct DiscriminatorConfig {
  std::size_t n = 10;
  std::size_t hidden = 32;  // per-direction SRU width; latent is 2x
  std::size_t sru_layers = 2;
  std::size_t gcn_dim = 32;
  std::size_t readout1 = 32;
  std::size_t readout2 = 64;
  std::size_t graph_dim = 32;
  std::size_t ntn_k = 16;
  double threshold = kEdgeThreshold;
  double leaky_slope = ad::kLeakySlope;
  // When nonzero, each node's own series (truncated or zero-padded to this
  // length) is appended to its first-layer features. Breaks the exact
  // permutation invariance of the default broadcast features.
  std::size_t node_series_len = 0;

  std::size_t latent_dim() const { return 2 * hidden; }
};

struct NormalizedAdjacency {
  Matrix a_tilde;
  double threshold = kEdgeThreshold;
  std::vector<double> degree;
};

NormalizedAdjacency normalize_adjacency(const WeightedDigraph& g, double threshold = kEdgeThreshold);

struct GcnParams {
  ad::Parameter W0;  // in x gcn_dim
  ad::Parameter W1;  // (gcn_dim + latent) x gcn_dim
  void collect(nn::ParamList& out);
};

struct ReadoutParams {
  nn::LinearParams pre1, pre2;
  nn::InstanceNormParams norm1, norm2;
  nn::LinearParams gate_i, content_j;
  void collect(nn::ParamList& out);
};

struct NtnParams {
  std::vector<ad::Parameter> W_slices;  // K slices, latent x graph_dim
  ad::Parameter V;                      // K x (latent + graph_dim)
  ad::Parameter b;                      // 1 x K
  nn::LinearParams head;                // K -> 1
  void collect(nn::ParamList& out);
};

struct DiscriminatorParams {
  DiscriminatorConfig cfg;
  nn::BiSruEncoderParams encoder;
  GcnParams gcn;
  ReadoutParams readout;
  NtnParams ntn;

  static DiscriminatorParams init(const DiscriminatorConfig& cfg, Rng& rng);
  nn::ParamList parameters();
};

// X0 = node features (h_ts on every row); H1 = ReLU(A~ X0 W0);
// H2 = A~ [H1, h_ts] W1, left unactivated.
ad::Var gcn_forward(ad::Tape& tape, ad::Var a_tilde, ad::Var h_ts, GcnParams& p,
                    ad::Var node_extra = {});

// Gated sum over nodes of sigmoid(i(m_v)) * tanh(j(m_v)), m_v = MLP([H_v, h_ts]).
ad::Var aggregate_nodes(ad::Tape& tape, ad::Var H, ad::Var h_ts, ReadoutParams& p,
                        double leaky_slope = ad::kLeakySlope);

struct NtnOutput {
  ad::Var scores;  // 1 x K, each in (-1, 1)
  ad::Var score;   // 1 x 1
};

NtnOutput ntn_score(ad::Tape& tape, ad::Var h_ts, ad::Var h_g, NtnParams& p);

struct Discrimination {
  ad::Var score;
  ad::Var h_g;
  ad::Var h_ts;
};

// A is n x n, X the time-major series (T x n).
Discrimination discriminate(ad::Tape& tape, ad::Var A, ad::Var X, DiscriminatorParams& p);
// Same with a precomputed series latent, so several graphs can share one encoding.
Discrimination discriminate_with_latent(ad::Tape& tape, ad::Var A, ad::Var h_ts, ad::Var X,
                                        DiscriminatorParams& p);

double discriminate(const WeightedDigraph& g, const MultivariateSeries& ts, DiscriminatorParams& p);

}  // namespace tsgg
