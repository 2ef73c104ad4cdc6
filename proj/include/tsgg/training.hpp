#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsgg/discriminator.hpp"
#include "tsgg/generator.hpp"

namespace tsgg {

struct GanHyper {
  double alpha = 1.0;   // graph-embedding feature matching
  double beta = 0.5;    // series-latent feature matching
  double omega = 50.0;  // simulated-series reconstruction
  double lr_g = 2e-4;
  double lr_d = 1e-4;
  std::size_t epochs = 100;
  std::size_t d_steps = 1;
  std::size_t g_steps = 2;
  std::size_t batch = 1;
  std::size_t checkpoint_every = 10;
  double radam_beta1 = 0.9;
  double radam_beta2 = 0.999;
  double radam_eps = 1e-8;

  void validate() const;
};

// --- RAdam ------------------------------------------------------------------

struct RAdamState {
  Matrix m;
  Matrix v;
  std::int64_t t = 0;
};

struct RAdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Length of the approximated simple moving average at step t.
double radam_rho(std::int64_t t, double beta2);

// One rectified-Adam update of p.value from p.grad. Returns true when the
// rectified adaptive branch was taken (rho_t > 4).
bool radam_step(ad::Parameter& p, RAdamState& state, double lr, const RAdamConfig& cfg = {});

// Moment state for a fixed, ordered parameter list.
class RAdam {
 public:
  RAdam() = default;
  explicit RAdam(const nn::ParamList& params, RAdamConfig cfg = {});

  void step(const nn::ParamList& params, double lr);
  const std::vector<RAdamState>& states() const { return states_; }
  std::vector<RAdamState>& states() { return states_; }
  const RAdamConfig& config() const { return cfg_; }

 private:
  RAdamConfig cfg_;
  std::vector<RAdamState> states_;
};

// --- losses -----------------------------------------------------------------

// 1/2 (D(real) - 1)^2 + 1/2 D(fake)^2. The fake graph enters as a constant.
struct DLossTerms {
  ad::Var total;
  ad::Var real_score;
  ad::Var fake_score;
};
DLossTerms d_loss(ad::Tape& tape, DiscriminatorParams& d, const PairedSample& real,
                  const WeightedDigraph& fake);

// 1/2 D(G(z,ts),ts)^2 + alpha |h_g(real) - h_g(fake)| + beta |h_ts(ts) - h_ts(ts_fake)|
// + omega |ts - ts_fake|, where ts_fake simulates the fake graph from the real
// series' first column. D is frozen for the duration of the call.
struct GLossTerms {
  ad::Var total;
  ad::Var lsgan;
  ad::Var alpha;
  ad::Var beta;
  ad::Var omega;
  ad::Var fake_graph;
};
GLossTerms g_loss(ad::Tape& tape, GeneratorParams& g, DiscriminatorParams& d, const PairedSample& real,
                  const Matrix& z, const GanHyper& hyper);

// The same objective for an already generated adjacency. D must be frozen by the caller.
GLossTerms g_loss_from_graph(ad::Tape& tape, ad::Var a_fake, DiscriminatorParams& d, const PairedSample& real,
                             const GanHyper& hyper);

// Freezes every parameter in the list for the guard's lifetime.
class FreezeGuard {
 public:
  explicit FreezeGuard(nn::ParamList params);
  ~FreezeGuard();
  FreezeGuard(const FreezeGuard&) = delete;
  FreezeGuard& operator=(const FreezeGuard&) = delete;

 private:
  nn::ParamList params_;
  std::vector<bool> previous_;
};

// --- training ------------------------------------------------------------------

struct ModelCheckpoint {
  GeneratorParams g;
  DiscriminatorParams d;
  GanHyper hyper;
  RAdam opt_g;
  RAdam opt_d;
  std::uint64_t seed = 0;
  std::string rng_state;
  std::size_t epoch = 0;  // completed epochs
  std::size_t d_updates = 0;
  std::size_t g_updates = 0;

  std::size_t n() const { return g.cfg.n; }
};

struct LossRow {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double g_lsgan = 0.0;
  double g_alpha = 0.0;
  double g_beta = 0.0;
  double g_omega = 0.0;
};

inline constexpr const char* kLossLogHeader = "epoch,step,d_loss,g_loss,g_lsgan,g_alpha,g_beta,g_omega";
std::string format_loss_row(const LossRow& row);

struct TrainOptions {
  std::function<void(const LossRow&)> on_step;
  std::filesystem::path checkpoint_path;  // empty: no periodic checkpoints
};

ModelCheckpoint init_model(std::size_t n, const GanHyper& hyper, std::uint64_t seed);

// Runs epochs ck.epoch+1 .. target_epochs on `train_set`. Every pair gets
// d_steps discriminator updates then g_steps generator updates, each with
// fresh noise.
void train_epochs(ModelCheckpoint& ck, const std::vector<PairedSample>& train_set,
                  std::size_t target_epochs, const TrainOptions& opts = {});

ModelCheckpoint train(const std::vector<PairedSample>& train_set, const GanHyper& hyper,
                      std::uint64_t seed, const TrainOptions& opts = {});

enum class ZMode { Sample, Zeros };

WeightedDigraph infer(ModelCheckpoint& ck, const MultivariateSeries& ts, ZMode mode, Rng* rng = nullptr);

inline constexpr int kCheckpointVersion = 1;
void save_checkpoint(const ModelCheckpoint& ck, const std::filesystem::path& path);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tsgg
