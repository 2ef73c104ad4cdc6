#include "tsgg/training.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include <json.hpp>

#include "tsgg/fcm.hpp"

namespace tsgg {

using nlohmann::json;

void GanHyper::validate() const {
  if (alpha < 0.0 || beta < 0.0 || omega < 0.0) throw ValidationError("loss weights must be non-negative");
  if (!(lr_g > 0.0) || !(lr_d > 0.0)) throw ValidationError("learning rates must be positive");
  if (d_steps < 1 || g_steps < 1) throw ValidationError("schedule needs at least one D and one G step");
  if (batch != 1) throw ValidationError("only batch size 1 is supported");
  if (!(radam_beta1 >= 0.0 && radam_beta1 < 1.0) || !(radam_beta2 > 0.0 && radam_beta2 < 1.0)) {
    throw ValidationError("RAdam betas must lie in [0,1)");
  }
}

// --- RAdam ------------------------------------------------------------------

double radam_rho(std::int64_t t, double beta2) {
  const double rho_inf = 2.0 / (1.0 - beta2) - 1.0;
  const double b2t = std::pow(beta2, static_cast<double>(t));
  return rho_inf - 2.0 * static_cast<double>(t) * b2t / (1.0 - b2t);
}

bool radam_step(ad::Parameter& p, RAdamState& s, double lr, const RAdamConfig& cfg) {
  if (!p.grad.same_shape(p.value)) throw ShapeError("radam: grad shape differs for " + p.name);
  if (s.m.empty()) {
    s.m = Matrix(p.value.rows(), p.value.cols());
    s.v = Matrix(p.value.rows(), p.value.cols());
  }
  s.t += 1;
  const double t = static_cast<double>(s.t);
  const double rho_inf = 2.0 / (1.0 - cfg.beta2) - 1.0;
  const double rho_t = radam_rho(s.t, cfg.beta2);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  const bool rectified = rho_t > 4.0;
  double r = 0.0;
  if (rectified) {
    r = std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) / ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
  }
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    const double g = p.grad[i];
    s.m[i] = cfg.beta1 * s.m[i] + (1.0 - cfg.beta1) * g;
    s.v[i] = cfg.beta2 * s.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = s.m[i] / bc1;
    if (rectified) {
      const double v_hat = std::sqrt(s.v[i] / bc2);
      p.value[i] -= lr * r * m_hat / (v_hat + cfg.eps);
    } else {
      p.value[i] -= lr * m_hat;
    }
  }
  return rectified;
}

RAdam::RAdam(const nn::ParamList& params, RAdamConfig cfg) : cfg_(cfg), states_(params.size()) {}

void RAdam::step(const nn::ParamList& params, double lr) {
  if (params.size() != states_.size()) throw ContractError("radam: parameter list changed size");
  for (std::size_t i = 0; i < params.size(); ++i) radam_step(*params[i], states_[i], lr, cfg_);
}

// --- losses -----------------------------------------------------------------

FreezeGuard::FreezeGuard(nn::ParamList params) : params_(std::move(params)) {
  for (auto* p : params_) {
    previous_.push_back(p->frozen);
    p->frozen = true;
  }
}

FreezeGuard::~FreezeGuard() {
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i]->frozen = previous_[i];
}

namespace {

ad::Var half_square(ad::Var x, double target) {
  ad::Var d = ad::affine(x, 1.0, -target);
  return ad::scale(ad::hadamard(d, d), 0.5);
}

void check_pair(const PairedSample& s) {
  if (s.series.n() != s.graph.n()) {
    throw ShapeError("series has " + std::to_string(s.series.n()) + " nodes, graph has " +
                     std::to_string(s.graph.n()));
  }
}

}  // namespace

DLossTerms d_loss(ad::Tape& tape, DiscriminatorParams& d, const PairedSample& real,
                  const WeightedDigraph& fake) {
  check_pair(real);
  if (fake.n() != real.graph.n()) {
    throw ShapeError("fake graph has " + std::to_string(fake.n()) + " nodes, real has " +
                     std::to_string(real.graph.n()));
  }
  ad::Var X = nn::series_input(tape, real.series);
  ad::Var h_ts = nn::encode_series(tape, X, d.encoder);
  Discrimination r = discriminate_with_latent(tape, tape.constant(real.graph.adj), h_ts, X, d);
  Discrimination f = discriminate_with_latent(tape, tape.constant(fake.adj), h_ts, X, d);
  DLossTerms out;
  out.real_score = r.score;
  out.fake_score = f.score;
  out.total = ad::add(half_square(r.score, 1.0), half_square(f.score, 0.0));
  return out;
}

GLossTerms g_loss_from_graph(ad::Tape& tape, ad::Var a_fake, DiscriminatorParams& d, const PairedSample& real,
                             const GanHyper& hyper) {
  check_pair(real);
  const MultivariateSeries& ts = real.series;
  if (a_fake.rows() != ts.n() || a_fake.cols() != ts.n()) {
    throw ShapeError("fake graph is " + a_fake.value().shape_str() + ", series has " + std::to_string(ts.n()) +
                     " nodes");
  }
  ad::Var X = nn::series_input(tape, ts);
  std::vector<double> init(ts.n());
  for (std::size_t i = 0; i < ts.n(); ++i) init[i] = ts.values(i, 0);
  ad::Var ts_fake = fcm_simulate_time_major(a_fake, init, ts.t_len());

  ad::Var h_ts_real = nn::encode_series(tape, X, d.encoder);
  Discrimination fake = discriminate_with_latent(tape, a_fake, h_ts_real, X, d);
  Discrimination ref = discriminate_with_latent(tape, tape.constant(real.graph.adj), h_ts_real, X, d);
  ad::Var h_ts_fake = nn::encode_series(tape, ts_fake, d.encoder);

  GLossTerms out;
  out.fake_graph = a_fake;
  out.lsgan = half_square(fake.score, 0.0);
  out.alpha = ad::scale(ad::l2_norm(ad::sub(ref.h_g, fake.h_g)), hyper.alpha);
  out.beta = ad::scale(ad::l2_norm(ad::sub(h_ts_real, h_ts_fake)), hyper.beta);
  out.omega = ad::scale(ad::l2_norm(ad::sub(X, ts_fake)), hyper.omega);
  out.total = ad::add(ad::add(out.lsgan, out.alpha), ad::add(out.beta, out.omega));
  return out;
}

GLossTerms g_loss(ad::Tape& tape, GeneratorParams& g, DiscriminatorParams& d, const PairedSample& real,
                  const Matrix& z, const GanHyper& hyper) {
  check_pair(real);
  FreezeGuard frozen(d.parameters());
  ad::Var a_fake = generate(tape, nn::series_input(tape, real.series), tape.constant(z), g);
  return g_loss_from_graph(tape, a_fake, d, real, hyper);
}

// --- training ------------------------------------------------------------------

std::string format_loss_row(const LossRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.epoch, r.step, r.d_loss,
                r.g_loss, r.g_lsgan, r.g_alpha, r.g_beta, r.g_omega);
  return buf;
}

ModelCheckpoint init_model(std::size_t n, const GanHyper& hyper, std::uint64_t seed) {
  hyper.validate();
  Rng rng(seed);
  ModelCheckpoint ck;
  GeneratorConfig gc;
  gc.n = n;
  DiscriminatorConfig dc;
  dc.n = n;
  ck.g = GeneratorParams::init(gc, rng);
  ck.d = DiscriminatorParams::init(dc, rng);
  ck.hyper = hyper;
  const RAdamConfig rc{hyper.radam_beta1, hyper.radam_beta2, hyper.radam_eps};
  ck.opt_g = RAdam(ck.g.parameters(), rc);
  ck.opt_d = RAdam(ck.d.parameters(), rc);
  ck.seed = seed;
  ck.rng_state = rng.serialize();
  return ck;
}

namespace {

std::vector<Matrix> snapshot(const nn::ParamList& ps) {
  std::vector<Matrix> out;
  out.reserve(ps.size());
  for (auto* p : ps) out.push_back(p->value);
  return out;
}

void assert_unchanged(const nn::ParamList& ps, const std::vector<Matrix>& before, const char* what) {
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!(ps[i]->value == before[i])) throw ContractError(std::string(what) + " changed " + ps[i]->name);
  }
}

}  // namespace

void train_epochs(ModelCheckpoint& ck, const std::vector<PairedSample>& train_set, std::size_t target_epochs,
                  const TrainOptions& opts) {
  if (train_set.empty()) throw ValidationError("training set is empty");
  for (const auto& s : train_set) {
    check_pair(s);
    if (s.graph.n() != ck.n()) {
      throw ValidationError("model is built for n = " + std::to_string(ck.n()) + ", training pair has n = " +
                            std::to_string(s.graph.n()));
    }
  }
  ck.hyper.validate();
  Rng rng;
  rng.restore(ck.rng_state);
  const GanHyper& h = ck.hyper;
  nn::ParamList g_params = ck.g.parameters();
  nn::ParamList d_params = ck.d.parameters();

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t epoch = ck.epoch + 1; epoch <= target_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

    for (std::size_t step = 0; step < order.size(); ++step) {
      const PairedSample& pair = train_set[order[step]];
      LossRow row;
      row.epoch = epoch;
      row.step = step;

      const std::vector<Matrix> g_before = snapshot(g_params);
      for (std::size_t k = 0; k < h.d_steps; ++k) {
        const WeightedDigraph fake = generate(pair.series, sample_noise(rng, ck.g.cfg.noise_dim), ck.g);
        ad::Tape tape;
        DLossTerms dl = d_loss(tape, ck.d, pair, fake);
        tape.backward(dl.total);
        ck.opt_d.step(d_params, h.lr_d);
        ++ck.d_updates;
        row.d_loss += dl.total.scalar() / static_cast<double>(h.d_steps);
      }
      assert_unchanged(g_params, g_before, "discriminator step");

      const std::vector<Matrix> d_before = snapshot(d_params);
      for (std::size_t k = 0; k < h.g_steps; ++k) {
        const Matrix z = sample_noise(rng, ck.g.cfg.noise_dim);
        ad::Tape tape;
        GLossTerms gl = g_loss(tape, ck.g, ck.d, pair, z, h);
        tape.backward(gl.total);
        ck.opt_g.step(g_params, h.lr_g);
        ++ck.g_updates;
        const double w = 1.0 / static_cast<double>(h.g_steps);
        row.g_loss += w * gl.total.scalar();
        row.g_lsgan += w * gl.lsgan.scalar();
        row.g_alpha += w * gl.alpha.scalar();
        row.g_beta += w * gl.beta.scalar();
        row.g_omega += w * gl.omega.scalar();
      }
      assert_unchanged(d_params, d_before, "generator step");
      if (opts.on_step) opts.on_step(row);
    }

    ck.epoch = epoch;
    ck.rng_state = rng.serialize();
    if (!opts.checkpoint_path.empty() && h.checkpoint_every > 0 && epoch % h.checkpoint_every == 0) {
      save_checkpoint(ck, opts.checkpoint_path);
    }
  }
}

ModelCheckpoint train(const std::vector<PairedSample>& train_set, const GanHyper& hyper, std::uint64_t seed,
                      const TrainOptions& opts) {
  if (train_set.empty()) throw ValidationError("training set is empty");
  ModelCheckpoint ck = init_model(train_set.front().graph.n(), hyper, seed);
  train_epochs(ck, train_set, hyper.epochs, opts);
  if (!opts.checkpoint_path.empty()) save_checkpoint(ck, opts.checkpoint_path);
  return ck;
}

WeightedDigraph infer(ModelCheckpoint& ck, const MultivariateSeries& ts, ZMode mode, Rng* rng) {
  if (ts.n() != ck.n()) {
    throw ShapeError("checkpoint is built for n = " + std::to_string(ck.n()) + ", series has n = " +
                     std::to_string(ts.n()));
  }
  Matrix z(1, ck.g.cfg.noise_dim);
  if (mode == ZMode::Sample) {
    if (!rng) throw ContractError("infer: sampling mode needs an Rng");
    z = sample_noise(*rng, ck.g.cfg.noise_dim);
  }
  return generate(ts, z, ck.g);
}

// --- checkpoint files ------------------------------------------------------------

namespace {

json matrix_json(const Matrix& m) {
  return json{{"shape", {m.rows(), m.cols()}},
              {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

Matrix matrix_from(const json& j, const std::string& name) {
  const auto shape = j.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 2) throw ParseError("checkpoint: bad shape for " + name);
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != shape[0] * shape[1]) throw ParseError("checkpoint: data length mismatch for " + name);
  return Matrix(shape[0], shape[1], std::move(data));
}

json hyper_json(const GanHyper& h) {
  return json{{"alpha", h.alpha},
              {"beta", h.beta},
              {"omega", h.omega},
              {"lr_g", h.lr_g},
              {"lr_d", h.lr_d},
              {"epochs", h.epochs},
              {"d_steps", h.d_steps},
              {"g_steps", h.g_steps},
              {"batch", h.batch},
              {"checkpoint_every", h.checkpoint_every},
              {"radam_beta1", h.radam_beta1},
              {"radam_beta2", h.radam_beta2},
              {"radam_eps", h.radam_eps}};
}

GanHyper hyper_from(const json& j) {
  GanHyper h;
  h.alpha = j.at("alpha");
  h.beta = j.at("beta");
  h.omega = j.at("omega");
  h.lr_g = j.at("lr_g");
  h.lr_d = j.at("lr_d");
  h.epochs = j.at("epochs");
  h.d_steps = j.at("d_steps");
  h.g_steps = j.at("g_steps");
  h.batch = j.at("batch");
  h.checkpoint_every = j.at("checkpoint_every");
  h.radam_beta1 = j.at("radam_beta1");
  h.radam_beta2 = j.at("radam_beta2");
  h.radam_eps = j.at("radam_eps");
  return h;
}

json arch_json(const ModelCheckpoint& ck) {
  const auto& g = ck.g.cfg;
  const auto& d = ck.d.cfg;
  return json{{"n", g.n},
              {"generator",
               {{"hidden", g.hidden},
                {"sru_layers", g.sru_layers},
                {"noise_dim", g.noise_dim},
                {"mlp", {g.mlp1, g.mlp2}},
                {"leaky_slope", g.leaky_slope},
                {"zero_diagonal", g.zero_diagonal}}},
              {"discriminator",
               {{"hidden", d.hidden},
                {"sru_layers", d.sru_layers},
                {"gcn_dim", d.gcn_dim},
                {"readout", {d.readout1, d.readout2}},
                {"graph_dim", d.graph_dim},
                {"ntn_k", d.ntn_k},
                {"threshold", d.threshold},
                {"leaky_slope", d.leaky_slope},
                {"node_series_len", d.node_series_len}}}};
}

json optim_json(const RAdam& opt, const nn::ParamList& params) {
  json out = json::object();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const RAdamState& s = opt.states()[i];
    json e{{"t", s.t}};
    if (!s.m.empty()) {
      e["m"] = matrix_json(s.m);
      e["v"] = matrix_json(s.v);
    }
    out[params[i]->name] = std::move(e);
  }
  return out;
}

void optim_from(const json& j, RAdam& opt, const nn::ParamList& params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    const json& e = j.at(params[i]->name);
    RAdamState& s = opt.states()[i];
    s.t = e.at("t");
    if (e.contains("m")) {
      s.m = matrix_from(e.at("m"), params[i]->name);
      s.v = matrix_from(e.at("v"), params[i]->name);
      if (!s.m.same_shape(params[i]->value) || !s.v.same_shape(params[i]->value)) {
        throw ParseError("checkpoint: optimizer state shape mismatch for " + params[i]->name);
      }
    }
  }
}

}  // namespace

void save_checkpoint(const ModelCheckpoint& ck, const std::filesystem::path& path) {
  auto& mut = const_cast<ModelCheckpoint&>(ck);  // parameter lists need non-const pointers; nothing is modified
  const nn::ParamList gp = mut.g.parameters();
  const nn::ParamList dp = mut.d.parameters();
  json params = json::object();
  for (auto* p : gp) params[p->name] = matrix_json(p->value);
  for (auto* p : dp) params[p->name] = matrix_json(p->value);
  json doc{{"version", kCheckpointVersion},
           {"arch", arch_json(ck)},
           {"hyper", hyper_json(ck.hyper)},
           {"seed", ck.seed},
           {"epoch", ck.epoch},
           {"updates", {{"d", ck.d_updates}, {"g", ck.g_updates}}},
           {"rng", ck.rng_state},
           {"params", std::move(params)},
           {"optim", {{"g", optim_json(ck.opt_g, gp)}, {"d", optim_json(ck.opt_d, dp)}}}};
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
    os << doc.dump() << '\n';
    if (!os) throw std::runtime_error("write failed for checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("checkpoint " + path.string() + " is corrupt: " + e.what());
  }
  try {
    const int version = doc.at("version");
    if (version != kCheckpointVersion) {
      throw ParseError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                       std::to_string(kCheckpointVersion) + ")");
    }
    const json& arch = doc.at("arch");
    const json& ga = arch.at("generator");
    const json& da = arch.at("discriminator");
    GeneratorConfig gc;
    gc.n = arch.at("n");
    gc.hidden = ga.at("hidden");
    gc.sru_layers = ga.at("sru_layers");
    gc.noise_dim = ga.at("noise_dim");
    gc.mlp1 = ga.at("mlp").at(0);
    gc.mlp2 = ga.at("mlp").at(1);
    gc.leaky_slope = ga.at("leaky_slope");
    gc.zero_diagonal = ga.at("zero_diagonal");
    DiscriminatorConfig dc;
    dc.n = gc.n;
    dc.hidden = da.at("hidden");
    dc.sru_layers = da.at("sru_layers");
    dc.gcn_dim = da.at("gcn_dim");
    dc.readout1 = da.at("readout").at(0);
    dc.readout2 = da.at("readout").at(1);
    dc.graph_dim = da.at("graph_dim");
    dc.ntn_k = da.at("ntn_k");
    dc.threshold = da.at("threshold");
    dc.leaky_slope = da.at("leaky_slope");
    dc.node_series_len = da.at("node_series_len");

    ModelCheckpoint ck;
    Rng scratch(0);
    ck.g = GeneratorParams::init(gc, scratch);
    ck.d = DiscriminatorParams::init(dc, scratch);
    ck.hyper = hyper_from(doc.at("hyper"));
    ck.seed = doc.at("seed");
    ck.epoch = doc.at("epoch");
    ck.d_updates = doc.at("updates").at("d");
    ck.g_updates = doc.at("updates").at("g");
    ck.rng_state = doc.at("rng");

    const json& params = doc.at("params");
    const nn::ParamList gp = ck.g.parameters();
    const nn::ParamList dp = ck.d.parameters();
    for (const nn::ParamList* list : {&gp, &dp}) {
      for (auto* p : *list) {
        if (!params.contains(p->name)) throw ParseError("checkpoint: missing parameter " + p->name);
        Matrix m = matrix_from(params.at(p->name), p->name);
        if (!m.same_shape(p->value)) {
          throw ParseError("checkpoint: parameter " + p->name + " has shape " + m.shape_str() +
                           ", architecture expects " + p->value.shape_str());
        }
        p->value = std::move(m);
        p->zero_grad();
      }
    }
    const RAdamConfig rc{ck.hyper.radam_beta1, ck.hyper.radam_beta2, ck.hyper.radam_eps};
    ck.opt_g = RAdam(gp, rc);
    ck.opt_d = RAdam(dp, rc);
    optim_from(doc.at("optim").at("g"), ck.opt_g, gp);
    optim_from(doc.at("optim").at("d"), ck.opt_d, dp);
    return ck;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint " + path.string() + " has an invalid layout: " + e.what());
  }
}

}  // namespace tsgg
