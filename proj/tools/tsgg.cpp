#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "tsgg/datagen.hpp"
#include "tsgg/fcm.hpp"
#include "tsgg/metrics.hpp"
#include "tsgg/parallel.hpp"
#include "tsgg/pci.hpp"
#include "tsgg/training.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace tsgg {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GanHyper, alpha, beta, omega, lr_g, lr_d, epochs, d_steps, g_steps,
                                                batch, checkpoint_every, radam_beta1, radam_beta2, radam_eps)

}  // namespace tsgg

namespace {

using namespace tsgg;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;

  std::size_t n = 10;
  std::size_t pairs = 800;
  std::size_t t_len = 20;
  double p_edge = 0.4;
  std::size_t m0 = 2;
  std::size_t m = 1;
  std::size_t split = 0;

  GanHyper hyper;
  std::string resume;

  std::string format = "json";
  std::string z_mode = "zeros";
  std::size_t keep = 11;
  std::size_t steps = 20;
  std::string init = "uniform";
  std::size_t graph_index = 0;
  double ridge = 1e-3;

  std::vector<std::string> metrics{"him", "qjsd"};
  double xi = 1.0;
  bool abs_pred = false;

  std::string data, ckpt, ts, graph, pred, truth, out, log;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, command, seed, n, pairs, t_len, p_edge, m0, m, split, hyper,
                                                resume, format, z_mode, keep, steps, init, graph_index, ridge,
                                                metrics, xi, abs_pred, data, ckpt, ts, graph, pred, truth, out, log)

std::string config_path_from_argv(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return argv[i] + 9;
  }
  return {};
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config file not found: " + path);
  try {
    return json::parse(in).get<RunConfig>();
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + " is invalid: " + e.what());
  }
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void require_file(const std::string& path, const char* flag) {
  require(path, flag);
  if (!fs::is_regular_file(path)) throw UsageError(std::string(flag) + ": file not found: " + path);
}

void write_run_config(const RunConfig& cfg, const fs::path& out) {
  fs::path p = out;
  p += ".run.json";
  std::ofstream os(p);
  os << json(cfg).dump(2) << '\n';
  if (!os) throw std::runtime_error("cannot write " + p.string());
}

std::ofstream open_out(const fs::path& p, std::ios::openmode mode = std::ios::out) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, mode | std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

bool has_ext(const fs::path& p, const char* ext) {
  std::string e = p.extension().string();
  for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e == ext;
}

// Series inputs: a dataset (pairs from `split` on), one CSV series, or a
// DREAM3 expression table (one series per replicate).
std::vector<MultivariateSeries> load_series_inputs(const RunConfig& cfg) {
  const fs::path p = cfg.ts;
  std::vector<MultivariateSeries> out;
  if (has_ext(p, ".json")) {
    auto data = load_dataset(p);
    if (cfg.split >= data.size()) {
      throw UsageError("--split " + std::to_string(cfg.split) + " leaves no pairs in " + p.string());
    }
    for (std::size_t i = cfg.split; i < data.size(); ++i) out.push_back(std::move(data[i].series));
  } else if (has_ext(p, ".csv")) {
    out.push_back(read_series_csv(p));
  } else {
    out = parse_dream3_expression(p, cfg.keep);
  }
  return out;
}

void write_graphs(const std::vector<WeightedDigraph>& graphs, const RunConfig& cfg) {
  if (cfg.format == "json") {
    save_graphs(graphs, cfg.out);
    return;
  }
  std::ofstream os = open_out(cfg.out);
  if (cfg.format == "csv") {
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      if (k) os << '\n';
      write_matrix_csv(graphs[k].adj, os);
    }
  } else {
    // One ranked list per network: replicate predictions are averaged.
    WeightedDigraph mean(graphs.front().n());
    for (const auto& g : graphs)
      for (std::size_t k = 0; k < g.adj.size(); ++k) mean.adj[k] += g.adj[k] / static_cast<double>(graphs.size());
    write_dream3_predictions(mean, os);
  }
  if (!os) throw std::runtime_error("write failed for " + cfg.out);
}

// --- commands ---------------------------------------------------------------------

int cmd_gen_data(RunConfig& cfg) {
  require(cfg.out, "--out");
  DatasetSpec spec;
  spec.n = cfg.n;
  spec.pairs = cfg.pairs;
  spec.t_len = cfg.t_len;
  spec.seed = cfg.seed;
  spec.ba.p_edge = cfg.p_edge;
  spec.ba.initial_nodes = cfg.m0;
  spec.ba.edges_per_node = cfg.m;
  const auto data = make_dataset(spec);
  if (fs::path(cfg.out).has_parent_path()) fs::create_directories(fs::path(cfg.out).parent_path());
  save_dataset(data, cfg.out);
  write_run_config(cfg, cfg.out);
  std::printf("wrote %zu pairs (n = %zu, T = %zu, seed %llu) to %s\n", data.size(), cfg.n, cfg.t_len,
              static_cast<unsigned long long>(cfg.seed), cfg.out.c_str());
  return 0;
}

int cmd_train(RunConfig& cfg) {
  require_file(cfg.data, "--data");
  require(cfg.out, "--out");
  if (!cfg.resume.empty()) require_file(cfg.resume, "--resume");
  if (cfg.log.empty()) cfg.log = cfg.out + ".loss.csv";

  auto data = load_dataset(cfg.data);
  if (cfg.split > data.size()) {
    throw UsageError("--split " + std::to_string(cfg.split) + " exceeds the " + std::to_string(data.size()) +
                     " pairs in " + cfg.data);
  }
  if (cfg.split > 0) data.resize(cfg.split);

  ModelCheckpoint ck;
  if (!cfg.resume.empty()) {
    ck = load_checkpoint(cfg.resume);
    const std::size_t target = cfg.hyper.epochs;
    ck.hyper.epochs = target;
    cfg.hyper = ck.hyper;
    cfg.seed = ck.seed;
  } else {
    ck = init_model(data.front().graph.n(), cfg.hyper, cfg.seed);
  }
  if (ck.n() != data.front().graph.n()) {
    throw ValidationError("checkpoint is built for n = " + std::to_string(ck.n()) + ", dataset " + cfg.data +
                          " has n = " + std::to_string(data.front().graph.n()));
  }

  const bool append = !cfg.resume.empty() && fs::exists(cfg.log);
  std::ofstream log = open_out(cfg.log, append ? std::ios::app : std::ios::trunc);
  if (!append) log << kLossLogHeader << '\n';
  TrainOptions opts;
  opts.checkpoint_path = cfg.out;
  opts.on_step = [&](const LossRow& r) { log << format_loss_row(r) << '\n'; };
  const std::size_t start = ck.epoch;
  train_epochs(ck, data, cfg.hyper.epochs, opts);
  log.flush();
  if (!log) throw std::runtime_error("write failed for " + cfg.log);
  save_checkpoint(ck, cfg.out);
  write_run_config(cfg, cfg.out);
  std::printf("trained epochs %zu..%zu on %zu pairs (n = %zu); checkpoint %s, log %s\n", start + 1, ck.epoch,
              data.size(), ck.n(), cfg.out.c_str(), cfg.log.c_str());
  return 0;
}

int cmd_infer(RunConfig& cfg) {
  require_file(cfg.ckpt, "--ckpt");
  require_file(cfg.ts, "--ts");
  require(cfg.out, "--out");
  ModelCheckpoint ck = load_checkpoint(cfg.ckpt);
  const auto series = load_series_inputs(cfg);
  const ZMode mode = cfg.z_mode == "sample" ? ZMode::Sample : ZMode::Zeros;
  Rng rng(cfg.seed);
  std::vector<WeightedDigraph> graphs;
  for (const auto& ts : series) graphs.push_back(infer(ck, ts, mode, &rng));
  write_graphs(graphs, cfg);
  write_run_config(cfg, cfg.out);
  std::printf("inferred %zu graphs (n = %zu) to %s\n", graphs.size(), ck.n(), cfg.out.c_str());
  return 0;
}

int cmd_baseline(RunConfig& cfg) {
  require_file(cfg.ts, "--ts");
  require(cfg.out, "--out");
  if (!(cfg.ridge > 0.0)) throw UsageError("--ridge must be positive");
  const auto series = load_series_inputs(cfg);
  std::vector<WeightedDigraph> graphs(series.size());
  std::vector<std::vector<std::size_t>> constant(series.size());
  parallel_for(series.size(), [&](std::size_t i) { graphs[i] = pci_infer(series[i], cfg.ridge, &constant[i]); });
  for (std::size_t i = 0; i < constant.size(); ++i) {
    for (std::size_t node : constant[i]) {
      std::fprintf(stderr, "warning: series %zu node %zu is constant; its edges are set to 0\n", i, node);
    }
  }
  write_graphs(graphs, cfg);
  write_run_config(cfg, cfg.out);
  std::printf("PCI-surrogate estimates for %zu series written to %s\n", graphs.size(), cfg.out.c_str());
  return 0;
}

int cmd_simulate(RunConfig& cfg) {
  require_file(cfg.graph, "--graph");
  require(cfg.out, "--out");
  if (cfg.steps < 1) throw UsageError("--steps must be at least 1");
  const auto graphs = load_graphs(cfg.graph);
  if (cfg.graph_index >= graphs.size()) {
    throw UsageError("--index " + std::to_string(cfg.graph_index) + " out of range for " +
                     std::to_string(graphs.size()) + " graphs");
  }
  const WeightedDigraph& g = graphs[cfg.graph_index];
  std::vector<double> init(g.n(), 0.5);
  if (cfg.init == "uniform") {
    Rng rng(cfg.seed);
    for (auto& v : init) v = rng.uniform();
  }
  const MultivariateSeries ts = fcm_simulate(g, init, cfg.steps);
  std::ofstream os = open_out(cfg.out);
  write_matrix_csv(ts.values, os);
  if (!os) throw std::runtime_error("write failed for " + cfg.out);
  write_run_config(cfg, cfg.out);
  std::printf("simulated %zu nodes x %zu steps to %s\n", g.n(), cfg.steps, cfg.out.c_str());
  return 0;
}

int cmd_eval(RunConfig& cfg) {
  require_file(cfg.pred, "--pred");
  require_file(cfg.truth, "--truth");
  require(cfg.out, "--out");
  const std::set<std::string> known{"hamming", "im", "him", "qjsd"};
  if (cfg.metrics.empty()) throw UsageError("--metrics needs at least one metric");
  for (const auto& m : cfg.metrics) {
    if (!known.count(m)) throw UsageError("unknown metric '" + m + "' (expected hamming, im, him or qjsd)");
  }

  const auto preds = load_graphs(cfg.pred);
  const std::size_t n = preds.front().n();
  std::vector<WeightedDigraph> truths;
  bool abs_pred = cfg.abs_pred;
  if (has_ext(cfg.truth, ".json")) {
    truths = load_graphs(cfg.truth);
    if (cfg.split > 0) {
      if (cfg.split >= truths.size()) throw UsageError("--split leaves no truth graphs in " + cfg.truth);
      truths.erase(truths.begin(), truths.begin() + static_cast<std::ptrdiff_t>(cfg.split));
    }
  } else {
    truths.push_back(parse_dream3_gold(cfg.truth, n));
    abs_pred = true;
  }

  const metrics::MetricConfig mc = metrics::MetricConfig::for_nodes(n, cfg.xi);
  metrics::BatchOptions bo;
  bo.abs_predictions = abs_pred;
  const metrics::BatchReport rep = metrics::evaluate_batch(preds, truths, mc, bo);

  auto pick = [](const metrics::PairMetrics& p, const std::string& m) {
    if (m == "hamming") return p.hamming;
    if (m == "im") return p.im;
    if (m == "him") return p.him;
    return p.qjsd;
  };
  const std::map<std::string, double> means{
      {"hamming", rep.mean_hamming}, {"im", rep.mean_im}, {"him", rep.mean_him}, {"qjsd", rep.mean_qjsd}};

  json report;
  report["pairs"] = rep.pairs.size();
  report["n"] = n;
  report["gamma"] = *mc.gamma;
  report["xi"] = mc.xi;
  report["abs_predictions"] = abs_pred;
  report["metrics"] = cfg.metrics;
  json per_pair = json::array();
  for (const auto& p : rep.pairs) {
    json row;
    for (const auto& m : cfg.metrics) row[m] = pick(p, m);
    per_pair.push_back(row);
  }
  for (const auto& m : cfg.metrics) report["mean_" + m] = means.at(m);
  report["per_pair"] = per_pair;
  std::ofstream os = open_out(cfg.out);
  os << report.dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed for " + cfg.out);
  write_run_config(cfg, cfg.out);

  std::printf("%-8s %12s\n", "metric", "mean");
  for (const auto& m : cfg.metrics) std::printf("%-8s %12.6f\n", m.c_str(), means.at(m));
  std::printf("pairs    %12zu\n", rep.pairs.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    const std::string config_file = config_path_from_argv(argc, argv);
    if (!config_file.empty()) cfg = load_run_config(config_file);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::string config_flag;

  CLI::App app{"Time-series-conditioned graph generation (TSGG-GAN)", "tsgg"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--config", config_flag, "RunConfig JSON supplying defaults; flags override it");
  app.add_option("--out", cfg.out, "Output path");

  auto* gen = app.add_subcommand("gen-data", "Generate extended-BA graphs paired with FCM series");
  gen->add_option("--nodes", cfg.n, "Nodes per graph")->check(CLI::Range(2, 100000))->capture_default_str();
  gen->add_option("--pairs", cfg.pairs, "Number of pairs")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--t-len", cfg.t_len, "Series length")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--p-edge", cfg.p_edge, "Probability of an internal edge step")->capture_default_str();
  gen->add_option("--m0", cfg.m0, "Seed nodes")->capture_default_str();
  gen->add_option("--m", cfg.m, "Edges per new node")->capture_default_str();

  auto* train = app.add_subcommand("train", "Train the GAN on a dataset");
  train->add_option("--data", cfg.data, "Dataset JSON");
  train->add_option("--split", cfg.split, "Train on the first SPLIT pairs (0: all)")->capture_default_str();
  train->add_option("--epochs", cfg.hyper.epochs, "Target epoch count")->capture_default_str();
  train->add_option("--log", cfg.log, "Loss log CSV (default: <out>.loss.csv)");
  train->add_option("--resume", cfg.resume, "Checkpoint to resume from");
  train->add_option("--alpha", cfg.hyper.alpha, "Graph feature-matching weight")->capture_default_str();
  train->add_option("--beta", cfg.hyper.beta, "Series feature-matching weight")->capture_default_str();
  train->add_option("--omega", cfg.hyper.omega, "Series reconstruction weight")->capture_default_str();
  train->add_option("--lr-g", cfg.hyper.lr_g, "Generator learning rate")->capture_default_str();
  train->add_option("--lr-d", cfg.hyper.lr_d, "Discriminator learning rate")->capture_default_str();
  train->add_option("--d-steps", cfg.hyper.d_steps, "D updates per pair")->capture_default_str();
  train->add_option("--g-steps", cfg.hyper.g_steps, "G updates per pair")->capture_default_str();
  train->add_option("--checkpoint-every", cfg.hyper.checkpoint_every, "Epochs between checkpoints (0: off)")
      ->capture_default_str();

  auto* inf = app.add_subcommand("infer", "Predict graphs from series");
  inf->add_option("--ckpt", cfg.ckpt, "Checkpoint JSON");
  inf->add_option("--ts", cfg.ts, "Series: DREAM3 TSV, CSV, or dataset JSON");
  inf->add_option("--split", cfg.split, "For dataset input, skip the first SPLIT pairs")->capture_default_str();
  inf->add_option("--keep", cfg.keep, "DREAM3 time points kept from the end")->capture_default_str();
  inf->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "dream3"}))
      ->capture_default_str();
  inf->add_option("--z-mode", cfg.z_mode, "Noise mode")->check(CLI::IsMember({"zeros", "sample"}))->capture_default_str();

  auto* sim = app.add_subcommand("simulate", "Simulate FCM series from a graph");
  sim->add_option("--graph", cfg.graph, "Graph JSON or dataset JSON");
  sim->add_option("--index", cfg.graph_index, "Graph index within the file")->capture_default_str();
  sim->add_option("--steps", cfg.steps, "Series length")->capture_default_str();
  sim->add_option("--init", cfg.init, "Initial state")->check(CLI::IsMember({"uniform", "half"}))->capture_default_str();

  auto* ev = app.add_subcommand("eval", "Compare predicted graphs with ground truth");
  ev->add_option("--pred", cfg.pred, "Predicted graphs JSON");
  ev->add_option("--truth", cfg.truth, "Truth graphs JSON, dataset JSON, or DREAM3 gold TSV");
  ev->add_option("--split", cfg.split, "For dataset truth, skip the first SPLIT pairs")->capture_default_str();
  ev->add_option("--metrics", cfg.metrics, "Comma-separated subset of hamming,im,him,qjsd")->delimiter(',');
  ev->add_option("--xi", cfg.xi, "IM weight in HIM")->capture_default_str();
  ev->add_flag("--abs", cfg.abs_pred, "Compare |pred| (implied for DREAM3 gold)");

  auto* base = app.add_subcommand("baseline", "PCI-surrogate partial-correlation estimates");
  base->add_option("--ts", cfg.ts, "Series: DREAM3 TSV, CSV, or dataset JSON");
  base->add_option("--split", cfg.split, "For dataset input, skip the first SPLIT pairs")->capture_default_str();
  base->add_option("--keep", cfg.keep, "DREAM3 time points kept from the end")->capture_default_str();
  base->add_option("--ridge", cfg.ridge, "Ridge added to the correlation matrix")->capture_default_str();
  base->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "dream3"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      cfg.command = "gen-data";
      return cmd_gen_data(cfg);
    }
    if (train->parsed()) {
      cfg.command = "train";
      return cmd_train(cfg);
    }
    if (inf->parsed()) {
      cfg.command = "infer";
      return cmd_infer(cfg);
    }
    if (sim->parsed()) {
      cfg.command = "simulate";
      return cmd_simulate(cfg);
    }
    if (ev->parsed()) {
      cfg.command = "eval";
      return cmd_eval(cfg);
    }
    cfg.command = "baseline";
    return cmd_baseline(cfg);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {  // ValidationError, ShapeError
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
