#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tsgg/datagen.hpp"
#include "tsgg/training.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "tsgg_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string in_dir(const std::string& name) { return (workdir() / name).string(); }

struct Result {
  int code = -1;
  std::string err;
};

Result run_cli(const std::string& args) {
  const std::string err_file = in_dir("stderr.txt");
  const std::string cmd = std::string(TSGG_CLI) + " " + args + " > " + in_dir("stdout.txt") + " 2> " + err_file;
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  r.err.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::size_t count_lines(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

const std::string& small_data() {
  static const std::string path = [] {
    const std::string p = in_dir("small.json");
    REQUIRE(run_cli("gen-data --nodes 6 --pairs 6 --t-len 10 --seed 3 --out " + p).code == 0);
    return p;
  }();
  return path;
}

const std::string kGoldenTs = std::string(TSGG_TEST_DATA) + "/dream3_golden_expression.tsv";
const std::string kGoldenGold = std::string(TSGG_TEST_DATA) + "/dream3_golden_gold.tsv";

}  // namespace

TEST_CASE("gen-data is deterministic and records its config") {
  const std::string a = in_dir("a.json"), b = in_dir("b.json");
  REQUIRE(run_cli("gen-data --nodes 10 --pairs 12 --t-len 20 --seed 7 --out " + a).code == 0);
  REQUIRE(run_cli("--seed 7 gen-data --nodes 10 --pairs 12 --t-len 20 --out " + b).code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(tsgg::load_dataset(a).size() == 12);
  const json cfg = json::parse(slurp(a + ".run.json"));
  CHECK(cfg["seed"] == 7);
  CHECK(cfg["n"] == 10);
  CHECK(cfg["pairs"] == 12);
  CHECK(cfg["command"] == "gen-data");
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli("gen-data --nodes 1 --out " + in_dir("x.json")).code == 2);
  CHECK(run_cli("gen-data --nodes 10").code == 2);
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("infer --ckpt a --ts b --format xml --out c").code == 2);

  const std::string missing = in_dir("no_such_data.json");
  const Result r = run_cli("train --data " + missing + " --out " + in_dir("ck.json"));
  CHECK(r.code == 2);
  CHECK(r.err.find(missing) != std::string::npos);

  std::ofstream(in_dir("broken.json")) << "{\"version\":1,\"n\":";
  CHECK(run_cli("train --data " + in_dir("broken.json") + " --out " + in_dir("ck.json")).code == 2);
  CHECK(run_cli("train --data " + small_data() + " --split 99 --out " + in_dir("ck.json")).code == 2);
  CHECK(run_cli("eval --pred " + small_data() + " --truth " + small_data() + " --metrics him,nope --out " +
             in_dir("r.json"))
            .code == 2);
}

TEST_CASE("runtime failures exit 1") {
  fs::create_directories(in_dir("a_directory"));
  CHECK(run_cli("gen-data --nodes 5 --pairs 2 --out " + in_dir("a_directory")).code == 1);
}

TEST_CASE("config files supply defaults that flags override") {
  const std::string cfg = in_dir("cfg.json");
  std::ofstream(cfg) << R"({"n": 5, "pairs": 3, "t_len": 7, "seed": 11})";
  const std::string a = in_dir("cfg_a.json"), b = in_dir("cfg_b.json");
  REQUIRE(run_cli("gen-data --config " + cfg + " --out " + a).code == 0);
  const auto da = tsgg::load_dataset(a);
  CHECK(da.size() == 3);
  CHECK(da[0].graph.n() == 5);
  CHECK(da[0].series.t_len() == 7);
  REQUIRE(run_cli("gen-data --config " + cfg + " --pairs 4 --out " + b).code == 0);
  CHECK(tsgg::load_dataset(b).size() == 4);
  CHECK(json::parse(slurp(b + ".run.json"))["seed"] == 11);

  std::ofstream(in_dir("bad_cfg.json")) << "{\"n\": \"ten\"}";
  CHECK(run_cli("gen-data --config " + in_dir("bad_cfg.json") + " --out " + in_dir("x.json")).code == 2);
  CHECK(run_cli("gen-data --config " + in_dir("missing_cfg.json") + " --out " + in_dir("x.json")).code == 2);
}

TEST_CASE("train smoke run writes a three-epoch log") {
  const std::string ck = in_dir("smoke.json");
  REQUIRE(run_cli("train --data " + small_data() + " --split 4 --epochs 3 --seed 7 --out " + ck).code == 0);
  CHECK(count_lines(ck + ".loss.csv") == 1 + 3 * 4);
  std::ifstream in(ck + ".loss.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == tsgg::kLossLogHeader);
  CHECK(fs::exists(ck + ".run.json"));
  CHECK(json::parse(slurp(ck + ".run.json"))["hyper"]["epochs"] == 3);
}

TEST_CASE("resume continues the loss log") {
  const std::string full = in_dir("full.json"), part = in_dir("part.json");
  REQUIRE(run_cli("train --data " + small_data() + " --epochs 4 --seed 5 --out " + full).code == 0);
  REQUIRE(run_cli("train --data " + small_data() + " --epochs 2 --seed 5 --out " + part).code == 0);
  REQUIRE(run_cli("train --data " + small_data() + " --epochs 4 --resume " + part + " --out " + part).code == 0);
  CHECK(slurp(part + ".loss.csv") == slurp(full + ".loss.csv"));
  CHECK(slurp(part) == slurp(full));

  const std::string other = in_dir("other_n.json");
  REQUIRE(run_cli("gen-data --nodes 7 --pairs 2 --t-len 10 --out " + other).code == 0);
  const Result r = run_cli("train --data " + other + " --epochs 5 --resume " + part + " --out " + in_dir("z.json"));
  CHECK(r.code == 2);
  CHECK(r.err.find("n = 6") != std::string::npos);
  CHECK(r.err.find("n = 7") != std::string::npos);
}

TEST_CASE("infer, baseline and eval") {
  const std::string ck = in_dir("ie_ck.json");
  REQUIRE(run_cli("train --data " + small_data() + " --split 4 --epochs 1 --out " + ck).code == 0);

  const std::string pred = in_dir("pred.json");
  REQUIRE(run_cli("infer --ckpt " + ck + " --ts " + small_data() + " --split 4 --out " + pred).code == 0);
  const auto graphs = tsgg::load_graphs(pred);
  CHECK(graphs.size() == 2);
  const std::string again = in_dir("pred2.json");
  REQUIRE(run_cli("infer --ckpt " + ck + " --ts " + small_data() + " --split 4 --out " + again).code == 0);
  CHECK(slurp(pred) == slurp(again));

  REQUIRE(run_cli("infer --ckpt " + ck + " --ts " + small_data() + " --split 5 --format csv --out " +
               in_dir("pred.csv"))
              .code == 0);
  CHECK(count_lines(in_dir("pred.csv")) == 6);

  const std::string report = in_dir("report.json");
  REQUIRE(run_cli("eval --pred " + pred + " --truth " + small_data() + " --split 4 --metrics him,qjsd --out " + report)
              .code == 0);
  const json rep = json::parse(slurp(report));
  CHECK(rep["pairs"] == 2);
  CHECK(rep.contains("mean_him"));
  CHECK(rep.contains("mean_qjsd"));
  CHECK_FALSE(rep.contains("mean_hamming"));
  CHECK(rep["mean_him"].get<double>() >= 0.0);
  CHECK(rep["mean_him"].get<double>() <= 1.0);

  const std::string base = in_dir("pci.json");
  REQUIRE(run_cli("baseline --ts " + small_data() + " --split 4 --out " + base).code == 0);
  const auto pci = tsgg::load_graphs(base);
  CHECK(pci.size() == 2);
  CHECK(pci[0](1, 2) == pci[0](2, 1));

  CHECK(run_cli("eval --pred " + pred + " --truth " + in_dir("ie_ck.json.loss.csv") + " --out " + report).code == 2);
}

TEST_CASE("DREAM3 inference and gold evaluation") {
  REQUIRE(run_cli("gen-data --nodes 10 --pairs 2 --t-len 20 --out " + in_dir("ba10.json")).code == 0);
  const std::string ck = in_dir("ba10_ck.json");
  REQUIRE(run_cli("train --data " + in_dir("ba10.json") + " --epochs 1 --out " + ck).code == 0);

  const std::string ranked = in_dir("yeast.tsv");
  REQUIRE(run_cli("infer --ckpt " + ck + " --ts " + kGoldenTs + " --format dream3 --out " + ranked).code == 0);
  CHECK(count_lines(ranked) == 90);
  std::ifstream in(ranked);
  std::string src, dst;
  double prev = 2.0, score = 0.0;
  while (in >> src >> dst >> score) {
    CHECK(std::abs(score) <= prev);
    prev = std::abs(score);
  }

  const std::string pred = in_dir("yeast.json");
  REQUIRE(run_cli("infer --ckpt " + ck + " --ts " + kGoldenTs + " --out " + pred).code == 0);
  CHECK(tsgg::load_graphs(pred).size() == 2);
  const std::string report = in_dir("gold.json");
  REQUIRE(run_cli("eval --pred " + pred + " --truth " + kGoldenGold + " --out " + report).code == 0);
  const json rep = json::parse(slurp(report));
  CHECK(rep["pairs"] == 2);
  CHECK(rep["abs_predictions"] == true);

  CHECK(run_cli("infer --ckpt " + in_dir("ie_ck.json") + " --ts " + kGoldenTs + " --out " + pred).code == 2);
}

TEST_CASE("simulate writes one column per step") {
  const std::string out = in_dir("sim.csv");
  REQUIRE(run_cli("simulate --graph " + small_data() + " --steps 20 --init uniform --seed 3 --out " + out).code == 0);
  const auto ts = tsgg::read_series_csv(out);
  CHECK(ts.n() == 6);
  CHECK(ts.t_len() == 20);
  for (double v : ts.values.data()) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  const std::string again = in_dir("sim2.csv");
  REQUIRE(run_cli("simulate --graph " + small_data() + " --steps 20 --init uniform --seed 3 --out " + again).code == 0);
  CHECK(slurp(out) == slurp(again));
  CHECK(run_cli("simulate --graph " + small_data() + " --index 99 --out " + out).code == 2);
}
