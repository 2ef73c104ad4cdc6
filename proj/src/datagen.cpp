#include "tsgg/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tsgg/fcm.hpp"
#include "tsgg/parallel.hpp"

namespace tsgg {

namespace {

using Edge = std::pair<std::size_t, std::size_t>;

Edge ordered(std::size_t a, std::size_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

}  // namespace

WeightedDigraph generate_ba_graph(std::size_t n, Rng& rng, const BaConfig& cfg) {
  if (n < 2) throw ValidationError("BA graph needs n >= 2, got " + std::to_string(n));
  if (!(cfg.p_edge > 0.0 && cfg.p_edge < 1.0)) {
    throw ValidationError("BA edge probability must lie in (0,1)");
  }
  if (cfg.initial_nodes < 2 || cfg.edges_per_node < 1) {
    throw ValidationError("BA needs at least 2 seed nodes and 1 edge per new node");
  }

  std::set<Edge> edges;
  std::vector<Edge> order;             // insertion order keeps the output deterministic
  std::vector<std::size_t> endpoints;  // each node appears once per incident edge
  auto link = [&](std::size_t a, std::size_t b) {
    if (!edges.insert(ordered(a, b)).second) return false;
    order.push_back({a, b});
    endpoints.push_back(a);
    endpoints.push_back(b);
    return true;
  };

  const std::size_t seed_nodes = std::min(cfg.initial_nodes, n);
  for (std::size_t v = 1; v < seed_nodes; ++v) link(v - 1, v);
  std::size_t nodes = seed_nodes;

  auto pick = [&] { return endpoints[rng.index(endpoints.size())]; };

  while (nodes < n) {
    const bool saturated = edges.size() >= nodes * (nodes - 1) / 2;
    if (!saturated && rng.uniform() < cfg.p_edge) {
      for (int attempt = 0; attempt < 64; ++attempt) {
        const std::size_t a = pick();
        const std::size_t b = pick();
        if (a != b && link(a, b)) break;
      }
      continue;
    }
    const std::size_t fresh = nodes;
    const std::size_t want = std::min(cfg.edges_per_node, nodes);
    std::set<std::size_t> targets;
    while (targets.size() < want) targets.insert(pick());
    for (std::size_t t : targets) link(fresh, t);
    ++nodes;
  }

  WeightedDigraph g(n);
  for (auto [a, b] : order) {
    const double w = rng.uniform(-1.0, 1.0);
    if (rng.uniform() < 0.5) {
      g(b, a) = w;  // a -> b
    } else {
      g(a, b) = w;  // b -> a
    }
  }
  return g;
}

std::vector<PairedSample> make_dataset(const DatasetSpec& spec) {
  if (spec.pairs < 1) throw ValidationError("dataset needs at least one pair");
  if (spec.t_len < 1) throw ValidationError("series length must be positive");
  std::vector<PairedSample> out(spec.pairs);
  parallel_for(spec.pairs, [&](std::size_t i) {
    Rng rng(spec.seed, i);
    WeightedDigraph g = generate_ba_graph(spec.n, rng, spec.ba);
    std::vector<double> init(spec.n);
    for (double& v : init) v = rng.uniform(0.0, 1.0);
    out[i] = PairedSample{fcm_simulate(g, init, spec.t_len), std::move(g)};
  });
  return out;
}

// --- DREAM3 -----------------------------------------------------------------

namespace {

std::string strip(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  s.erase(0, i);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  const bool tabbed = line.find('\t') != std::string::npos;
  if (tabbed) {
    while (std::getline(is, field, '\t')) out.push_back(strip(field));
  } else {
    while (is >> field) out.push_back(strip(field));
  }
  return out;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

double parse_number(const std::string& s, const std::filesystem::path& path, std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell '" + s + "'");
  }
  return v;
}

std::ifstream open_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<MultivariateSeries> parse_dream3_expression(const std::filesystem::path& path,
                                                        std::size_t keep) {
  std::ifstream in = open_text(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw ParseError(path.string() + ": missing header");
  std::string first = header.front();
  std::transform(first.begin(), first.end(), first.begin(), [](unsigned char c) { return std::tolower(c); });
  if (first != "time" || header.size() < 2) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                     ": header must start with a Time column followed by genes");
  }
  const std::size_t genes = header.size() - 1;

  struct Block {
    std::vector<std::vector<double>> rows;
    std::size_t first_line = 0;
  };
  std::vector<Block> blocks;
  Block current;
  double last_time = 0.0;
  auto close_block = [&] {
    if (!current.rows.empty()) blocks.push_back(std::move(current));
    current = Block{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) {
      close_block();
      continue;
    }
    auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    const double time = parse_number(fields[0], path, line_no);
    if (!current.rows.empty() && time <= last_time) close_block();
    if (current.rows.empty()) current.first_line = line_no;
    last_time = time;
    std::vector<double> row(genes);
    for (std::size_t g = 0; g < genes; ++g) row[g] = parse_number(fields[g + 1], path, line_no);
    current.rows.push_back(std::move(row));
  }
  close_block();
  if (blocks.empty()) throw ParseError(path.string() + ": no data rows");

  std::vector<MultivariateSeries> out;
  for (const Block& b : blocks) {
    if (b.rows.size() < keep) {
      throw ParseError(path.string() + ":" + std::to_string(b.first_line) + ": replicate has " +
                       std::to_string(b.rows.size()) + " time points, need at least " +
                       std::to_string(keep));
    }
    Matrix m(genes, keep);
    const std::size_t offset = b.rows.size() - keep;
    for (std::size_t t = 0; t < keep; ++t)
      for (std::size_t g = 0; g < genes; ++g) m(g, t) = b.rows[offset + t][g];
    out.emplace_back(std::move(m));
  }
  return out;
}

WeightedDigraph parse_dream3_gold(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in = open_text(path);
  WeightedDigraph g(n);
  std::string line;
  std::size_t line_no = 0;
  auto gene_index = [&](const std::string& label) {
    std::size_t idx = 0;
    if (label.size() >= 2 && (label[0] == 'G' || label[0] == 'g')) {
      auto [ptr, ec] = std::from_chars(label.data() + 1, label.data() + label.size(), idx);
      if (ec == std::errc() && ptr == label.data() + label.size() && idx >= 1 && idx <= n) return idx - 1;
    }
    throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unknown gene label '" + label +
                     "' for a " + std::to_string(n) + "-gene network");
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    const std::size_t src = gene_index(fields[0]);
    const std::size_t dst = gene_index(fields[1]);
    const double flag = parse_number(fields[2], path, line_no);
    if (flag != 0.0 && flag != 1.0) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": edge flag must be 0 or 1");
    }
    if (flag == 1.0) g(dst, src) = 1.0;
  }
  return g;
}

// --- dataset files ------------------------------------------------------------

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

void write_matrix(std::ostream& os, const Matrix& m) {
  char buf[32];
  os << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) os << ',';
    os << '[';
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), m(i, j));
      os.write(buf, ptr - buf);
    }
    os << ']';
  }
  os << ']';
}

Matrix read_matrix(const nlohmann::json& j, std::size_t rows, std::size_t cols, const char* what) {
  if (!j.is_array() || j.size() != rows) {
    throw ParseError(std::string("dataset: ") + what + " must have " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& r = j[i];
    if (!r.is_array() || r.size() != cols) {
      throw ParseError(std::string("dataset: ") + what + " row " + std::to_string(i) + " must have " +
                       std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!r[c].is_number()) throw ParseError(std::string("dataset: non-numeric entry in ") + what);
      m(i, c) = r[c].get<double>();
    }
  }
  return m;
}

}  // namespace

void save_dataset(const std::vector<PairedSample>& samples, const std::filesystem::path& path) {
  if (samples.empty()) throw ValidationError("refusing to write an empty dataset");
  const std::size_t n = samples.front().graph.n();
  const std::size_t t_len = samples.front().series.t_len();
  for (const auto& s : samples) {
    if (s.graph.n() != n || s.series.n() != n || s.series.t_len() != t_len) {
      throw ValidationError("dataset samples must share n and t_len");
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "{\"version\":" << kDatasetVersion << ",\"n\":" << n << ",\"t_len\":" << t_len << ",\"pairs\":[";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i) os << ',';
    os << "{\"adjacency\":";
    write_matrix(os, samples[i].graph.adj);
    os << ",\"series\":";
    write_matrix(os, samples[i].series.values);
    os << '}';
  }
  os << "]}\n";
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::vector<PairedSample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open dataset " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("dataset " + path.string() + " is corrupt: " + e.what());
  }
  try {
    if (!doc.is_object() || !doc.contains("version")) throw ParseError("dataset: missing version");
    const int version = doc.at("version").get<int>();
    if (version != kDatasetVersion) {
      throw ParseError("dataset version " + std::to_string(version) + " unsupported (expected " +
                       std::to_string(kDatasetVersion) + ")");
    }
    const auto n = doc.at("n").get<std::size_t>();
    const auto t_len = doc.at("t_len").get<std::size_t>();
    const auto& pairs = doc.at("pairs");
    std::vector<PairedSample> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
      out.push_back({MultivariateSeries(read_matrix(p.at("series"), n, t_len, "series")),
                     WeightedDigraph(read_matrix(p.at("adjacency"), n, n, "adjacency"))});
    }
    if (out.empty()) throw ParseError("dataset has no pairs");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("dataset " + path.string() + " has an invalid layout: " + e.what());
  }
}

// --- graph sets and CSV -------------------------------------------------------

void save_graphs(const std::vector<WeightedDigraph>& graphs, const std::filesystem::path& path) {
  if (graphs.empty()) throw ValidationError("refusing to write an empty graph set");
  const std::size_t n = graphs.front().n();
  for (const auto& g : graphs) {
    if (g.n() != n) throw ValidationError("graph set members must share n");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "{\"version\":" << kGraphSetVersion << ",\"n\":" << n << ",\"graphs\":[";
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (i) os << ',';
    write_matrix(os, graphs[i].adj);
  }
  os << "]}\n";
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

std::vector<WeightedDigraph> load_graphs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open graph file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("graph file " + path.string() + " is corrupt: " + e.what());
  }
  if (doc.is_object() && doc.contains("pairs")) {
    std::vector<WeightedDigraph> out;
    for (auto& p : load_dataset(path)) out.push_back(std::move(p.graph));
    return out;
  }
  try {
    const int version = doc.at("version").get<int>();
    if (version != kGraphSetVersion) {
      throw ParseError("graph file version " + std::to_string(version) + " unsupported (expected " +
                       std::to_string(kGraphSetVersion) + ")");
    }
    const auto n = doc.at("n").get<std::size_t>();
    std::vector<WeightedDigraph> out;
    for (const auto& g : doc.at("graphs")) out.emplace_back(read_matrix(g, n, n, "adjacency"));
    if (out.empty()) throw ParseError("graph file " + path.string() + " has no graphs");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("graph file " + path.string() + " has an invalid layout: " + e.what());
  }
}

void write_matrix_csv(const Matrix& m, std::ostream& os) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

MultivariateSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in = open_text(path);
  std::vector<std::vector<double>> rows;
  std::string line, cell;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    std::vector<double> row;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) row.push_back(parse_number(strip(cell), path, line_no));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path.string() + ": no data rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t t = 0; t < rows[i].size(); ++t) m(i, t) = rows[i][t];
  return MultivariateSeries(std::move(m));
}

void write_dream3_predictions(const WeightedDigraph& g, std::ostream& os) {
  struct Edge {
    std::size_t src, dst;
    double score;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = 0; j < g.n(); ++j)
      if (i != j) edges.push_back({j, i, g(i, j)});
  std::stable_sort(edges.begin(), edges.end(),
                   [](const Edge& a, const Edge& b) { return std::abs(a.score) > std::abs(b.score); });
  for (const auto& e : edges) {
    os << 'G' << e.src + 1 << "\tG" << e.dst + 1 << '\t' << format_double(e.score) << '\n';
  }
}

}  // namespace tsgg
