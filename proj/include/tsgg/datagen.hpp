#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tsgg/graph.hpp"
#include "tsgg/rng.hpp"

namespace tsgg {

// Extended Barabasi-Albert growth. Each step either (probability p_edge)
// links two existing nodes chosen by preferential attachment, or adds a new
// node with `edges_per_node` preferentially attached edges.
struct BaConfig {
  double p_edge = 0.4;
  std::size_t initial_nodes = 2;  // seeded as a path
  std::size_t edges_per_node = 1;
};

// Directed weighted graph: every undirected BA edge gets a random direction
// and a weight ~ U[-1,1]. No self-loops, no duplicate edges.
WeightedDigraph generate_ba_graph(std::size_t n, Rng& rng, const BaConfig& cfg = {});

struct DatasetSpec {
  std::size_t n = 10;
  std::size_t pairs = 800;
  std::size_t t_len = 20;
  std::uint64_t seed = 0;
  BaConfig ba;
};

// Sample i draws from its own stream derived from (seed, i), so the result
// is independent of worker count.
std::vector<PairedSample> make_dataset(const DatasetSpec& spec);

// One series per replicate block, keeping the last `keep` time points.
std::vector<MultivariateSeries> parse_dream3_expression(const std::filesystem::path& path,
                                                        std::size_t keep = 11);

// "G<src>\tG<dst>\t0|1" lines; a positive line sets A[dst][src] = 1.
WeightedDigraph parse_dream3_gold(const std::filesystem::path& path, std::size_t n);

inline constexpr int kDatasetVersion = 1;

void save_dataset(const std::vector<PairedSample>& samples, const std::filesystem::path& path);
std::vector<PairedSample> load_dataset(const std::filesystem::path& path);

// Graph sets: {"version":1,"n":N,"graphs":[adjacency,...]}. load_graphs also
// accepts a dataset file and returns its adjacencies.
inline constexpr int kGraphSetVersion = 1;
void save_graphs(const std::vector<WeightedDigraph>& graphs, const std::filesystem::path& path);
std::vector<WeightedDigraph> load_graphs(const std::filesystem::path& path);

// Comma-separated, one row per node (series) or per target node (adjacency).
void write_matrix_csv(const Matrix& m, std::ostream& os);
MultivariateSeries read_series_csv(const std::filesystem::path& path);

// DREAM3 prediction format: "G<src>\tG<dst>\t<score>" for every off-diagonal
// pair, ranked by descending |score|.
void write_dream3_predictions(const WeightedDigraph& g, std::ostream& os);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace tsgg
