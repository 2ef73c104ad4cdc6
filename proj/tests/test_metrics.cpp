#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tsgg/metrics.hpp"
#include "tsgg/pci.hpp"

using namespace tsgg;
using namespace tsgg::metrics;
using tsgg::testing::random_graph;

namespace {

WeightedDigraph filled(std::size_t n, double v) {
  WeightedDigraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) g(i, j) = v;
  return g;
}

}  // namespace

// --- metrics -----------------------------------------------------------------------

TEST_CASE("hamming distance") {
  Rng rng(51);
  const WeightedDigraph a = random_graph(rng, 10), b = random_graph(rng, 10);
  CHECK(hamming_distance(a, a) == 0.0);
  CHECK(hamming_distance(a, b) == hamming_distance(b, a));
  CHECK(hamming_distance(filled(10, 1.0), filled(10, -1.0)) == 1.0);
  CHECK_THROWS_AS(hamming_distance(a, WeightedDigraph(9)), ShapeError);
}

TEST_CASE("IM calibration") {
  for (std::size_t n : {10, 50, 100}) {
    const MetricConfig cfg = MetricConfig::for_nodes(n);
    REQUIRE(cfg.gamma.has_value());
    CHECK(*cfg.gamma == calibrate_gamma(n));
    CHECK(std::abs(ipsen_mikhailov(WeightedDigraph(n), filled(n, 1.0), cfg) - 1.0) <= 1e-6);
  }
  CHECK(calibrate_gamma(10) == doctest::Approx(0.45116).epsilon(1e-4));
  CHECK_THROWS_AS(calibrate_gamma(1), ValidationError);
}

TEST_CASE("IM raw distance decreases with gamma") {
  const std::vector<double> empty = laplacian_spectrum(WeightedDigraph(10));
  const std::vector<double> full = laplacian_spectrum(filled(10, 1.0));
  double prev = ipsen_mikhailov_raw(empty, full, 1e-4);
  for (double g = 0.01; g <= 1.0; g += 0.01) {
    const double d = ipsen_mikhailov_raw(empty, full, g);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("IM basics") {
  Rng rng(52);
  const MetricConfig cfg = MetricConfig::for_nodes(10);
  const WeightedDigraph a = random_graph(rng, 10), b = random_graph(rng, 10);
  CHECK(ipsen_mikhailov(a, a, cfg) <= 1e-9);
  CHECK(ipsen_mikhailov(a, b, cfg) == ipsen_mikhailov(b, a, cfg));
  CHECK_THROWS_AS(ipsen_mikhailov(random_graph(rng, 12), random_graph(rng, 12), cfg), ConfigError);
  MetricConfig none;
  CHECK_THROWS_AS(ipsen_mikhailov(a, b, none), ConfigError);
}

TEST_CASE("laplacian spectrum of a symmetrized signed graph") {
  WeightedDigraph g(2);
  g(0, 1) = -0.6;
  const auto s = laplacian_spectrum(g);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(0.6));  // W = 0.3 on both sides
}

TEST_CASE("HIM combination") {
  Rng rng(53);
  const MetricConfig cfg = MetricConfig::for_nodes(10);
  const WeightedDigraph a = random_graph(rng, 10), b = random_graph(rng, 10);
  CHECK(him_distance(a, a, cfg) == doctest::Approx(0.0).epsilon(1e-9));
  const double h = hamming_distance(a, b), im = ipsen_mikhailov(a, b, cfg);
  CHECK(him_distance(a, b, cfg) == doctest::Approx(std::sqrt((h * h + im * im) / 2.0)).epsilon(1e-14));
  MetricConfig xi0 = cfg;
  xi0.xi = 0.0;
  CHECK(him_distance(a, b, xi0) == h);
  const double top = him_distance(filled(10, 1.0), filled(10, -1.0), cfg);
  CHECK(top <= 1.0);
}

TEST_CASE("density matrices and QJSD") {
  Rng rng(54);
  const Matrix rho_empty = density_matrix(WeightedDigraph(5));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(rho_empty(i, j) == (i == j ? 0.2 : 0.0));

  const WeightedDigraph a = random_graph(rng, 10), b = random_graph(rng, 10);
  const Matrix rho = density_matrix(a);
  double tr = 0.0;
  for (std::size_t i = 0; i < 10; ++i) tr += rho(i, i);
  CHECK(tr == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(von_neumann_entropy(rho_empty) == doctest::Approx(std::log2(5.0)));

  CHECK(qjsd_distance(a, a) <= 1e-9);
  CHECK(qjsd_distance(a, b) == qjsd_distance(b, a));
  const double d = qjsd_distance(WeightedDigraph(10), filled(10, 1.0));
  CHECK(d >= 0.0);
  CHECK(d <= 1.0);
}

TEST_CASE("metric axioms on random pairs") {
  Rng rng(55);
  const MetricConfig cfg = MetricConfig::for_nodes(10);
  for (int trial = 0; trial < 50; ++trial) {
    const WeightedDigraph a = random_graph(rng, 10, rng.uniform());
    const WeightedDigraph b = random_graph(rng, 10, rng.uniform());
    for (auto fn : {+[](const WeightedDigraph& x, const WeightedDigraph& y, const MetricConfig&) {
                      return hamming_distance(x, y);
                    },
                    +[](const WeightedDigraph& x, const WeightedDigraph& y, const MetricConfig& c) {
                      return ipsen_mikhailov(x, y, c);
                    },
                    +[](const WeightedDigraph& x, const WeightedDigraph& y, const MetricConfig& c) {
                      return him_distance(x, y, c);
                    },
                    +[](const WeightedDigraph& x, const WeightedDigraph& y, const MetricConfig&) {
                      return qjsd_distance(x, y);
                    }}) {
      const double d = fn(a, b, cfg);
      CHECK(fn(a, a, cfg) <= 1e-9);
      CHECK(d == fn(b, a, cfg));
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
      const auto p = testing::random_permutation(rng, 10);
      CHECK(fn(testing::permute_graph(a, p), testing::permute_graph(b, p), cfg) ==
            doctest::Approx(d).epsilon(1e-9));
    }
  }
}

TEST_CASE("batch evaluation") {
  Rng rng(56);
  const MetricConfig cfg = MetricConfig::for_nodes(10);
  std::vector<WeightedDigraph> truths, preds;
  for (int i = 0; i < 6; ++i) truths.push_back(random_graph(rng, 10, 0.3));
  const BatchReport same = evaluate_batch(truths, truths, cfg);
  CHECK(same.pairs.size() == 6);
  CHECK(same.mean_him <= 1e-9);
  CHECK(same.mean_qjsd <= 1e-9);

  for (int i = 0; i < 6; ++i) preds.push_back(random_graph(rng, 10));
  const BatchReport rep = evaluate_batch(preds, truths, cfg);
  double mean = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(rep.pairs[i].him == him_distance(preds[i], truths[i], cfg));
    mean += rep.pairs[i].him / 6.0;
  }
  CHECK(rep.mean_him == doctest::Approx(mean).epsilon(1e-14));

  const BatchReport bc = evaluate_batch(preds, {truths[0]}, cfg);
  CHECK(bc.pairs[3].him == him_distance(preds[3], truths[0], cfg));

  std::vector<WeightedDigraph> negated;
  for (const auto& g : truths) {
    WeightedDigraph m = g;
    for (auto& v : m.adj.data()) v = std::abs(v);
    negated.push_back(m);
  }
  BatchOptions abs_opts;
  abs_opts.abs_predictions = true;
  CHECK(evaluate_batch(truths, negated, cfg, abs_opts).mean_him <= 1e-9);

  CHECK_THROWS_AS(evaluate_batch(preds, {truths[0], truths[1]}, cfg), ValidationError);
  CHECK_THROWS_AS(evaluate_batch({}, truths, cfg), ValidationError);
}

// --- PCI surrogate ------------------------------------------------------------------

TEST_CASE("PCI on independent noise") {
  Rng rng(61);
  Matrix v(8, 500);
  for (auto& x : v.data()) x = rng.normal();
  const WeightedDigraph g = pci_infer(MultivariateSeries(v));
  double mean = 0.0;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      if (i != j) mean += std::abs(g(i, j)) / 56.0;
  CHECK(mean < 0.1);
}

TEST_CASE("PCI twins and structure") {
  Rng rng(62);
  Matrix v(6, 60);
  for (auto& x : v.data()) x = rng.normal();
  for (std::size_t t = 0; t < 60; ++t) v(5, t) = v(2, t);
  const WeightedDigraph g = pci_infer(MultivariateSeries(v));
  CHECK(g(2, 5) > 0.95);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(g(i, i) == 0.0);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(g(i, j) == g(j, i));
      CHECK(std::abs(g(i, j)) <= 1.0);
    }
  }
}

TEST_CASE("PCI invariances") {
  Rng rng(63);
  const MultivariateSeries ts = testing::random_series(rng, 7, 11);
  const WeightedDigraph g = pci_infer(ts);

  MultivariateSeries scaled = ts;
  for (std::size_t t = 0; t < 11; ++t) scaled.values(3, t) *= 17.5;
  const WeightedDigraph gs = pci_infer(scaled);
  for (std::size_t k = 0; k < g.adj.size(); ++k) CHECK(gs.adj[k] == doctest::Approx(g.adj[k]).epsilon(1e-9));

  const auto p = testing::random_permutation(rng, 7);
  const WeightedDigraph gp = pci_infer(testing::permute_series(ts, p));
  const WeightedDigraph expect = testing::permute_graph(g, p);
  for (std::size_t k = 0; k < g.adj.size(); ++k)
    CHECK(gp.adj[k] == doctest::Approx(expect.adj[k]).epsilon(1e-9));
}

TEST_CASE("PCI constant nodes and validation") {
  Rng rng(64);
  MultivariateSeries ts = testing::random_series(rng, 5, 11);
  for (std::size_t t = 0; t < 11; ++t) ts.values(1, t) = 0.3;
  std::vector<std::size_t> constant;
  const WeightedDigraph g = pci_infer(ts, 1e-3, &constant);
  CHECK(constant == std::vector<std::size_t>{1});
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(g(1, k) == 0.0);
    CHECK(g(k, 1) == 0.0);
  }
  const CorrelationEstimate est = estimate_correlation(testing::random_series(rng, 4, 30));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(est.corr(i, i) == doctest::Approx(1.0));
    for (std::size_t j = 0; j < 4; ++j) CHECK(est.corr(i, j) == est.corr(j, i));
  }
  CHECK_THROWS_AS(pci_infer(testing::random_series(rng, 4, 2)), ValidationError);
  CHECK_THROWS_AS(pci_infer(testing::random_series(rng, 4, 10), 0.0), ValidationError);
}
