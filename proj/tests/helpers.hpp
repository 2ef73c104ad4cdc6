#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "tsgg/autodiff.hpp"
#include "tsgg/graph.hpp"
#include "tsgg/rng.hpp"

namespace tsgg::testing {

inline Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (auto& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

inline WeightedDigraph random_graph(Rng& rng, std::size_t n, double density = 1.0) {
  WeightedDigraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && rng.uniform() < density) g(i, j) = rng.uniform(-1.0, 1.0);
  return g;
}

inline MultivariateSeries random_series(Rng& rng, std::size_t n, std::size_t t) {
  return MultivariateSeries(random_matrix(rng, n, t, 0.0, 1.0));
}

inline std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.index(i)]);
  return p;
}

// (P A P^T)[i][j] = A[p[i]][p[j]]
inline WeightedDigraph permute_graph(const WeightedDigraph& g, const std::vector<std::size_t>& p) {
  WeightedDigraph out(g.n());
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = 0; j < g.n(); ++j) out(i, j) = g(p[i], p[j]);
  return out;
}

inline MultivariateSeries permute_series(const MultivariateSeries& s, const std::vector<std::size_t>& p) {
  Matrix v(s.n(), s.t_len());
  for (std::size_t i = 0; i < s.n(); ++i)
    for (std::size_t t = 0; t < s.t_len(); ++t) v(i, t) = s.values(p[i], t);
  return MultivariateSeries(std::move(v));
}

// Scalar probe of every output entry: sum(out .* R) with fixed random R.
inline ad::Var project(ad::Tape& tape, ad::Var out, std::uint64_t seed) {
  Rng rng(seed, 991);
  return ad::sum_all(ad::hadamard(out, tape.constant(random_matrix(rng, out.rows(), out.cols()))));
}

inline std::vector<ad::Parameter*> ptrs(std::vector<ad::Parameter>& ps) {
  std::vector<ad::Parameter*> out;
  for (auto& p : ps) out.push_back(&p);
  return out;
}

inline constexpr double kGradTol = 1e-4;
inline constexpr int kGradSeeds = 10;

}  // namespace tsgg::testing
