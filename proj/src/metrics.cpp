#include "tsgg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <Eigen/Dense>

#include "tsgg/parallel.hpp"

namespace tsgg::metrics {

namespace {

void check_sizes(const WeightedDigraph& a, const WeightedDigraph& b) {
  if (a.n() != b.n()) {
    throw ShapeError("graph size mismatch: " + std::to_string(a.n()) + " vs " + std::to_string(b.n()));
  }
}

Eigen::MatrixXd laplacian(const WeightedDigraph& g) {
  const std::size_t n = g.n();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = 0.5 * (std::abs(g(i, j)) + std::abs(g(j, i)));
      L(i, j) = -w;
      L(i, i) += w;
    }
  return L;
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigen decomposition failed");
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

// Frequencies for every eigenvalue past the first.
std::vector<double> frequencies(const std::vector<double>& spectrum) {
  std::vector<double> w;
  for (std::size_t i = 1; i < spectrum.size(); ++i) w.push_back(std::sqrt(std::max(0.0, spectrum[i])));
  return w;
}

double density_at(double omega, const std::vector<double>& freqs, double gamma, double norm) {
  double s = 0.0;
  for (double wi : freqs) s += gamma / ((omega - wi) * (omega - wi) + gamma * gamma);
  return norm * s;
}

double normalizer(const std::vector<double>& freqs, double gamma) {
  // Integral over [0, inf) of each Lorentzian is pi/2 + atan(w_i / gamma).
  double total = 0.0;
  for (double wi : freqs) total += std::numbers::pi / 2.0 + std::atan(wi / gamma);
  return total > 0.0 ? 1.0 / total : 0.0;
}

}  // namespace

MetricConfig MetricConfig::for_nodes(std::size_t n, double xi, double grid_step) {
  MetricConfig c;
  c.gamma = calibrate_gamma(n, grid_step);
  c.gamma_n = n;
  c.xi = xi;
  c.grid_step = grid_step;
  return c;
}

double hamming_distance(const WeightedDigraph& a, const WeightedDigraph& b) {
  check_sizes(a, b);
  const std::size_t n = a.n();
  if (n < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += std::abs(a(i, j) - b(i, j));
  return s / (2.0 * static_cast<double>(n) * static_cast<double>(n - 1));
}

std::vector<double> laplacian_spectrum(const WeightedDigraph& g) {
  return symmetric_eigenvalues(laplacian(g));
}

double ipsen_mikhailov_raw(const std::vector<double>& spectrum_a, const std::vector<double>& spectrum_b,
                           double gamma, double grid_step) {
  if (!(gamma > 0.0) || !(grid_step > 0.0)) throw ConfigError("IM needs positive gamma and grid step");
  const auto fa = frequencies(spectrum_a);
  const auto fb = frequencies(spectrum_b);
  const double ka = normalizer(fa, gamma);
  const double kb = normalizer(fb, gamma);
  double wmax = 0.0;
  for (double w : fa) wmax = std::max(wmax, w);
  for (double w : fb) wmax = std::max(wmax, w);
  const double upper = wmax + 3.0 * gamma;

  // Trapezoid on a uniform grid from 0 with a final partial interval ending
  // exactly at `upper`, so the integral is continuous in gamma.
  auto f = [&](double w) {
    const double d = density_at(w, fa, gamma, ka) - density_at(w, fb, gamma, kb);
    return d * d;
  };
  const auto steps = static_cast<std::size_t>(std::floor(upper / grid_step));
  double integral = 0.0;
  double prev = f(0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double cur = f(static_cast<double>(k) * grid_step);
    integral += 0.5 * (prev + cur) * grid_step;
    prev = cur;
  }
  const double tail = upper - static_cast<double>(steps) * grid_step;
  if (tail > 0.0) integral += 0.5 * (prev + f(upper)) * tail;
  return std::sqrt(std::max(0.0, integral));
}

double ipsen_mikhailov(const WeightedDigraph& a, const WeightedDigraph& b, const MetricConfig& cfg) {
  check_sizes(a, b);
  if (!cfg.gamma || cfg.gamma_n != a.n()) {
    throw ConfigError("IM gamma is not calibrated for n = " + std::to_string(a.n()));
  }
  return ipsen_mikhailov_raw(laplacian_spectrum(a), laplacian_spectrum(b), *cfg.gamma, cfg.grid_step);
}

double calibrate_gamma(std::size_t n, double grid_step) {
  if (n < 2) throw ValidationError("gamma calibration needs n >= 2");
  static std::mutex mu;
  static std::map<std::pair<std::size_t, double>, double> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find({n, grid_step}); it != cache.end()) return it->second;
  }
  WeightedDigraph empty(n);
  WeightedDigraph complete(Matrix(n, n, 1.0));
  for (std::size_t i = 0; i < n; ++i) complete(i, i) = 0.0;
  const auto se = laplacian_spectrum(empty);
  const auto sc = laplacian_spectrum(complete);
  auto excess = [&](double g) { return ipsen_mikhailov_raw(se, sc, g, grid_step) - 1.0; };

  double lo = 1e-4, hi = 1.0;
  if (!(excess(lo) > 0.0 && excess(hi) < 0.0)) {
    throw NumericError("gamma calibration: no root in [1e-4, 1] for n = " + std::to_string(n));
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double e = excess(mid);
    if (std::abs(e) < 1e-10 || hi - lo < 1e-15) break;
    (e > 0.0 ? lo : hi) = mid;
  }
  if (std::abs(excess(mid)) > 1e-6) {
    throw NumericError("gamma calibration did not converge for n = " + std::to_string(n));
  }
  std::lock_guard lock(mu);
  cache[{n, grid_step}] = mid;
  return mid;
}

double him_distance(const WeightedDigraph& a, const WeightedDigraph& b, const MetricConfig& cfg) {
  const double h = hamming_distance(a, b);
  const double im = ipsen_mikhailov(a, b, cfg);
  return std::sqrt(h * h + cfg.xi * im * im) / std::sqrt(1.0 + cfg.xi);
}

Matrix density_matrix(const WeightedDigraph& g) {
  const std::size_t n = g.n();
  Eigen::MatrixXd L = laplacian(g);
  const double tr = L.trace();
  Matrix rho(n, n);
  if (tr <= 0.0) {
    for (std::size_t i = 0; i < n; ++i) rho(i, i) = 1.0 / static_cast<double>(n);
    return rho;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rho(i, j) = L(i, j) / tr;
  return rho;
}

double von_neumann_entropy(const Matrix& rho) {
  Eigen::MatrixXd m(rho.rows(), rho.cols());
  for (std::size_t i = 0; i < rho.rows(); ++i)
    for (std::size_t j = 0; j < rho.cols(); ++j) m(i, j) = rho(i, j);
  double s = 0.0;
  for (double l : symmetric_eigenvalues(m))
    if (l > 0.0) s -= l * std::log2(l);
  return s;
}

double qjsd_distance(const WeightedDigraph& a, const WeightedDigraph& b) {
  check_sizes(a, b);
  const Matrix ra = density_matrix(a);
  const Matrix rb = density_matrix(b);
  Matrix mix(ra.rows(), ra.cols());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 0.5 * (ra[i] + rb[i]);
  const double jsd = von_neumann_entropy(mix) - 0.5 * (von_neumann_entropy(ra) + von_neumann_entropy(rb));
  return std::sqrt(std::clamp(jsd, 0.0, 1.0));
}

BatchReport evaluate_batch(const std::vector<WeightedDigraph>& preds,
                           const std::vector<WeightedDigraph>& truths, const MetricConfig& cfg,
                           const BatchOptions& opts) {
  if (preds.empty()) throw ValidationError("no predictions to evaluate");
  if (truths.size() != preds.size() && truths.size() != 1) {
    throw ValidationError("prediction/truth count mismatch: " + std::to_string(preds.size()) + " vs " +
                          std::to_string(truths.size()));
  }
  BatchReport report;
  report.config = cfg;
  report.pairs.resize(preds.size());
  parallel_for(preds.size(), [&](std::size_t i) {
    WeightedDigraph p = preds[i];
    if (opts.abs_predictions)
      for (double& v : p.adj.data()) v = std::abs(v);
    const WeightedDigraph& t = truths.size() == 1 ? truths.front() : truths[i];
    PairMetrics m;
    m.hamming = hamming_distance(p, t);
    m.im = ipsen_mikhailov(p, t, cfg);
    m.him = std::sqrt(m.hamming * m.hamming + cfg.xi * m.im * m.im) / std::sqrt(1.0 + cfg.xi);
    m.qjsd = qjsd_distance(p, t);
    report.pairs[i] = m;
  });
  for (const auto& m : report.pairs) {
    report.mean_hamming += m.hamming;
    report.mean_im += m.im;
    report.mean_him += m.him;
    report.mean_qjsd += m.qjsd;
  }
  const double k = static_cast<double>(report.pairs.size());
  report.mean_hamming /= k;
  report.mean_im /= k;
  report.mean_him /= k;
  report.mean_qjsd /= k;
  return report;
}

}  // namespace tsgg::metrics
