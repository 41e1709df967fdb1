#include "blml/bandwidth.hpp"

#include "blml/algorithms.hpp"
#include "blml/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace blml {

CutoffFrequency fc_from_gaussian_fit(const SampleSet& samples)
{
  const std::size_t n = samples.size();
  if (n < 2)
    throw DomainError("fc_from_gaussian_fit: need at least 2 samples");
  samples.require_finite();
  std::vector<double> fc(samples.dim());
  for (std::size_t j = 0; j < samples.dim(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      mean += samples(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      var += (samples(i, j) - mean) * (samples(i, j) - mean);
    var /= static_cast<double>(n);
    if (!(var > 0.0))
      throw DomainError("fc_from_gaussian_fit: samples have zero variance");
    fc[j] = 1.0 / std::sqrt(var);
  }
  return CutoffFrequency(std::move(fc));
}

ScanAlgorithm parse_scan_algorithm(std::string_view name)
{
  if (name == "trivial")
    return ScanAlgorithm::trivial;
  if (name == "quick")
    return ScanAlgorithm::quick;
  throw ConfigError("MNLL scan supports trivial or quick, not '" + std::string(name) + "'");
}

double mnll(const BlmlFit& fit)
{
  return fit.log_likelihood() / static_cast<double>(fit.n);
}

double mnll_derivative(const BlmlFit& fit)
{
  if (fit.nodes.dim() != 1)
    throw DomainError("mnll_derivative: 1-D fits only");
  // sum_ij a_i a_j cos(pi f (x_i - x_j)) = |sum_i a_i e^{i pi f x_i}|^2
  std::complex<double> z = 0.0;
  const double fc = fit.fc[0];
  const auto& c = fit.coefficients.values;
  for (std::size_t b = 0; b < fit.weights.size(); ++b)
    z += static_cast<double>(fit.weights[b]) * c[static_cast<Eigen::Index>(b)] *
         std::polar(1.0, std::numbers::pi * fc * fit.nodes(b, 0));
  const double n = static_cast<double>(fit.n);
  return std::norm(z) / (n * n);
}

MnllScan mnll_scan(const SampleSet& samples,
                   const std::vector<double>& grid,
                   ScanAlgorithm algorithm,
                   const SolverOptions& options,
                   const std::function<void(const BlmlFit&)>& on_fit)
{
  if (grid.size() < 3)
    throw DomainError("mnll_scan: the f_c grid needs at least 3 points");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || !std::isfinite(grid[k]))
      throw DomainError("mnll_scan: f_c values must be positive");
    if (k > 0 && !(grid[k] > grid[k - 1]))
      throw DomainError("mnll_scan: the f_c grid must be strictly increasing");
  }
  if (samples.dim() != 1)
    throw DomainError("mnll_scan: 1-D samples only");

  MnllScan scan;
  scan.fc = grid;
  scan.n = samples.size();
  scan.algorithm = algorithm == ScanAlgorithm::trivial ? "trivial" : "quick";
  const std::size_t m = grid.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  scan.mnll.assign(m, nan);
  scan.dmnll_analytic.assign(m, nan);
  scan.dmnll_fd.assign(m, nan);
  scan.valid.assign(m, false);

  for (std::size_t k = 0; k < m; ++k) {
    try {
      const auto fit = algorithm == ScanAlgorithm::trivial
                         ? fit_trivial(samples, grid[k], options)
                         : fit_quick(samples, grid[k], std::nullopt, options);
      scan.mnll[k] = mnll(fit);
      scan.dmnll_analytic[k] = mnll_derivative(fit);
      scan.valid[k] = true;
      if (on_fit)
        on_fit(fit);
    } catch (const ConvergenceError&) {
      // left invalid
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = k + 1 == m ? k : k + 1;
    if (scan.valid[a] && scan.valid[b])
      scan.dmnll_fd[k] = (scan.mnll[b] - scan.mnll[a]) / (grid[b] - grid[a]);
  }
  return scan;
}

std::vector<double> default_fc_grid(const SampleSet& samples, std::size_t points)
{
  if (points < 3)
    throw DomainError("default_fc_grid: need at least 3 points");
  const double f = fc_from_gaussian_fit(samples)[0];
  std::vector<double> grid(points);
  const double lo = std::log(f / 8.0), hi = std::log(f * 8.0);
  for (std::size_t k = 0; k < points; ++k)
    grid[k] = std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
  return grid;
}

double detect_knee(std::span<const double> fc, std::span<const double> curve)
{
  if (fc.size() != curve.size())
    throw DomainError("detect_knee: grid and curve lengths differ");
  const std::size_t m = fc.size();
  if (m < 5)
    throw DomainError("detect_knee: need at least 5 valid grid points");
  const double inf = std::numeric_limits<double>::infinity();
  // a flat or falling right window counts as a tiny positive slope, so the
  // steeper of two flattening points still wins
  const double mean_slope = std::abs(curve[m - 1] - curve[0]) / (fc[m - 1] - fc[0]);
  const double floor = 1e-6 * mean_slope;
  double best_ratio = -inf;
  std::size_t best = 0;
  for (std::size_t i = 2; i + 2 < m; ++i) {
    const double left = (curve[i] - curve[i - 2]) / (fc[i] - fc[i - 2]);
    const double right = (curve[i + 2] - curve[i]) / (fc[i + 2] - fc[i]);
    const double ratio = left <= 0.0 ? -inf : left / std::max(right, floor);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = i;
    }
  }
  if (!(best_ratio > 1.0 + 1e-6))
    throw DomainError("detect_knee: no knee, the MNLL slope never drops");
  return fc[best];
}

double detect_knee(const MnllScan& scan)
{
  std::vector<double> f, v;
  for (std::size_t k = 0; k < scan.fc.size(); ++k)
    if (scan.valid[k]) {
      f.push_back(scan.fc[k]);
      v.push_back(scan.mnll[k]);
    }
  return detect_knee(f, v);
}

} // namespace blml
