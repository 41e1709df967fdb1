#include "blml/algorithms.hpp"

#include "blml/errors.hpp"
#include "blml/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace blml {

BinnedSamples bin_samples(const SampleSet& samples, const std::vector<double>& fs)
{
  const std::size_t d = samples.dim();
  if (fs.size() != d)
    throw DomainError("bin_samples: sampling rate has the wrong dimension");
  for (double f : fs)
    if (!(f > 0.0) || !std::isfinite(f))
      throw DomainError("bin_samples: sampling rate must be positive");
  if (samples.empty())
    throw DomainError("bin_samples: no samples");
  samples.require_finite();

  const std::size_t n = samples.size();
  std::vector<std::int64_t> idx(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double k = std::floor(samples(i, j) * fs[j] + 0.5);
      if (std::abs(k) > 9.0e15)
        throw DomainError("bin_samples: coordinate too large for the grid");
      idx[i * d + j] = static_cast<std::int64_t>(k);
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(idx.begin() + static_cast<std::ptrdiff_t>(a * d),
                                        idx.begin() + static_cast<std::ptrdiff_t>(a * d + d),
                                        idx.begin() + static_cast<std::ptrdiff_t>(b * d),
                                        idx.begin() + static_cast<std::ptrdiff_t>(b * d + d));
  };
  std::sort(order.begin(), order.end(), less);

  BinnedSamples out;
  out.fs = fs;
  out.n = n;
  std::vector<double> centers;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    const bool same = k > 0 && std::equal(idx.begin() + static_cast<std::ptrdiff_t>(i * d),
                                          idx.begin() + static_cast<std::ptrdiff_t>(i * d + d),
                                          out.indices.end() - static_cast<std::ptrdiff_t>(d));
    if (same) {
      ++out.counts.back();
      continue;
    }
    for (std::size_t j = 0; j < d; ++j) {
      const std::int64_t g = idx[i * d + j];
      out.indices.push_back(g);
      centers.push_back(static_cast<double>(g) / fs[j]);
    }
    out.counts.push_back(1);
  }
  out.centers = SampleSet(d, std::move(centers), samples.source());
  return out;
}

BinnedSamples bin_samples(const SampleSet& samples, double fs)
{
  return bin_samples(samples, std::vector<double>(samples.dim(), fs));
}

std::vector<double> default_sampling_rate(const CutoffFrequency& fc, std::size_t n)
{
  std::vector<double> fs(fc.dim());
  const double scale = std::pow(static_cast<double>(n), 0.25);
  for (std::size_t j = 0; j < fc.dim(); ++j)
    fs[j] = std::max(fc[j] * scale, 2.0001 * fc[j]);
  return fs;
}

BlmlFit fit_trivial(const SampleSet& samples,
                    const CutoffFrequency& fc,
                    const SolverOptions& options)
{
  if (samples.empty())
    throw DomainError("fit_trivial: no samples");
  const auto gram = build_gram(samples, fc);
  const std::size_t n = samples.size();
  const auto weights = unit_weights(n);
  auto coef = solve_orthant(gram, weights, n, OrthantVector::positive(n), options);
  BlmlFit fit{ samples, weights, std::move(coef), fc, n, "trivial", {} };
  fit.diagnostics.likelihood_trace = { fit.log_likelihood() };
  return fit;
}

BlmlFit fit_quick(const SampleSet& samples,
                  const CutoffFrequency& fc,
                  std::optional<std::vector<double>> fs_override,
                  const SolverOptions& options)
{
  if (samples.empty())
    throw DomainError("fit_quick: no samples");
  const auto fs = fs_override ? *fs_override : default_sampling_rate(fc, samples.size());
  auto bins = bin_samples(samples, fs);
  const auto gram = build_gram(bins.centers, fc);
  const std::size_t b = bins.centers.size();
  auto coef = solve_orthant(gram, bins.counts, bins.n, OrthantVector::positive(b), options);
  BlmlFit fit{ std::move(bins.centers), std::move(bins.counts), std::move(coef), fc,
               bins.n, "quick", {} };
  fit.diagnostics.likelihood_trace = { fit.log_likelihood() };
  return fit;
}

// ---------------------------------------------------------------- BQP

namespace {

BqpSearchState ascend(const GramMatrix& gram, OrthantVector start)
{
  const auto m = static_cast<Eigen::Index>(gram.size());
  Eigen::VectorXd c0 = start.as_vector();
  Eigen::VectorXd v = gram.multiply(c0);
  double obj = c0.dot(v);
  const double diag = gram.diagonal();
  std::size_t visited = 1;
  for (;;) {
    // flipping i changes the objective by 4 (s_ii - c0_i v_i)
    Eigen::Index best = -1;
    double gain = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double g = 4.0 * (diag - c0[i] * v[i]);
      if (g > gain) {
        gain = g;
        best = i;
      }
    }
    if (best < 0 || gain <= 1e-12 * std::max(1.0, std::abs(obj)))
      break;
    c0[best] = -c0[best];
    v += 2.0 * c0[best] * gram.column(static_cast<std::size_t>(best));
    obj += gain;
    ++visited;
  }
  std::vector<std::int8_t> s(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    s[static_cast<std::size_t>(i)] = c0[i] > 0 ? 1 : -1;
  OrthantVector o(std::move(s));
  return { o, gram.quadratic_form(o.as_vector()), visited };
}

} // namespace

BqpSearchState maximize_quadratic_form(const GramMatrix& gram,
                                       std::size_t random_starts,
                                       std::uint64_t seed)
{
  const std::size_t m = gram.size();
  std::vector<OrthantVector> starts{ OrthantVector::positive(m),
                                     OrthantVector::positive(m).negated() };
  Rng rng(seed);
  for (std::size_t k = 0; k < random_starts; ++k) {
    std::vector<std::int8_t> s(m);
    for (auto& v : s)
      v = (rng.bits() >> 63) ? 1 : -1;
    starts.emplace_back(std::move(s));
  }
  std::optional<BqpSearchState> best;
  std::size_t visited = 0;
  for (auto& st : starts) {
    auto r = ascend(gram, std::move(st));
    visited += r.visited;
    const double tie = 1e-12 * std::max(1.0, best ? std::abs(best->objective) : 1.0);
    if (!best || r.objective > best->objective + tie ||
        (r.objective >= best->objective - tie && r.orthant.sum() > best->orthant.sum()))
      best = std::move(r);
  }
  best->visited = visited;
  return *best;
}

BlmlFit fit_bqp(const SampleSet& samples, const CutoffFrequency& fc, const BqpOptions& options)
{
  const std::size_t n = samples.size();
  if (n == 0)
    throw DomainError("fit_bqp: no samples");
  if (n > kBqpLimit)
    throw RefusalError("fit_bqp: " + std::to_string(n) +
                       " samples exceeds the BQP limit of n <= " + std::to_string(kBqpLimit));
  const auto gram = build_gram(samples, fc, GramStorage::dense);
  const auto weights = unit_weights(n);

  const auto state = maximize_quadratic_form(gram, options.random_starts, options.seed);
  auto current = solve_orthant(gram, weights, n, state.orthant, options.solver);
  double l_cur = likelihood_value(current.values, weights);

  FitDiagnostics diag;
  diag.bqp_objective = state.objective;
  diag.likelihood_trace.push_back(l_cur);
  diag.orthants_visited = 1;

  for (bool improved = true; improved;) {
    improved = false;
    std::optional<CoefficientVector> best_nb;
    double l_best = l_cur;
    for (std::size_t i = 0; i < n; ++i) {
      if (diag.orthants_visited >= options.search_budget) {
        diag.budget_terminated = true;
        break;
      }
      auto o = current.orthant.flipped(i);
      SolverOptions so = options.solver;
      Eigen::VectorXd start = current.values;
      start[static_cast<Eigen::Index>(i)] = -start[static_cast<Eigen::Index>(i)];
      so.start = std::move(start);
      auto root = solve_orthant(gram, weights, n, o, so);
      ++diag.orthants_visited;
      const double l = likelihood_value(root.values, weights);
      const double tie = 1e-9 * std::max(1.0, std::abs(l_best));
      if (l > l_best + tie) {
        l_best = l;
        best_nb = std::move(root);
      }
    }
    if (best_nb) {
      current = std::move(*best_nb);
      l_cur = l_best;
      diag.likelihood_trace.push_back(l_cur);
      improved = !diag.budget_terminated;
    }
  }

  BlmlFit fit{ samples, weights, std::move(current), fc, n, "bqp", std::move(diag) };
  return fit;
}

} // namespace blml
