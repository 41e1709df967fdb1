#include "blml/surrogate.hpp"

#include "blml/algorithms.hpp"
#include "blml/errors.hpp"
#include "blml/parallel.hpp"
#include "blml/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

namespace blml {

namespace {

constexpr double kPi = std::numbers::pi;

double sq(double v)
{
  return v * v;
}

} // namespace

double sinc(double u)
{
  const double a = kPi * u;
  if (std::abs(a) < 1e-8)
    return 1.0 - a * a / 6.0;
  return std::sin(a) / a;
}

PdfKind parse_pdf_kind(std::string_view name)
{
  if (name == "sinc2")
    return PdfKind::sinc2;
  if (name == "sinc4mix")
    return PdfKind::sinc4mix;
  if (name == "gaussian" || name == "normal")
    return PdfKind::gaussian;
  throw ConfigError("unknown pdf kind '" + std::string(name) + "'");
}

std::string to_string(PdfKind kind)
{
  switch (kind) {
    case PdfKind::sinc2: return "sinc2";
    case PdfKind::sinc4mix: return "sinc4mix";
    case PdfKind::gaussian: return "gaussian";
  }
  return "?";
}

// ---------------------------------------------------------------- AnalyticPdf

AnalyticPdf::AnalyticPdf(PdfKind kind, double a, double b, double scale)
  : kind_(kind)
  , a_(a)
  , b_(b)
  , scale_(scale)
{
  if (kind_ == PdfKind::gaussian) {
    if (!(b_ > 0.0) || !std::isfinite(a_) || !std::isfinite(b_))
      throw DomainError("gaussian pdf needs a finite mean and positive sd");
    return;
  }
  // envelope: max of pdf/proposal, fine grid near the origin and a
  // geometric grid out to 1e7, plus a 5% margin
  double m = 0.0;
  for (double x = -60.0; x <= 60.0; x += 1e-3)
    m = std::max(m, (*this)(x) / cauchy_pdf(x));
  for (double x = 60.0; x < 1e7; x *= 1.0005) {
    m = std::max(m, (*this)(x) / cauchy_pdf(x));
    m = std::max(m, (*this)(-x) / cauchy_pdf(-x));
  }
  envelope_ = 1.05 * m;
}

AnalyticPdf AnalyticPdf::sinc2()
{
  return { PdfKind::sinc2, 0.0, 1.0, 1.5 };
}

AnalyticPdf AnalyticPdf::sinc4mix()
{
  return { PdfKind::sinc4mix, 0.0, 1.0, 2.0 };
}

AnalyticPdf AnalyticPdf::gaussian(double mean, double sd)
{
  return { PdfKind::gaussian, mean, sd, 1.0 };
}

AnalyticPdf AnalyticPdf::from_name(std::string_view name)
{
  switch (parse_pdf_kind(name)) {
    case PdfKind::sinc2: return sinc2();
    case PdfKind::sinc4mix: return sinc4mix();
    case PdfKind::gaussian: return gaussian();
  }
  throw DomainError("unknown pdf kind");
}

double AnalyticPdf::operator()(double x) const
{
  switch (kind_) {
    case PdfKind::sinc2: return 0.4 * sq(sinc(0.4 * x));
    case PdfKind::sinc4mix:
      return 0.15 * (sq(sq(sinc(0.2 * x))) + sq(sq(sinc(0.2 * x + 0.1))));
    case PdfKind::gaussian: {
      const double z = (x - a_) / b_;
      return std::exp(-0.5 * z * z) / (b_ * std::sqrt(2.0 * kPi));
    }
  }
  return 0.0;
}

double AnalyticPdf::true_cutoff() const noexcept
{
  return band_limited() ? 0.4 : std::numeric_limits<double>::infinity();
}

double AnalyticPdf::effective_cutoff() const noexcept
{
  return band_limited() ? 0.4 : 1.0 / b_;
}

std::pair<double, double> AnalyticPdf::bulk() const
{
  if (kind_ == PdfKind::gaussian)
    return { a_ - 8.0 * b_, a_ + 8.0 * b_ };
  return { -25.0, 25.0 };
}

double AnalyticPdf::cauchy_pdf(double x) const
{
  return scale_ / (kPi * (x * x + scale_ * scale_));
}

SampleSet AnalyticPdf::sample(std::size_t n, std::uint64_t seed) const
{
  if (n == 0)
    throw DomainError("sample: n must be at least 1");
  Rng rng(seed);
  std::vector<double> xs;
  xs.reserve(n);
  if (kind_ == PdfKind::gaussian) {
    for (std::size_t i = 0; i < n; ++i)
      xs.push_back(a_ + b_ * rng.normal());
  } else {
    while (xs.size() < n) {
      const double x = rng.cauchy(scale_);
      const double ratio = (*this)(x) / (envelope_ * cauchy_pdf(x));
      if (ratio > 1.0)
        throw ConfigError("sample: envelope violated at x = " + std::to_string(x));
      if (rng.uniform() < ratio)
        xs.push_back(x);
    }
  }
  return SampleSet(std::move(xs), name() + " seed=" + std::to_string(seed));
}

double pdf_eval(const AnalyticPdf& pdf, double x)
{
  return pdf(x);
}

SampleSet sample(const AnalyticPdf& pdf, std::size_t n, std::uint64_t seed)
{
  return pdf.sample(n, seed);
}

// ---------------------------------------------------------------- densities

DensityFunction as_density(const AnalyticPdf& pdf)
{
  DensityFunction d;
  d.eval = [pdf](std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
      out[i] = pdf(xs[i]);
    return out;
  };
  d.bandwidth = pdf.effective_cutoff();
  std::tie(d.lo, d.hi) = pdf.bulk();
  d.name = pdf.name();
  return d;
}

DensityFunction as_density(const BlmlFit& fit)
{
  if (fit.nodes.dim() != 1)
    throw DomainError("as_density: only 1-D fits are supported");
  const auto a = fit.amplitude_coefficients();
  auto series = std::make_shared<SincSeries>(fit.nodes, a, fit.fc);
  DensityFunction d;
  d.eval = [series](std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double g = (*series)(xs[i]);
      out[i] = g * g;
    }
    return out;
  };
  d.bandwidth = fit.fc[0];
  const auto& v = fit.nodes.values();
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  d.lo = *lo - 2.0 / fit.fc[0];
  d.hi = *hi + 2.0 / fit.fc[0];
  d.name = fit.algorithm;
  return d;
}

DensityFunction as_density(const KdeModel& model)
{
  if (model.samples.dim() != 1)
    throw DomainError("as_density: only 1-D KDE models are supported");
  auto shared = std::make_shared<KdeModel>(model);
  DensityFunction d;
  d.eval = [shared](std::span<const double> xs) { return kde_eval_1d(*shared, xs); };
  const auto& v = model.samples.values();
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (model.kind == KernelKind::sinc) {
    d.bandwidth = (*model.fc)[0];
    d.lo = *lo - 2.0 / d.bandwidth;
    d.hi = *hi + 2.0 / d.bandwidth;
  } else {
    // spacing q/5 resolves the Gaussian kernels to machine precision
    d.bandwidth = 0.5 / model.bandwidth[0];
    d.lo = *lo - 12.0 * model.bandwidth[0];
    d.hi = *hi + 12.0 * model.bandwidth[0];
  }
  d.name = to_string(model.kind);
  return d;
}

DensityFunction zero_density(const DensityFunction& like)
{
  DensityFunction d = like;
  d.eval = [](std::span<const double> xs) { return std::vector<double>(xs.size(), 0.0); };
  d.name = "zero";
  return d;
}

// ---------------------------------------------------------------- quadrature

namespace {

using Batch = std::function<std::vector<double>(std::span<const double>)>;

double grid_integral(const Batch& integrand,
                     double band,
                     double lo,
                     double hi,
                     const QuadratureSpec& quad)
{
  const double max_h = 1.0 / (10.0 * band);
  double h = max_h;
  if (quad.spacing > 0.0) {
    if (quad.spacing > max_h * (1.0 + 1e-12))
      throw DomainError("ise: grid spacing " + std::to_string(quad.spacing) +
                        " is coarser than 1/(10 f_c) = " + std::to_string(max_h));
    h = quad.spacing;
  }
  double left = lo, right = hi;
  if (quad.range) {
    left = quad.range->first;
    right = quad.range->second;
  }
  if (!(right > left))
    throw DomainError("ise: empty integration range");

  for (int round = 0;; ++round) {
    const auto count = static_cast<std::size_t>(std::ceil((right - left) / h)) + 1;
    std::vector<double> xs(count);
    for (std::size_t k = 0; k < count; ++k)
      xs[k] = left + static_cast<double>(k) * h;
    const auto f = integrand(xs);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < count; ++k)
      total += 0.5 * h * (f[k] + f[k + 1]);
    if (quad.range)
      return total;

    const double strip = std::max(0.05 * (right - left), 2.0 / band);
    double edge_left = 0.0, edge_right = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      if (xs[k] < left + strip)
        edge_left = std::max(edge_left, std::abs(f[k]));
      if (xs[k] > xs.back() - strip)
        edge_right = std::max(edge_right, std::abs(f[k]));
    }
    if (edge_left < quad.boundary_tol && edge_right < quad.boundary_tol)
      return total;
    if (round >= quad.max_expansions)
      throw DomainError("ise: integrand did not decay below the boundary tolerance");
    const double width = right - left;
    if (edge_left >= quad.boundary_tol)
      left -= width;
    if (edge_right >= quad.boundary_tol)
      right += width;
  }
}

} // namespace

double ise(const DensityFunction& a, const DensityFunction& b, const QuadratureSpec& quad)
{
  // the square of a difference doubles the frequency content, which the
  // 1/(10 f) spacing absorbs
  auto integrand = [&](std::span<const double> xs) {
    auto fa = a.eval(xs);
    const auto fb = b.eval(xs);
    for (std::size_t k = 0; k < fa.size(); ++k)
      fa[k] = sq(fa[k] - fb[k]);
    return fa;
  };
  return grid_integral(integrand, std::max(a.bandwidth, b.bandwidth), std::min(a.lo, b.lo),
                       std::max(a.hi, b.hi), quad);
}

double ise(const DensityFunction& est, const AnalyticPdf& truth, const QuadratureSpec& quad)
{
  return ise(est, as_density(truth), quad);
}

double integrate(const DensityFunction& f, const QuadratureSpec& quad)
{
  return grid_integral(f.eval, f.bandwidth, f.lo, f.hi, quad);
}

// ---------------------------------------------------------------- MISE

EstimatorKind parse_estimator_kind(std::string_view name)
{
  if (name == "trivial")
    return EstimatorKind::trivial;
  if (name == "quick")
    return EstimatorKind::quick;
  if (name == "bqp")
    return EstimatorKind::bqp;
  if (name == "kde2" || name == "gauss2")
    return EstimatorKind::kde2;
  if (name == "kde6" || name == "gauss6")
    return EstimatorKind::kde6;
  if (name == "kdesinc" || name == "sinc")
    return EstimatorKind::kdesinc;
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

std::string to_string(EstimatorKind kind)
{
  switch (kind) {
    case EstimatorKind::trivial: return "trivial";
    case EstimatorKind::quick: return "quick";
    case EstimatorKind::bqp: return "bqp";
    case EstimatorKind::kde2: return "kde2";
    case EstimatorKind::kde6: return "kde6";
    case EstimatorKind::kdesinc: return "kdesinc";
  }
  return "?";
}

bool is_blml(EstimatorKind kind)
{
  return kind == EstimatorKind::trivial || kind == EstimatorKind::quick ||
         kind == EstimatorKind::bqp;
}

DensityFunction fit_estimator(const EstimatorSpec& spec,
                              const SampleSet& samples,
                              double fc,
                              BlmlFit* blml_out)
{
  const std::size_t n = samples.size();
  auto keep = [&](BlmlFit fit) {
    auto d = as_density(fit);
    if (blml_out)
      *blml_out = std::move(fit);
    return d;
  };
  switch (spec.kind) {
    case EstimatorKind::trivial: return keep(fit_trivial(samples, fc, spec.solver));
    case EstimatorKind::quick: return keep(fit_quick(samples, fc, std::nullopt, spec.solver));
    case EstimatorKind::bqp: {
      BqpOptions o;
      o.solver = spec.solver;
      return keep(fit_bqp(samples, fc, o));
    }
    case EstimatorKind::kde2:
      return as_density(kde_fit(samples, KernelKind::gauss2,
                                kde_bandwidth(KernelKind::gauss2, fc, n, spec.kde_constant)));
    case EstimatorKind::kde6:
      return as_density(kde_fit(samples, KernelKind::gauss6,
                                kde_bandwidth(KernelKind::gauss6, fc, n, spec.kde_constant)));
    case EstimatorKind::kdesinc: return as_density(kde_fit(samples, KernelKind::sinc, fc));
  }
  throw ConfigError("unknown estimator");
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n, std::size_t rep)
{
  return derive_seed(seed, n, rep);
}

std::vector<MiseReport> mise_sweep(const std::vector<EstimatorSpec>& estimators,
                                   const AnalyticPdf& pdf,
                                   double fc,
                                   const MiseOptions& opt)
{
  if (opt.reps == 0)
    throw ConfigError("mise_sweep: reps must be at least 1");
  if (opt.sizes.empty())
    throw ConfigError("mise_sweep: no sample sizes");
  if (estimators.empty())
    throw ConfigError("mise_sweep: no estimators");
  if (!(fc > 0.0))
    throw ConfigError("mise_sweep: f_c must be positive");

  const std::size_t ne = estimators.size();
  std::vector<MiseReport> reports(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    auto& r = reports[e];
    r.estimator = estimators[e].name();
    r.pdf = pdf.name();
    r.fc = fc;
    r.sizes = opt.sizes;
    r.reps = opt.reps;
    r.seed = opt.seed;
  }
  const auto truth = as_density(pdf);
  std::mutex hook_mutex;

  for (std::size_t n : opt.sizes) {
    // value[e][rep], NaN marks a failed fit
    std::vector<std::vector<double>> value(ne, std::vector<double>(opt.reps));
    parallel_for(opt.reps, [&](std::size_t rep) {
      const auto data = pdf.sample(n, replicate_seed(opt.seed, n, rep));
      for (std::size_t e = 0; e < ne; ++e) {
        try {
          BlmlFit fit;
          const bool blml = is_blml(estimators[e].kind);
          const auto est = fit_estimator(estimators[e], data, fc, blml ? &fit : nullptr);
          value[e][rep] = ise(est, truth, opt.quad);
          if (blml && opt.on_blml_fit) {
            std::lock_guard lock(hook_mutex);
            opt.on_blml_fit(fit);
          }
        } catch (const ConvergenceError&) {
          value[e][rep] = std::numeric_limits<double>::quiet_NaN();
        }
      }
    });
    for (std::size_t e = 0; e < ne; ++e) {
      auto& r = reports[e];
      std::vector<double> ok;
      for (double v : value[e])
        if (!std::isnan(v))
          ok.push_back(v);
      const std::size_t failed = opt.reps - ok.size();
      if (10 * failed > opt.reps)
        throw Error("mise_sweep: " + r.estimator + " failed on " + std::to_string(failed) +
                    " of " + std::to_string(opt.reps) + " replicates at n = " +
                    std::to_string(n));
      const double m = ok.empty() ? std::numeric_limits<double>::quiet_NaN()
                                  : std::accumulate(ok.begin(), ok.end(), 0.0) /
                                      static_cast<double>(ok.size());
      double var = 0.0;
      for (double v : ok)
        var += sq(v - m);
      const double se = ok.size() > 1 ? std::sqrt(var / static_cast<double>(ok.size() - 1) /
                                                  static_cast<double>(ok.size()))
                                      : 0.0;
      r.mean_ise.push_back(m);
      r.stderr_ise.push_back(se);
      r.failures.push_back(failed);
      r.ise.push_back(std::move(ok));
    }
  }
  return reports;
}

double loglog_slope(const MiseReport& r)
{
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < r.sizes.size(); ++k)
    if (r.mean_ise[k] > 0.0) {
      lx.push_back(std::log(static_cast<double>(r.sizes[k])));
      ly.push_back(std::log(r.mean_ise[k]));
    }
  if (lx.size() < 2)
    throw DomainError("loglog_slope: need at least two sizes with positive ISE");
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += sq(lx[k] - mx);
  }
  if (sxx == 0.0)
    throw DomainError("loglog_slope: all sizes are equal");
  return sxy / sxx;
}

TimingResult time_estimator(const EstimatorSpec& spec,
                            const SampleSet& samples,
                            double fc,
                            std::size_t queries,
                            std::size_t repeats,
                            double budget_seconds)
{
  if (samples.dim() != 1)
    throw DomainError("time_estimator: 1-D samples only");
  const auto& v = samples.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  std::vector<double> xs(queries);
  for (std::size_t k = 0; k < queries; ++k)
    xs[k] = queries > 1 ? *lo + (*hi - *lo) * static_cast<double>(k) / static_cast<double>(queries - 1)
                        : *lo;
  volatile double sink = 0.0;
  EstimatorSpec limited = spec;
  limited.solver.time_limit = std::min(spec.solver.time_limit, budget_seconds);
  auto once = [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto d = fit_estimator(limited, samples, fc);
    const auto f = d.eval(xs);
    sink = sink + (f.empty() ? 0.0 : f[0]);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  const auto t0 = std::chrono::steady_clock::now();
  double warm;
  try {
    warm = once();
  } catch (const ConvergenceError&) {
    const double spent = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (spent < budget_seconds)
      throw;
    return { spent, 0, true };
  }
  if (warm > budget_seconds || repeats == 0)
    return { warm, 0, false };
  std::vector<double> t;
  for (std::size_t r = 0; r < repeats; ++r)
    t.push_back(once());
  std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
  return { t[t.size() / 2], repeats, false };
}

} // namespace blml
