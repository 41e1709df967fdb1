#include "blml/pointprocess.hpp"

#include "blml/algorithms.hpp"
#include "blml/errors.hpp"
#include "blml/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace blml {

// ---------------------------------------------------------------- data

void CovariateTrack::at(double t, std::span<double> out) const
{
  if (steps == 0)
    throw DomainError("covariate track is empty");
  const double u = (t - t0) / dt;
  const double tol = 1e-9 * std::max(1.0, static_cast<double>(steps));
  if (u < -tol || u > static_cast<double>(steps - 1) + tol)
    throw DomainError("time " + std::to_string(t) + " is outside the covariate track");
  const double uc = std::clamp(u, 0.0, static_cast<double>(steps - 1));
  auto k = static_cast<std::size_t>(std::floor(uc));
  if (k + 1 >= steps)
    k = steps >= 2 ? steps - 2 : 0;
  const double a = steps >= 2 ? uc - static_cast<double>(k) : 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double lo = values[k * dim + j];
    const double hi = steps >= 2 ? values[(k + 1) * dim + j] : lo;
    out[j] = lo + a * (hi - lo);
  }
}

void SpikeTrain::validate() const
{
  if (!(t_end > t_begin))
    throw DomainError("spike train: empty observation window");
  if (track.values.size() != track.steps * track.dim)
    throw DomainError("spike train: track value count does not match steps x dim");
  if (track.steps < 2 || !(track.dt > 0.0))
    throw DomainError("spike train: track needs at least two steps and dt > 0");
  const double slack = 1e-9 * std::max(1.0, std::abs(t_end));
  if (track.t0 > t_begin + slack || track.t_end() < t_end - slack)
    throw DomainError("spike train: covariate track does not cover the window");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!std::isfinite(times[k]))
      throw DomainError("spike train: non-finite event time");
    if (k > 0 && !(times[k] > times[k - 1]))
      throw DomainError("spike train: event times must be strictly increasing");
  }
  if (!times.empty() && (times.front() < track.t0 - slack || times.back() > t_end + slack))
    throw DomainError("spike train: event outside [track start, t_end]");
}

std::size_t SpikeTrain::count() const
{
  const auto lo = std::lower_bound(times.begin(), times.end(), t_begin);
  const auto hi = std::upper_bound(times.begin(), times.end(), t_end);
  return static_cast<std::size_t>(hi - lo);
}

std::pair<SpikeTrain, SpikeTrain> split_train(const SpikeTrain& train, double fraction)
{
  if (!(fraction > 0.0 && fraction < 1.0))
    throw DomainError("split_train: fraction must lie in (0, 1)");
  const double cut = train.t_begin + fraction * train.duration();
  SpikeTrain a = train, b = train;
  a.t_end = cut;
  a.times.erase(std::upper_bound(a.times.begin(), a.times.end(), cut), a.times.end());
  b.t_begin = cut;
  return { std::move(a), std::move(b) };
}

namespace {

std::size_t row_dim(const SpikeTrain& train, const CovariateConfig& c)
{
  return (c.use_track ? train.track.dim : 0) + (c.use_history ? 1 : 0);
}

std::vector<double> window_events(const SpikeTrain& train)
{
  const auto lo = std::lower_bound(train.times.begin(), train.times.end(), train.t_begin);
  const auto hi = std::upper_bound(train.times.begin(), train.times.end(), train.t_end);
  return { lo, hi };
}

std::vector<double> window_grid(const SpikeTrain& train)
{
  std::vector<double> ts;
  const auto& tr = train.track;
  const double slack = 1e-9 * tr.dt;
  for (std::size_t k = 0; k < tr.steps; ++k) {
    const double t = tr.time(k);
    if (t >= train.t_begin - slack && t <= train.t_end + slack)
      ts.push_back(t);
  }
  return ts;
}

} // namespace

CovariateRows build_covariates(const SpikeTrain& train,
                               std::span<const double> times,
                               const CovariateConfig& config)
{
  const std::size_t d = row_dim(train, config);
  if (d == 0)
    throw DomainError("build_covariates: no covariates configured");
  const std::size_t k = config.use_track ? train.track.dim : 0;
  CovariateRows out;
  std::vector<double> values;
  values.reserve(times.size() * d);
  std::vector<double> row(d);
  for (double t : times) {
    double h = 0.0;
    if (config.use_history) {
      const auto it = std::lower_bound(train.times.begin(), train.times.end(), t);
      if (it == train.times.begin()) {
        ++out.dropped;
        continue;
      }
      h = std::log(t - *(it - 1));
    }
    if (k > 0)
      train.track.at(t, std::span<double>(row.data(), k));
    if (config.use_history)
      row[k] = h;
    values.insert(values.end(), row.begin(), row.end());
    out.times.push_back(t);
  }
  out.rows = SampleSet(d, std::move(values), "covariates");
  return out;
}

bool CovariateDomain::contains(std::span<const double> row) const
{
  if (row.size() != dim())
    return false;
  for (std::size_t j = 0; j < dim(); ++j)
    if (!(row[j] >= lo[j] && row[j] <= hi[j]))
      return false;
  return true;
}

double CovariateDomain::volume() const
{
  double v = 1.0;
  for (std::size_t j = 0; j < dim(); ++j)
    v *= hi[j] - lo[j];
  return v;
}

CifBackend parse_cif_backend(std::string_view name)
{
  if (name == "quick")
    return CifBackend::quick;
  if (name == "kde2")
    return CifBackend::kde2;
  throw ConfigError("CIF backend must be quick or kde2, not '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- densities

std::vector<double> BoxDensity::eval(const SampleSet& rows) const
{
  auto v = blml ? eval_density(*blml, rows) : kde_eval(*kde, rows);
  for (auto& x : v)
    x /= mass;
  return v;
}

double box_mass(const BoxDensity& density, const CovariateDomain& domain, std::size_t min_points)
{
  const std::size_t d = domain.dim();
  const SampleSet& nodes = density.blml ? density.blml->nodes : density.kde->samples;
  if (nodes.dim() != d)
    throw DomainError("box_mass: density and domain dimensions differ");

  // f = sum_b a_b prod_j k_j(x_j - x_bj) is separable, so its values on a
  // tensor grid follow from one G_j x B matrix per dimension
  const auto B = static_cast<Eigen::Index>(nodes.size());
  Eigen::VectorXd a(B);
  if (density.blml) {
    const auto amp = density.blml->amplitude_coefficients();
    for (Eigen::Index b = 0; b < B; ++b)
      a[b] = amp[static_cast<std::size_t>(b)];
  } else {
    a.setConstant(1.0 / static_cast<double>(B));
  }

  std::vector<Eigen::MatrixXd> mats(d);
  std::vector<Eigen::VectorXd> wts(d);
  for (std::size_t j = 0; j < d; ++j) {
    double band;
    if (density.blml)
      band = density.blml->fc[j];
    else if (density.kde->kind == KernelKind::sinc)
      band = (*density.kde->fc)[j];
    else
      band = 0.5 / density.kde->bandwidth[j];
    const double width = domain.hi[j] - domain.lo[j];
    const auto g = std::max<std::size_t>(min_points,
                                         static_cast<std::size_t>(std::ceil(width * 8.0 * band)) + 1);
    const double h = width / static_cast<double>(g - 1);
    mats[j].resize(static_cast<Eigen::Index>(g), B);
    wts[j].setConstant(static_cast<Eigen::Index>(g), h);
    wts[j][0] = wts[j][static_cast<Eigen::Index>(g - 1)] = 0.5 * h;
    for (std::size_t k = 0; k < g; ++k) {
      const double x = domain.lo[j] + static_cast<double>(k) * h;
      for (Eigen::Index b = 0; b < B; ++b) {
        const double delta = x - nodes(static_cast<std::size_t>(b), j);
        double v;
        if (density.blml)
          v = detail::sinc_unchecked(delta, density.blml->fc[j]);
        else if (density.kde->kind == KernelKind::sinc)
          v = detail::sinc_unchecked(delta, (*density.kde->fc)[j]);
        else
          v = gaussian_kernel(density.kde->kind, delta / density.kde->bandwidth[j]) /
              density.kde->bandwidth[j];
        mats[j](static_cast<Eigen::Index>(k), b) = v;
      }
    }
  }

  // iterate over all but the last dimension; the last is a matrix-vector product
  const bool square = density.blml.has_value();
  std::vector<std::size_t> idx(d, 0);
  double total = 0.0;
  for (;;) {
    Eigen::VectorXd w = a;
    double weight = 1.0;
    for (std::size_t j = 0; j + 1 < d; ++j) {
      w.array() *= mats[j].row(static_cast<Eigen::Index>(idx[j])).transpose().array();
      weight *= wts[j][static_cast<Eigen::Index>(idx[j])];
    }
    Eigen::VectorXd line = mats[d - 1] * w;
    if (square)
      line = line.cwiseAbs2();
    total += weight * line.dot(wts[d - 1]);
    std::size_t j = 0;
    for (; j + 1 < d; ++j) {
      if (++idx[j] < static_cast<std::size_t>(mats[j].rows()))
        break;
      idx[j] = 0;
    }
    if (j + 1 >= d)
      break;
  }
  return total;
}

CifModel fit_cif(const SpikeTrain& train, const CovariateDomain& domain, const CifOptions& opt)
{
  train.validate();
  const std::size_t d = row_dim(train, opt.covariates);
  if (domain.dim() != d || domain.hi.size() != d)
    throw DomainError("fit_cif: domain has " + std::to_string(domain.dim()) +
                      " dimensions, covariate rows have " + std::to_string(d));
  for (std::size_t j = 0; j < d; ++j)
    if (!(domain.hi[j] > domain.lo[j]))
      throw DomainError("fit_cif: empty domain interval");
  if (opt.fc.size() != d)
    throw DomainError("fit_cif: need one f_c per covariate dimension");

  const auto events = window_events(train);
  const auto grid = window_grid(train);
  const auto num_rows = build_covariates(train, events, opt.covariates);
  const auto den_rows = build_covariates(train, grid, opt.covariates);
  if (num_rows.rows.size() < opt.min_events)
    throw RefusalError("fit_cif: " + std::to_string(num_rows.rows.size()) +
                       " event rows, at least " + std::to_string(opt.min_events) +
                       " are required");

  CifModel model;
  model.domain = domain;
  model.covariates = opt.covariates;
  model.backend = opt.backend;
  model.events = events.size();
  model.duration = train.duration();
  model.rate = static_cast<double>(events.size()) / train.duration();

  auto fit_one = [&](const SampleSet& rows) {
    BoxDensity bd;
    const CutoffFrequency fc(opt.fc);
    if (opt.backend == CifBackend::quick) {
      bd.blml = fit_quick(rows, fc, opt.fs, opt.solver);
    } else {
      std::vector<double> q(d);
      for (std::size_t j = 0; j < d; ++j)
        q[j] = kde_bandwidth(KernelKind::gauss2, opt.fc[j], rows.size(), opt.kde_constant);
      bd.kde = kde_fit(rows, KernelKind::gauss2, q);
    }
    bd.mass = box_mass(bd, domain, opt.min_grid);
    if (!(bd.mass > 1e-6))
      throw DomainError("fit_cif: estimate has almost no mass inside the domain");
    return bd;
  };
  model.numerator = fit_one(num_rows.rows);
  model.denominator = fit_one(den_rows.rows);
  return model;
}

std::vector<double> eval_cif(const CifModel& model, const SampleSet& rows)
{
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!model.domain.contains(rows.point(i)))
      throw DomainError("eval_cif: row " + std::to_string(i) + " is outside the domain");
  const auto num = model.numerator.eval(rows);
  const auto den = model.denominator.eval(rows);
  const double eps = model.floor();
  std::vector<double> out(rows.size());
  std::size_t floored = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double dv = den[i];
    if (dv < eps) {
      dv = eps;
      ++floored;
    }
    out[i] = model.rate * num[i] / dv;
  }
  *model.floor_activations += floored;
  return out;
}

double eval_cif(const CifModel& model, std::span<const double> row)
{
  return eval_cif(model, SampleSet(row.size(), std::vector<double>(row.begin(), row.end())))[0];
}

// ---------------------------------------------------------------- time rescaling

KsReport ks_uniform(std::vector<double> z)
{
  std::sort(z.begin(), z.end());
  KsReport r;
  const std::size_t m = z.size();
  if (m == 0)
    throw DomainError("ks_uniform: no values");
  const double mm = static_cast<double>(m);
  r.model_cdf.resize(m);
  r.empirical_cdf.resize(m);
  double dist = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double kk = static_cast<double>(k);
    r.model_cdf[k] = (kk + 0.5) / mm;
    r.empirical_cdf[k] = (kk + 1.0) / mm;
    dist = std::max({ dist, (kk + 1.0) / mm - z[k], z[k] - kk / mm });
  }
  r.z = std::move(z);
  r.ks_distance = dist;
  r.normalized_ks = dist / (1.36 / std::sqrt(mm));
  r.pass = r.normalized_ks < 1.0;
  return r;
}

namespace {

// rescaled variables from intensity values on the window grid
KsReport rescale(const std::vector<double>& events,
                 const std::vector<double>& grid,
                 const std::vector<double>& lambda)
{
  // cumulative trapezoid integral on the grid
  std::vector<double> cum(grid.size(), 0.0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double seg = 0.5 * (grid[k] - grid[k - 1]) * (lambda[k] + lambda[k - 1]);
    cum[k] = cum[k - 1] + (std::isfinite(seg) ? seg : 0.0);
  }
  auto big_lambda = [&](double t) {
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    if (it == grid.begin())
      return cum.front();
    if (it == grid.end())
      return cum.back();
    const auto k = static_cast<std::size_t>(it - grid.begin());
    const double a = (t - grid[k - 1]) / (grid[k] - grid[k - 1]);
    return cum[k - 1] + a * (cum[k] - cum[k - 1]);
  };
  std::vector<double> z;
  z.reserve(events.size());
  for (std::size_t k = 1; k < events.size(); ++k)
    z.push_back(1.0 - std::exp(-(big_lambda(events[k]) - big_lambda(events[k - 1]))));
  return ks_uniform(std::move(z));
}

void require_test_events(const std::vector<double>& events)
{
  if (events.size() < kMinTestEvents)
    throw RefusalError("time_rescale: " + std::to_string(events.size()) +
                       " test events, at least " + std::to_string(kMinTestEvents) +
                       " are required");
}

} // namespace

KsReport time_rescale(const SpikeTrain& test, const IntensityFn& intensity, const CovariateConfig& config)
{
  test.validate();
  const auto events = window_events(test);
  require_test_events(events);
  const auto grid = window_grid(test);
  std::vector<double> lambda(grid.size(), std::numeric_limits<double>::quiet_NaN());
  if (row_dim(test, config) == 0) {
    for (std::size_t k = 0; k < grid.size(); ++k)
      lambda[k] = intensity(grid[k], {});
  } else {
    const auto rows = build_covariates(test, grid, config);
    // rows are in grid order with undefined-history rows skipped
    std::size_t r = 0;
    for (std::size_t k = 0; k < grid.size() && r < rows.times.size(); ++k)
      if (rows.times[r] == grid[k])
        lambda[k] = intensity(grid[k], rows.rows.point(r++));
  }
  return rescale(events, grid, lambda);
}

KsReport time_rescale(const SpikeTrain& test, const CifModel& model)
{
  test.validate();
  const auto events = window_events(test);
  require_test_events(events);
  const auto grid = window_grid(test);
  const auto rows = build_covariates(test, grid, model.covariates);
  const std::size_t d = rows.rows.dim();
  auto values = rows.rows.values();
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < rows.rows.size(); ++i) {
    bool moved = false;
    for (std::size_t j = 0; j < d; ++j) {
      double& v = values[i * d + j];
      const double c = std::clamp(v, model.domain.lo[j], model.domain.hi[j]);
      moved = moved || c != v;
      v = c;
    }
    clamped += moved;
  }
  const auto lam = eval_cif(model, SampleSet(d, std::move(values)));
  std::vector<double> lambda(grid.size(), std::numeric_limits<double>::quiet_NaN());
  std::size_t r = 0;
  for (std::size_t k = 0; k < grid.size() && r < rows.times.size(); ++k)
    if (rows.times[r] == grid[k])
      lambda[k] = lam[r++];
  auto report = rescale(events, grid, lambda);
  report.clamped_rows = clamped;
  return report;
}

// ---------------------------------------------------------------- simulation

CovariateTrack simulate_ou(const OuParams& p, std::uint64_t seed)
{
  if (!(p.sigma > 0.0) || !(p.tau > 0.0) || !(p.dt > 0.0) || !(p.duration > 0.0) || p.dims == 0)
    throw DomainError("simulate_ou: parameters must be positive");
  if (p.bound && !(*p.bound > 0.0))
    throw DomainError("simulate_ou: bound must be positive");
  Rng rng(seed);
  CovariateTrack tr;
  tr.t0 = 0.0;
  tr.dt = p.dt;
  tr.dim = p.dims;
  tr.steps = static_cast<std::size_t>(std::ceil(p.duration / p.dt - 1e-9)) + 1;
  tr.values.resize(tr.steps * tr.dim);
  for (std::size_t j = 0; j < p.dims; ++j)
    tr.names.push_back(p.dims <= 3 ? std::string(1, "xyz"[j]) : "x" + std::to_string(j + 1));
  const double decay = std::exp(-p.dt / p.tau);
  const double noise = p.sigma * std::sqrt(1.0 - decay * decay);
  auto reflect = [&](double v) {
    if (!p.bound)
      return v;
    const double b = *p.bound;
    while (v > b || v < -b)
      v = v > b ? 2.0 * b - v : -2.0 * b - v;
    return v;
  };
  for (std::size_t j = 0; j < p.dims; ++j)
    tr.values[j] = reflect(p.sigma * rng.normal());
  for (std::size_t k = 1; k < tr.steps; ++k)
    for (std::size_t j = 0; j < p.dims; ++j)
      tr.values[k * p.dims + j] =
        reflect(decay * tr.values[(k - 1) * p.dims + j] + noise * rng.normal());
  return tr;
}

SpikeTrain simulate_events(const CovariateTrack& track,
                           const std::function<double(std::span<const double>)>& rate,
                           double rate_max,
                           double duration,
                           std::uint64_t seed)
{
  if (!(rate_max > 0.0) || !(duration > 0.0))
    throw DomainError("simulate_events: rate_max and duration must be positive");
  SpikeTrain train;
  train.track = track;
  train.t_begin = track.t0;
  train.t_end = track.t0 + duration;
  Rng rng(seed);
  std::vector<double> row(track.dim);
  for (double t = track.t0 + rng.exponential(rate_max); t < train.t_end;
       t += rng.exponential(rate_max)) {
    track.at(t, row);
    const double r = rate(row);
    if (r > rate_max * (1.0 + 1e-12) || r < 0.0)
      throw DomainError("simulate_events: rate " + std::to_string(r) +
                        " outside [0, rate_max]");
    if (rng.uniform() * rate_max < r)
      train.times.push_back(t);
  }
  train.validate();
  return train;
}

double bump_intensity(std::span<const double> xy)
{
  if (xy.size() != 2)
    throw DomainError("bump_intensity: needs an (x, y) row");
  auto sinc2 = [](double u) {
    const double a = std::numbers::pi * u;
    const double s = std::abs(a) < 1e-8 ? 1.0 : std::sin(a) / a;
    return s * s;
  };
  return 1.0 + 9.0 * sinc2(0.6 * (xy[0] - 0.5)) * sinc2(0.6 * (xy[1] + 0.3));
}

SpikeTrain simulate_poisson(double rate, double duration, double dt, std::uint64_t seed)
{
  if (!(dt > 0.0))
    throw DomainError("simulate_poisson: dt must be positive");
  CovariateTrack tr;
  tr.dt = dt;
  tr.dim = 0;
  tr.steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9)) + 1;
  return simulate_events(tr, [rate](std::span<const double>) { return rate; }, rate, duration, seed);
}

} // namespace blml
