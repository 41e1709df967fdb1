#pragma once

#include "blml/kde.hpp"
#include "blml/solver.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace blml {

//! Covariate paths sampled on a uniform time grid t_k = t0 + k dt.
struct CovariateTrack
{
  double t0 = 0.0;
  double dt = 0.002;
  std::size_t steps = 0;
  std::size_t dim = 0;        //!< covariates per step (0 allowed: time grid only)
  std::vector<double> values; //!< steps x dim, row-major
  std::vector<std::string> names;

  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double t_end() const { return time(steps - 1); }
  //! Linear interpolation between grid samples; `out` has `dim` entries.
  void at(double t, std::span<double> out) const;
};

//! Event times with an observation window [t_begin, t_end]. Events before
//! t_begin may be present; they only feed the history covariate.
struct SpikeTrain
{
  std::vector<double> times;
  double t_begin = 0.0;
  double t_end = 0.0;
  CovariateTrack track;

  //! Throws DomainError unless times are strictly increasing, inside
  //! [track start, t_end], and the track covers the window.
  void validate() const;
  //! Events inside the window.
  std::size_t count() const;
  double duration() const { return t_end - t_begin; }
};

//! Chronological split at t_begin + fraction * duration. The test part keeps
//! all earlier events as history.
std::pair<SpikeTrain, SpikeTrain> split_train(const SpikeTrain& train, double fraction = 0.8);

struct CovariateConfig
{
  bool use_track = true;   //!< include the track columns
  bool use_history = true; //!< append h = log(time since last event)
};

//! Rows at the requested times with their times; rows with undefined history
//! are dropped and counted.
struct CovariateRows
{
  SampleSet rows;
  std::vector<double> times;
  std::size_t dropped = 0;
};

//! Row per time: track covariates (interpolated) then h, where h uses the
//! most recent event strictly before t.
CovariateRows build_covariates(const SpikeTrain& train,
                               std::span<const double> times,
                               const CovariateConfig& config = {});

//! Axis-aligned box holding the covariates.
struct CovariateDomain
{
  std::vector<double> lo, hi;

  std::size_t dim() const { return lo.size(); }
  bool contains(std::span<const double> row) const;
  double volume() const;
};

enum class CifBackend
{
  quick,
  kde2
};

CifBackend parse_cif_backend(std::string_view name);

struct CifOptions
{
  CifBackend backend = CifBackend::quick;
  //! Per-dimension f_c for quick, or the KDE bandwidth schedule's f_c.
  std::vector<double> fc;
  //! Optional sampling-rate override for quick.
  std::optional<std::vector<double>> fs;
  //! Bandwidth constant for kde2: q = c / f_c * n^{-1/5}.
  double kde_constant = 0.4;
  CovariateConfig covariates;
  SolverOptions solver;
  //! Minimum number of numerator rows.
  std::size_t min_events = 50;
  //! Normalization grid: at least this many points per dimension.
  std::size_t min_grid = 64;
};

//! A density estimate renormalized to unit mass on a box.
struct BoxDensity
{
  std::optional<BlmlFit> blml;
  std::optional<KdeModel> kde;
  double mass = 1.0; //!< integral of the raw estimate over the box

  std::vector<double> eval(const SampleSet& rows) const;
};

//! lambda(row) = (N/T) f_num(row) / max(f_den(row), eps), eps = 1e-12 / volume.
struct CifModel
{
  BoxDensity numerator;
  BoxDensity denominator;
  double rate = 0.0; //!< N / T, events per second
  CovariateDomain domain;
  CovariateConfig covariates;
  CifBackend backend = CifBackend::quick;
  std::size_t events = 0;
  double duration = 0.0;
  std::shared_ptr<std::atomic<std::size_t>> floor_activations =
    std::make_shared<std::atomic<std::size_t>>(0);

  double floor() const { return 1e-12 / domain.volume(); }
};

CifModel fit_cif(const SpikeTrain& train, const CovariateDomain& domain, const CifOptions& options);

//! Throws DomainError for rows outside the model domain.
double eval_cif(const CifModel& model, std::span<const double> row);
std::vector<double> eval_cif(const CifModel& model, const SampleSet& rows);

//! Integral of a density estimate over a box by the trapezoid rule on a
//! tensor grid with at least `min_points` per dimension.
double box_mass(const BoxDensity& density, const CovariateDomain& domain, std::size_t min_points);

struct KsReport
{
  std::vector<double> z;            //!< sorted rescaled variables
  std::vector<double> model_cdf;    //!< (k - 0.5) / m
  std::vector<double> empirical_cdf; //!< k / m
  double ks_distance = 0.0;
  double normalized_ks = 0.0;       //!< distance / (1.36 / sqrt(m))
  bool pass = false;                //!< normalized_ks < 1
  std::size_t clamped_rows = 0;     //!< rows pulled back into the domain
};

//! Intensity at grid time `t` with covariate row `row`.
using IntensityFn = std::function<double(double t, std::span<const double> row)>;

inline constexpr std::size_t kMinTestEvents = 20;

//! z_k = 1 - exp(-integral of lambda between consecutive window events),
//! the integral by trapezoid on the covariate grid. Refuses fewer than
//! kMinTestEvents events in the window.
KsReport time_rescale(const SpikeTrain& test,
                      const IntensityFn& intensity,
                      const CovariateConfig& config = { false, false });

//! Uses the model's covariates. Rows outside the domain are clamped onto it
//! and counted in `clamped_rows`.
KsReport time_rescale(const SpikeTrain& test, const CifModel& model);

//! Normalized KS distance of sorted values against the uniform CDF.
KsReport ks_uniform(std::vector<double> z);

// ---------------------------------------------------------------- simulation

struct OuParams
{
  std::size_t dims = 2;
  double sigma = 1.0; //!< stationary standard deviation
  double tau = 2.0;   //!< correlation time, seconds
  double dt = 0.01;
  double duration = 400.0;
  //! Positions are reflected into [-bound, bound] when set.
  std::optional<double> bound = 4.0;
};

//! Exact OU discretization started from the stationary law.
CovariateTrack simulate_ou(const OuParams& params, std::uint64_t seed);

//! Inhomogeneous Poisson events by thinning against `rate_max`; the track is
//! linearly interpolated. Throws DomainError if the rate exceeds rate_max.
SpikeTrain simulate_events(const CovariateTrack& track,
                           const std::function<double(std::span<const double>)>& rate,
                           double rate_max,
                           double duration,
                           std::uint64_t seed);

//! 1 + 9 sinc^2(0.6 (x - 0.5)) sinc^2(0.6 (y + 0.3)) events/s; peak 10.
double bump_intensity(std::span<const double> xy);

//! Homogeneous Poisson train on [0, duration] with an empty track of step dt.
SpikeTrain simulate_poisson(double rate, double duration, double dt, std::uint64_t seed);

} // namespace blml
