#pragma once

#include "blml/kde.hpp"
#include "blml/solver.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blml {

// ---------------------------------------------------------------- analytic pdfs

enum class PdfKind
{
  sinc2,    //!< 0.4 sinc^2(0.4 x)
  sinc4mix, //!< 0.15 (sinc^4(0.2 x) + sinc^4(0.2 x + 0.1))
  gaussian  //!< normal(mean, sd)
};

PdfKind parse_pdf_kind(std::string_view name);
std::string to_string(PdfKind kind);

//! Normalized sinc, sin(pi u) / (pi u).
double sinc(double u);

//! Closed-form test density with an exact sampler. Band-limited kinds are
//! drawn by rejection from a Cauchy(0, scale) proposal whose envelope
//! constant is measured on a dense grid at construction.
class AnalyticPdf
{
public:
  static AnalyticPdf sinc2();
  static AnalyticPdf sinc4mix();
  static AnalyticPdf gaussian(double mean = 0.0, double sd = 1.0);
  //! "sinc2", "sinc4mix" or "gaussian" (standard normal).
  static AnalyticPdf from_name(std::string_view name);

  PdfKind kind() const noexcept { return kind_; }
  std::string name() const { return to_string(kind_); }

  double operator()(double x) const;

  //! Highest frequency of the Fourier transform; +infinity for gaussian.
  double true_cutoff() const noexcept;
  bool band_limited() const noexcept { return kind_ != PdfKind::gaussian; }
  //! Finite frequency scale used for grids: true_cutoff(), or 1/sd.
  double effective_cutoff() const noexcept;
  //! Interval holding all but a negligible part of the mass.
  std::pair<double, double> bulk() const;

  double cauchy_scale() const noexcept { return scale_; }
  double envelope_constant() const noexcept { return envelope_; }

  //! n i.i.d. draws; a pure function of (n, seed). Throws ConfigError if a
  //! draw violates the envelope.
  SampleSet sample(std::size_t n, std::uint64_t seed) const;

private:
  AnalyticPdf(PdfKind kind, double a, double b, double scale);
  double cauchy_pdf(double x) const;

  PdfKind kind_;
  double a_ = 0.0, b_ = 1.0; // gaussian mean and sd
  double scale_ = 1.0;
  double envelope_ = 1.0;
};

double pdf_eval(const AnalyticPdf& pdf, double x);
SampleSet sample(const AnalyticPdf& pdf, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------- ISE

//! A 1-D density that can be evaluated in batches.
struct DensityFunction
{
  std::function<std::vector<double>(std::span<const double>)> eval;
  //! Highest frequency present (cycles per unit); sets the grid spacing.
  double bandwidth = 1.0;
  //! Interval where the density is concentrated; the start of the grid.
  double lo = -1.0, hi = 1.0;
  std::string name;
};

DensityFunction as_density(const AnalyticPdf& pdf);
DensityFunction as_density(const BlmlFit& fit);
DensityFunction as_density(const KdeModel& model);
//! The zero function (bandwidth and bulk borrowed from `like`).
DensityFunction zero_density(const DensityFunction& like);

struct QuadratureSpec
{
  //! Grid spacing; 0 picks 1/(10 * max bandwidth). Larger values are
  //! rejected.
  double spacing = 0.0;
  //! Fixed range; when absent the range is grown until the integrand in
  //! both boundary strips is below `boundary_tol`.
  std::optional<std::pair<double, double>> range;
  double boundary_tol = 1e-12;
  int max_expansions = 40;
};

//! Trapezoid integral of (a - b)^2.
double ise(const DensityFunction& a, const DensityFunction& b, const QuadratureSpec& quad = {});
double ise(const DensityFunction& est, const AnalyticPdf& truth, const QuadratureSpec& quad = {});

//! Integral of `f` by the same grid rules.
double integrate(const DensityFunction& f, const QuadratureSpec& quad = {});

// ---------------------------------------------------------------- MISE

enum class EstimatorKind
{
  trivial,
  quick,
  bqp,
  kde2,
  kde6,
  kdesinc
};

EstimatorKind parse_estimator_kind(std::string_view name);
std::string to_string(EstimatorKind kind);
bool is_blml(EstimatorKind kind);

struct EstimatorSpec
{
  EstimatorKind kind = EstimatorKind::trivial;
  //! Bandwidth constant c in q = (c / f_c) n^{-1/5} or n^{-1/13}.
  double kde_constant = 0.4;
  SolverOptions solver;

  std::string name() const { return to_string(kind); }
};

//! Fits `spec` at cut-off `fc` (the KDE bandwidth schedules use the same f_c).
//! `blml_out`, if given, receives the BLML fit.
DensityFunction fit_estimator(const EstimatorSpec& spec,
                              const SampleSet& samples,
                              double fc,
                              BlmlFit* blml_out = nullptr);

struct MiseReport
{
  std::string estimator;
  std::string pdf;
  double fc = 0.0;
  std::vector<std::size_t> sizes;
  std::vector<double> mean_ise;
  std::vector<double> stderr_ise; //!< sample sd / sqrt(reps)
  std::vector<std::size_t> failures;
  std::vector<std::vector<double>> ise; //!< per size, per successful replicate
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

struct MiseOptions
{
  std::vector<std::size_t> sizes;
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  QuadratureSpec quad;
  //! Called for every converged BLML fit (serialized across threads).
  std::function<void(const BlmlFit&)> on_blml_fit;
};

//! Seed of replicate `rep` at size `n`; every estimator sees the same data.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n, std::size_t rep);

//! One report per estimator. Fit failures are excluded and counted; more
//! than 10% failures at any size aborts with Error.
std::vector<MiseReport> mise_sweep(const std::vector<EstimatorSpec>& estimators,
                                   const AnalyticPdf& pdf,
                                   double fc,
                                   const MiseOptions& options);

//! Least-squares slope of log(mean ISE) against log n.
double loglog_slope(const MiseReport& report);

struct TimingResult
{
  double seconds = 0.0; //!< median over the timed runs
  std::size_t runs = 0; //!< timed runs (0: only the warm-up ran)
  bool censored = false; //!< the warm-up hit the budget; seconds is a lower bound
};

//! Wall time of fitting `spec` and evaluating it at `queries` evenly spaced
//! points over the sample range. One warm-up run is excluded and the median
//! of `repeats` runs is reported. When the warm-up alone exceeds
//! `budget_seconds`, its time is reported with runs = 0. BLML solves are
//! stopped at the budget; such results are flagged `censored`.
TimingResult time_estimator(const EstimatorSpec& spec,
                            const SampleSet& samples,
                            double fc,
                            std::size_t queries = 1000,
                            std::size_t repeats = 3,
                            double budget_seconds = std::numeric_limits<double>::infinity());

} // namespace blml
