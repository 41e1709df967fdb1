#include "blml/algorithms.hpp"
#include "blml/errors.hpp"
#include "blml/surrogate.hpp"
#include "fit_checks.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace blml;

namespace {
constexpr double kSinc4mixAtZero = 0.2904174961381945;
constexpr double kSinc2Squared = 0.26666666666655265;
constexpr double kSinc4mixSquared = 0.21193286606424232;
constexpr double kGaussSquared = 0.28209479177387814;
} // namespace

TEST(AnalyticPdf, PointValues)
{
  const auto s2 = AnalyticPdf::sinc2();
  EXPECT_DOUBLE_EQ(s2(0.0), 0.4);
  EXPECT_NEAR(s2(2.5), 0.0, 1e-17);
  EXPECT_NEAR(AnalyticPdf::sinc4mix()(0.0), kSinc4mixAtZero, 1e-15);
  EXPECT_NEAR(AnalyticPdf::gaussian()(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_EQ(pdf_eval(s2, 1.0), s2(1.0));
}

TEST(AnalyticPdf, Cutoffs)
{
  EXPECT_EQ(AnalyticPdf::sinc2().true_cutoff(), 0.4);
  EXPECT_EQ(AnalyticPdf::sinc4mix().true_cutoff(), 0.4);
  EXPECT_TRUE(std::isinf(AnalyticPdf::gaussian().true_cutoff()));
  EXPECT_FALSE(AnalyticPdf::gaussian().band_limited());
  EXPECT_THROW(AnalyticPdf::from_name("laplace"), ConfigError);
}

TEST(AnalyticPdf, IntegratesToOne)
{
  for (const auto& pdf : { AnalyticPdf::sinc2(), AnalyticPdf::sinc4mix(), AnalyticPdf::gaussian() })
    EXPECT_NEAR(integrate(as_density(pdf)), 1.0, 1e-4) << pdf.name();
}

TEST(Sample, Deterministic)
{
  for (const auto& pdf : { AnalyticPdf::sinc2(), AnalyticPdf::sinc4mix(), AnalyticPdf::gaussian() }) {
    const auto a = pdf.sample(100, 7), b = pdf.sample(100, 7), c = pdf.sample(100, 8);
    EXPECT_EQ(a.values(), b.values());
    EXPECT_NE(a.values(), c.values());
  }
}

TEST(Sample, GaussianMean)
{
  const auto s = AnalyticPdf::gaussian().sample(100000, 3);
  double mean = 0.0;
  for (double x : s.values())
    mean += x;
  mean /= 1e5;
  EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(1e5));
}

TEST(Sample, Sinc2KolmogorovSmirnov)
{
  const std::size_t n = 100000;
  auto v = AnalyticPdf::sinc2().sample(n, 11).values();
  std::sort(v.begin(), v.end());

  // numeric CDF on a fine grid; the tails beyond +-L use the averaged
  // 1/x^2 envelope, mass 0.4 / (2 pi^2 0.16 L) each
  const auto pdf = AnalyticPdf::sinc2();
  const double L = 4000.0, h = 0.01;
  const double tail = 0.4 / (2.0 * std::numbers::pi * std::numbers::pi * 0.16 * L);
  const auto count = static_cast<std::size_t>(2.0 * L / h) + 1;
  std::vector<double> cdf(count);
  cdf[0] = tail;
  double prev = pdf(-L);
  for (std::size_t k = 1; k < count; ++k) {
    const double f = pdf(-L + static_cast<double>(k) * h);
    cdf[k] = cdf[k - 1] + 0.5 * h * (prev + f);
    prev = f;
  }
  auto F = [&](double x) {
    if (x <= -L)
      return 0.0;
    if (x >= L)
      return 1.0;
    const double p = (x + L) / h;
    const auto k = static_cast<std::size_t>(p);
    const double t = p - static_cast<double>(k);
    return cdf[k] + t * (cdf[std::min(k + 1, count - 1)] - cdf[k]);
  };
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = F(v[i]);
    d = std::max({ d, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n) });
  }
  EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(Ise, SelfIsZero)
{
  const auto p = AnalyticPdf::sinc4mix();
  EXPECT_NEAR(ise(as_density(p), p), 0.0, 1e-20);
}

TEST(Ise, ZeroAgainstTruthIsSquaredIntegral)
{
  const auto d2 = as_density(AnalyticPdf::sinc2());
  EXPECT_NEAR(ise(zero_density(d2), AnalyticPdf::sinc2()), kSinc2Squared, 1e-8);
  const auto d4 = as_density(AnalyticPdf::sinc4mix());
  EXPECT_NEAR(ise(zero_density(d4), AnalyticPdf::sinc4mix()), kSinc4mixSquared, 1e-8);
  const auto dg = as_density(AnalyticPdf::gaussian());
  EXPECT_NEAR(ise(zero_density(dg), AnalyticPdf::gaussian()), kGaussSquared, 1e-10);
}

TEST(Ise, IdenticalSingleNodeFits)
{
  const auto a = fit_trivial(SampleSet({ 0.0 }), 0.8);
  const auto b = fit_trivial(SampleSet({ 0.0 }), 0.8);
  EXPECT_NEAR(ise(as_density(a), as_density(b)), 0.0, 1e-20);
}

TEST(Ise, RejectsCoarseGrid)
{
  QuadratureSpec q;
  q.spacing = 10.0;
  const auto p = AnalyticPdf::sinc2();
  EXPECT_THROW(ise(zero_density(as_density(p)), p, q), DomainError);
}

TEST(MiseSweep, SingleReplicate)
{
  MiseOptions o;
  o.sizes = { 200 };
  o.reps = 1;
  const auto r = mise_sweep({ EstimatorSpec{} }, AnalyticPdf::sinc4mix(), 0.8, o);
  ASSERT_EQ(r.size(), 1u);
  ASSERT_EQ(r[0].ise[0].size(), 1u);
  EXPECT_EQ(r[0].stderr_ise[0], 0.0);
  EXPECT_EQ(r[0].mean_ise[0], r[0].ise[0][0]);
}

TEST(MiseSweep, ConfigErrors)
{
  MiseOptions o;
  o.sizes = { 100 };
  o.reps = 0;
  EXPECT_THROW(mise_sweep({ EstimatorSpec{} }, AnalyticPdf::sinc2(), 0.8, o), ConfigError);
  o.reps = 2;
  o.sizes.clear();
  EXPECT_THROW(mise_sweep({ EstimatorSpec{} }, AnalyticPdf::sinc2(), 0.8, o), ConfigError);
  o.sizes = { 100 };
  EXPECT_THROW(mise_sweep({}, AnalyticPdf::sinc2(), 0.8, o), ConfigError);
  EXPECT_THROW(mise_sweep({ EstimatorSpec{} }, AnalyticPdf::sinc2(), -1.0, o), ConfigError);
  EXPECT_THROW(parse_estimator_kind("kde4"), ConfigError);
}

TEST(MiseSweep, DeterministicAndSharedData)
{
  MiseOptions o;
  o.sizes = { 100, 300 };
  o.reps = 3;
  o.seed = 5;
  std::vector<BlmlFit> fits;
  o.on_blml_fit = [&](const BlmlFit& f) { fits.push_back(f); };
  EstimatorSpec t, k;
  k.kind = EstimatorKind::kde2;
  const auto a = mise_sweep({ t, k }, AnalyticPdf::sinc4mix(), 0.8, o);
  o.on_blml_fit = nullptr;
  const auto b = mise_sweep({ t, k }, AnalyticPdf::sinc4mix(), 0.8, o);
  EXPECT_EQ(a[0].mean_ise, b[0].mean_ise);
  EXPECT_EQ(a[1].mean_ise, b[1].mean_ise);
  EXPECT_EQ(fits.size(), 6u);
  for (const auto& f : fits) {
    const auto chk = checks::check_fit(f);
    EXPECT_TRUE(chk.ok) << chk.message;
  }
}

TEST(LoglogSlope, ExactPowerLaw)
{
  MiseReport r;
  r.sizes = { 10, 100, 1000 };
  r.mean_ise = { 1e-1, 1e-2, 1e-3 };
  EXPECT_NEAR(loglog_slope(r), -1.0, 1e-12);
}

TEST(TimeEstimator, ReportsRuns)
{
  const auto s = AnalyticPdf::sinc4mix().sample(300, 1);
  EstimatorSpec q;
  q.kind = EstimatorKind::quick;
  const auto t = time_estimator(q, s, 0.8, 100, 3);
  EXPECT_EQ(t.runs, 3u);
  EXPECT_GT(t.seconds, 0.0);
  const auto censored = time_estimator(q, s, 0.8, 100, 3, 0.0);
  EXPECT_EQ(censored.runs, 0u);
}
