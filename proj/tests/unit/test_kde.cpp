#include "blml/errors.hpp"
#include "blml/kde.hpp"
#include "blml/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace blml;

namespace {
constexpr double kGauss2AtZero = 0.39894228040143268;
constexpr double kGauss6AtZero = 0.74801677575268627;
} // namespace

TEST(KdeBandwidth, Schedules)
{
  EXPECT_NEAR(kde_bandwidth(KernelKind::gauss2, 1.0, 32), 0.2, 1e-15);
  EXPECT_NEAR(kde_bandwidth(KernelKind::gauss6, 1.0, 8192), 0.2, 1e-15);
  EXPECT_NEAR(kde_bandwidth(KernelKind::gauss2, 2.0, 32), 0.1, 1e-15);
  EXPECT_THROW(kde_bandwidth(KernelKind::sinc, 1.0, 32), DomainError);
}

TEST(KdeFit, SincStoresCutoff)
{
  const auto m = kde_fit(SampleSet({ 0.0, 1.0 }), KernelKind::sinc, 2.0);
  ASSERT_TRUE(m.fc.has_value());
  EXPECT_EQ((*m.fc)[0], 2.0);
}

TEST(KdeFit, RejectsBadInput)
{
  EXPECT_THROW(kde_fit(SampleSet({ 0.0 }), KernelKind::gauss2, 0.0), DomainError);
  EXPECT_THROW(kde_fit(SampleSet(std::vector<double>{}), KernelKind::gauss2, 1.0), DomainError);
  EXPECT_THROW(parse_kernel_kind("epanechnikov"), DomainError);
}

TEST(KdeEval, SingleSampleValues)
{
  const SampleSet one({ 0.0 });
  EXPECT_NEAR(kde_eval(kde_fit(one, KernelKind::gauss2, 1.0), SampleSet({ 0.0 }))[0], kGauss2AtZero, 1e-15);
  EXPECT_NEAR(kde_eval(kde_fit(one, KernelKind::gauss6, 1.0), SampleSet({ 0.0 }))[0], kGauss6AtZero, 1e-15);
  EXPECT_NEAR(kde_eval(kde_fit(one, KernelKind::sinc, 1.0), SampleSet({ 0.5 }))[0], 2.0 / std::numbers::pi,
              1e-15);
}

TEST(KdeEval, MatchesBruteForce)
{
  Rng rng(7);
  std::vector<double> v(300);
  for (auto& x : v)
    x = rng.normal();
  const SampleSet s(v);
  for (auto kind : { KernelKind::gauss2, KernelKind::gauss6 }) {
    const auto m = kde_fit(s, kind, 0.3);
    for (double x : { -3.0, -0.4, 0.0, 1.7, 5.0 }) {
      double direct = 0.0;
      for (double xi : v)
        direct += gaussian_kernel(kind, (x - xi) / 0.3) / 0.3;
      direct /= 300.0;
      EXPECT_NEAR(kde_eval_1d(m, std::span<const double>(&x, 1))[0], direct, 1e-13);
    }
  }
}

TEST(KdeEval, Gauss2IntegratesToOne)
{
  Rng rng(8);
  std::vector<double> v(100);
  for (auto& x : v)
    x = 2.0 * rng.normal();
  const auto m = kde_fit(SampleSet(v), KernelKind::gauss2, 0.5);
  std::vector<double> xs;
  const double h = 0.01;
  for (double x = -20.0; x <= 20.0; x += h)
    xs.push_back(x);
  double mass = 0.0;
  for (double f : kde_eval_1d(m, xs))
    mass += f * h;
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(KdeEval, ProductKernelInTwoDimensions)
{
  const auto m = kde_fit(SampleSet(2, { 0.0, 0.0 }), KernelKind::gauss2, std::vector<double>{ 1.0, 2.0 });
  const double v = kde_eval(m, SampleSet(2, { 0.0, 0.0 }))[0];
  EXPECT_NEAR(v, kGauss2AtZero * kGauss2AtZero / 2.0, 1e-15);
}

TEST(GaussianKernel, SixthOrderMoments)
{
  // unit mass and vanishing second and fourth moments
  double m0 = 0.0, m2 = 0.0, m4 = 0.0;
  const double h = 1e-3;
  for (double u = -15.0; u <= 15.0; u += h) {
    const double k = gaussian_kernel(KernelKind::gauss6, u) * h;
    m0 += k;
    m2 += u * u * k;
    m4 += u * u * u * u * k;
  }
  EXPECT_NEAR(m0, 1.0, 1e-9);
  EXPECT_NEAR(m2, 0.0, 1e-9);
  EXPECT_NEAR(m4, 0.0, 1e-8);
}
