#include "blml/bandwidth.hpp"
#include "blml/errors.hpp"
#include "blml/pointprocess.hpp"
#include "blml/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace blml;

namespace {

SpikeTrain train_with(std::vector<double> times, double t_end, double dt = 0.01)
{
  SpikeTrain t;
  t.times = std::move(times);
  t.track.dt = dt;
  t.track.dim = 0;
  t.track.steps = static_cast<std::size_t>(std::llround(t_end / dt)) + 1;
  t.t_begin = 0.0;
  t.t_end = t_end;
  return t;
}

// model whose numerator and denominator are the same Gaussian KDE
CifModel twin_model(double rate)
{
  CifModel m;
  BoxDensity d;
  d.kde = kde_fit(SampleSet({ 0.0, 0.5, 1.0 }), KernelKind::gauss2, 0.5);
  d.mass = 1.0;
  m.numerator = d;
  m.denominator = d;
  m.rate = rate;
  m.domain = { { -3.0 }, { 4.0 } };
  return m;
}

} // namespace

TEST(BuildCovariates, HistoryExamples)
{
  CovariateConfig h{ false, true };
  const auto a = train_with({ 1.0 }, 10.0);
  const double t1[] = { 1.0 + std::exp(1.0) };
  EXPECT_NEAR(build_covariates(a, t1, h).rows(0, 0), 1.0, 1e-12);

  const auto b = train_with({ 1.0, 2.0 }, 10.0);
  const double t2[] = { 2.5 };
  EXPECT_NEAR(build_covariates(b, t2, h).rows(0, 0), std::log(0.5), 1e-12);

  const double t3[] = { 0.5, 1.0, 1.5 };
  const auto r = build_covariates(b, t3, h);
  EXPECT_EQ(r.dropped, 2u); // 0.5 has no prior event; 1.0 only itself
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.times[0], 1.5);
}

TEST(BuildCovariates, TrackInterpolation)
{
  SpikeTrain t = train_with({ 0.5 }, 1.0, 0.5);
  t.track.dim = 1;
  t.track.values = { 0.0, 2.0, 4.0 };
  const double q[] = { 0.25, 0.75 };
  const auto r = build_covariates(t, q, { true, false });
  EXPECT_NEAR(r.rows(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(r.rows(1, 0), 3.0, 1e-15);
  EXPECT_THROW(build_covariates(t, q, { false, false }), DomainError);
}

TEST(SplitTrain, KeepsHistory)
{
  const auto t = train_with({ 1.0, 3.0, 7.0, 9.0 }, 10.0);
  const auto [fit, test] = split_train(t, 0.8);
  EXPECT_EQ(fit.t_end, 8.0);
  EXPECT_EQ(fit.count(), 3u);
  EXPECT_EQ(test.t_begin, 8.0);
  EXPECT_EQ(test.count(), 1u);
  EXPECT_EQ(test.times.size(), 4u);
  EXPECT_THROW(split_train(t, 1.5), DomainError);
}

TEST(SpikeTrain, ValidateRejectsUnsorted)
{
  EXPECT_THROW(train_with({ 2.0, 1.0 }, 10.0).validate(), DomainError);
  EXPECT_THROW(train_with({ 11.0 }, 10.0).validate(), DomainError);
}

TEST(EvalCif, EqualDensitiesGiveRate)
{
  const auto m = twin_model(3.5);
  for (double x : { -1.0, 0.2, 2.0 })
    EXPECT_NEAR(eval_cif(m, std::span<const double>(&x, 1)), 3.5, 1e-12);
}

TEST(EvalCif, DoubledNumeratorDoublesRate)
{
  auto m = twin_model(2.0);
  m.numerator.mass = 0.5;
  const double x = 0.3;
  EXPECT_NEAR(eval_cif(m, std::span<const double>(&x, 1)), 4.0, 1e-12);
}

TEST(EvalCif, InvariantToCommonScale)
{
  auto m = twin_model(2.0);
  m.numerator.kde = kde_fit(SampleSet({ 0.1, 0.9 }), KernelKind::gauss2, 0.4);
  const SampleSet rows({ -1.0, 0.0, 0.7, 2.5 });
  const auto before = eval_cif(m, rows);
  m.numerator.mass *= 7.0;
  m.denominator.mass *= 7.0;
  const auto after = eval_cif(m, rows);
  for (std::size_t i = 0; i < rows.size(); ++i)
    EXPECT_NEAR(after[i], before[i], 1e-12 * before[i]);
}

TEST(EvalCif, FloorActivates)
{
  auto m = twin_model(1.0);
  m.denominator.kde = kde_fit(SampleSet({ -2.5 }), KernelKind::gauss2, 0.05);
  const double x = 3.0;
  const double num = m.numerator.eval(SampleSet({ x }))[0];
  const double v = eval_cif(m, std::span<const double>(&x, 1));
  EXPECT_LE(v, m.rate * num / m.floor() * (1.0 + 1e-12));
  EXPECT_EQ(m.floor_activations->load(), 1u);
}

TEST(EvalCif, OutsideDomainRejected)
{
  const auto m = twin_model(1.0);
  const double x = 10.0;
  EXPECT_THROW(eval_cif(m, std::span<const double>(&x, 1)), DomainError);
}

TEST(FitCif, HomogeneousPoissonHistoryOnly)
{
  const double rate = 5.0;
  const auto train = simulate_poisson(rate, 200.0, 0.002, 17);
  ASSERT_GE(train.count(), 500u);
  CifOptions o;
  o.covariates = { false, true };
  std::vector<double> ts;
  for (std::size_t k = 0; k < train.track.steps; ++k)
    ts.push_back(train.track.time(k));
  const auto rows = build_covariates(train, ts, o.covariates);
  o.fc = fc_from_gaussian_fit(rows.rows).values();
  const auto model = fit_cif(train, { { -9.0 }, { 3.0 } }, o);

  // median h over the event rows
  auto h = build_covariates(train, train.times, o.covariates).rows.values();
  std::nth_element(h.begin(), h.begin() + h.size() / 2, h.end());
  const double med = h[h.size() / 2];
  const double lam = eval_cif(model, std::span<const double>(&med, 1));
  EXPECT_NEAR(lam / rate, 1.0, 0.25) << "median h " << med;
}

TEST(FitCif, RecoversBumpShape)
{
  OuParams p;
  const auto track = simulate_ou(p, derive_seed(5, 0, 1));
  const auto train = simulate_events(track, bump_intensity, 10.0, p.duration, derive_seed(5, 0, 2));
  CifOptions o;
  o.fc = { 1.0, 1.0 };
  o.covariates = { true, false };
  const auto model = fit_cif(train, { { -4.0, -4.0 }, { 4.0, 4.0 } }, o);

  std::vector<double> est, truth;
  for (double x = -2.0; x <= 2.0; x += 0.25)
    for (double y = -2.0; y <= 2.0; y += 0.25) {
      const double row[] = { x, y };
      est.push_back(eval_cif(model, row));
      truth.push_back(bump_intensity(row));
    }
  const double n = static_cast<double>(est.size());
  const double me = std::accumulate(est.begin(), est.end(), 0.0) / n;
  const double mt = std::accumulate(truth.begin(), truth.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    sxy += (est[i] - me) * (truth[i] - mt);
    sxx += (est[i] - me) * (est[i] - me);
    syy += (truth[i] - mt) * (truth[i] - mt);
  }
  EXPECT_GE(sxy / std::sqrt(sxx * syy), 0.9);
}

TEST(FitCif, RefusesTooFewEvents)
{
  const auto train = simulate_poisson(0.2, 100.0, 0.01, 3);
  CifOptions o;
  o.covariates = { false, true };
  o.fc = { 1.0 };
  EXPECT_THROW(fit_cif(train, { { -10.0 }, { 6.0 } }, o), RefusalError);
}

TEST(TimeRescale, TrueRatePasses)
{
  int passes = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto t = simulate_poisson(4.0, 100.0, 0.01, derive_seed(70, s));
    passes += time_rescale(t, [](double, std::span<const double>) { return 4.0; }).pass;
  }
  EXPECT_GE(passes, 25);
}

TEST(TimeRescale, HalfRateFails)
{
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto t = simulate_poisson(4.0, 100.0, 0.01, derive_seed(71, s));
    ASSERT_GE(t.count(), 100u);
    EXPECT_GT(time_rescale(t, [](double, std::span<const double>) { return 2.0; }).normalized_ks, 1.0);
  }
}

TEST(TimeRescale, InvariantToTimeUnits)
{
  const auto t = simulate_poisson(4.0, 50.0, 0.01, 9);
  auto scaled = t;
  const double a = 1000.0; // seconds to milliseconds
  for (auto& x : scaled.times)
    x *= a;
  scaled.track.dt *= a;
  scaled.t_end *= a;
  const auto r1 = time_rescale(t, [](double, std::span<const double>) { return 4.0; });
  const auto r2 = time_rescale(scaled, [](double, std::span<const double>) { return 4.0 / 1000.0; });
  EXPECT_NEAR(r1.normalized_ks, r2.normalized_ks, 1e-9);
}

TEST(TimeRescale, RefusesFewEvents)
{
  const auto t = train_with({ 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 9.5 }, 10.0);
  EXPECT_THROW(time_rescale(t, [](double, std::span<const double>) { return 1.0; }), RefusalError);
}

TEST(KsUniform, CurvesAndDistance)
{
  const auto r = ks_uniform({ 0.75, 0.25 });
  EXPECT_EQ(r.z, (std::vector<double>{ 0.25, 0.75 }));
  EXPECT_EQ(r.model_cdf, (std::vector<double>{ 0.25, 0.75 }));
  EXPECT_EQ(r.empirical_cdf, (std::vector<double>{ 0.5, 1.0 }));
  EXPECT_NEAR(r.ks_distance, 0.25, 1e-15);
}

TEST(SimulateOu, StationaryMoments)
{
  OuParams p;
  p.bound.reset();
  p.duration = 2000.0;
  const auto tr = simulate_ou(p, 4);
  double m = 0.0, v = 0.0;
  for (std::size_t k = 0; k < tr.steps; ++k)
    m += tr.values[2 * k];
  m /= static_cast<double>(tr.steps);
  for (std::size_t k = 0; k < tr.steps; ++k)
    v += (tr.values[2 * k] - m) * (tr.values[2 * k] - m);
  v /= static_cast<double>(tr.steps);
  EXPECT_NEAR(m, 0.0, 0.15);
  EXPECT_NEAR(v, 1.0, 0.15);
}

TEST(SimulateOu, ReflectsAtBound)
{
  OuParams p;
  p.sigma = 3.0;
  const auto tr = simulate_ou(p, 2);
  for (double v : tr.values)
    EXPECT_LE(std::abs(v), 4.0);
}
