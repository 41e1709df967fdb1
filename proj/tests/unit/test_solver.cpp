#include "blml/algorithms.hpp"
#include "blml/errors.hpp"
#include "blml/rng.hpp"
#include "blml/solver.hpp"
#include "blml/surrogate.hpp"
#include "fit_checks.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace blml;

namespace {

// frozen from the high-precision oracle script
constexpr double kCPlusPlus = 1.1054550830781478;
constexpr double kCPlusMinus = 2.3460342682425202;
constexpr double kLogLikPlusPlus = -0.40102836030668956;
constexpr double kLogLikPlusMinus = -3.4109054288743982;
constexpr double kLogLikIdentity3 = -3.2958368660043291;

Eigen::VectorXd vec(std::initializer_list<double> v)
{
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v)
    out[k++] = x;
  return out;
}

} // namespace

TEST(Rho, SingleNodeExactRoot)
{
  const auto g = build_gram(SampleSet({ 0.0 }), 1.0);
  EXPECT_NEAR(rho(vec({ 1.0 }), g, unit_weights(1), 1)[0], 0.0, 1e-15);
  EXPECT_NEAR(rho(vec({ 2.0 }), g, unit_weights(1), 1)[0], 1.5, 1e-15);
}

TEST(Rho, TwoNodeClosedForm)
{
  const auto g = build_gram(SampleSet({ 0.0, 0.5 }), 1.0);
  const auto r = rho(vec({ kCPlusPlus, kCPlusPlus }), g, unit_weights(2), 2);
  EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Rho, ZeroCoefficientRejected)
{
  const auto g = build_gram(SampleSet({ 0.0, 0.5 }), 1.0);
  EXPECT_THROW(rho(vec({ 1.0, 0.0 }), g, unit_weights(2), 2), DomainError);
}

TEST(RhoJacobian, MatchesCentralDifferences)
{
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + trial % 5;
    std::vector<double> v(n);
    for (auto& x : v)
      x = 2.0 * rng.normal();
    const auto g = build_gram(SampleSet(v), 0.8);
    Weights w(n);
    for (auto& x : w)
      x = 1 + rng.bits() % 3;
    Eigen::VectorXd c(n);
    for (std::size_t i = 0; i < n; ++i)
      c[i] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * (0.5 + rng.uniform());
    const auto J = rho_jacobian(c, g, w, n);
    for (std::size_t j = 0; j < n; ++j) {
      const double h = 1e-6 * std::abs(c[j]);
      Eigen::VectorXd cp = c, cm = c;
      cp[j] += h;
      cm[j] -= h;
      const Eigen::VectorXd fd = (rho(cp, g, w, n) - rho(cm, g, w, n)) / (2.0 * h);
      EXPECT_LE((fd - J.col(j)).norm(), 1e-5 * J.col(j).norm()) << trial << "," << j;
    }
  }
}

TEST(SolveOrthant, IdentityGram)
{
  const auto g = build_gram(SampleSet({ 0.0, 1.0, 2.0 }), 1.0);
  const auto c = solve_orthant(g, unit_weights(3), 3, OrthantVector::positive(3));
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(c.values[i], std::sqrt(3.0), 1e-12);
}

TEST(SolveOrthant, TwoNodeOrthants)
{
  const auto g = build_gram(SampleSet({ 0.0, 0.5 }), 1.0);
  // default stop is |rho| <= 1e-10 n, which bounds the coefficient error near 1e-10
  const auto pp = solve_orthant(g, unit_weights(2), 2, OrthantVector({ 1, 1 }));
  EXPECT_NEAR(pp.values[0], kCPlusPlus, 1e-9);
  EXPECT_NEAR(pp.values[1], kCPlusPlus, 1e-9);
  const auto pm = solve_orthant(g, unit_weights(2), 2, OrthantVector({ 1, -1 }));
  EXPECT_NEAR(pm.values[0], kCPlusMinus, 1e-9);
  EXPECT_NEAR(pm.values[1], -kCPlusMinus, 1e-9);
  EXPECT_LT(rho(pm.values, g, unit_weights(2), 2).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SolveOrthant, TightToleranceReachesOracle)
{
  const auto g = build_gram(SampleSet({ 0.0, 0.5 }), 1.0);
  SolverOptions o;
  o.tol = 1e-14;
  const auto pp = solve_orthant(g, unit_weights(2), 2, OrthantVector({ 1, 1 }), o);
  EXPECT_NEAR(pp.values[0], kCPlusPlus, 1e-13);
  EXPECT_LT(rho(pp.values, g, unit_weights(2), 2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveOrthant, SignsMatchOrthant)
{
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + trial % 6;
    std::vector<double> v(n);
    for (auto& x : v)
      x = 3.0 * rng.normal();
    const auto g = build_gram(SampleSet(v), 0.8);
    const auto o = OrthantVector::from_mask(rng.bits(), n);
    const auto c = solve_orthant(g, unit_weights(n), n, o);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NE(c.values[i], 0.0);
      EXPECT_EQ(c.values[i] > 0.0 ? 1 : -1, o[i]);
    }
    EXPECT_LE(c.residual_norm, 1e-10 * static_cast<double>(n));
  }
}

TEST(SolveOrthant, IterationCapRaisesWithBestIterate)
{
  Rng rng(43);
  std::vector<double> v(12);
  for (auto& x : v)
    x = 0.3 * rng.normal();
  const auto g = build_gram(SampleSet(v), 0.8);
  SolverOptions o;
  o.max_iter = 1;
  try {
    solve_orthant(g, unit_weights(12), 12, OrthantVector::from_mask(0x5a5, 12), o);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.best_iterate().size(), 12u);
    EXPECT_GT(e.best_residual(), 0.0);
  }
}

TEST(LikelihoodValue, Examples)
{
  EXPECT_DOUBLE_EQ(likelihood_value(vec({ 1.0 }), unit_weights(1)), 0.0);
  const double r3 = std::sqrt(3.0);
  EXPECT_NEAR(likelihood_value(vec({ r3, r3, r3 }), unit_weights(3)), kLogLikIdentity3, 1e-14);
  EXPECT_NEAR(likelihood_value(vec({ kCPlusPlus, kCPlusPlus }), unit_weights(2)), kLogLikPlusPlus, 1e-14);
  EXPECT_NEAR(likelihood_value(vec({ kCPlusMinus, -kCPlusMinus }), unit_weights(2)), kLogLikPlusMinus, 1e-14);
}

TEST(LikelihoodValue, InvariantUnderGlobalSignFlip)
{
  EXPECT_EQ(likelihood_value(vec({ 1.2, -0.7, 3.0 }), { 1, 2, 1 }),
            likelihood_value(vec({ -1.2, 0.7, -3.0 }), { 1, 2, 1 }));
}

TEST(GlobalSolve, TwoNodesPrefersPositive)
{
  const auto g = build_gram(SampleSet({ 0.0, 0.5 }), 1.0);
  const auto s = global_solve_bruteforce(g, unit_weights(2), 2);
  EXPECT_EQ(s.orthant, OrthantVector({ 1, 1 }));
  EXPECT_NEAR(s.likelihood, kLogLikPlusPlus, 1e-9);
}

TEST(GlobalSolve, IdentityTieGoesPositive)
{
  const auto g = build_gram(SampleSet({ 0.0, 1.0, 2.0 }), 1.0);
  const auto s = global_solve_bruteforce(g, unit_weights(3), 3);
  EXPECT_EQ(s.orthant, OrthantVector::positive(3));
}

TEST(GlobalSolve, SingleNode)
{
  const auto g = build_gram(SampleSet({ 0.0 }), 4.0);
  const auto s = global_solve_bruteforce(g, unit_weights(1), 1);
  EXPECT_NEAR(s.coefficients.values[0], 0.5, 1e-14);
}

TEST(GlobalSolve, SkipsDegenerateOrthantsByBound)
{
  // clustered nodes at a low cut-off; several mixed orthants have roots
  // with |c| > 1e8 that the solver cannot resolve
  const auto s = AnalyticPdf::sinc4mix().sample(8, derive_seed(103, 64));
  const auto g = build_gram(s, 0.4);
  int failed = 0;
  for (unsigned mask = 0; mask < 256; ++mask) {
    try {
      solve_orthant(g, unit_weights(8), 8, OrthantVector::from_mask(mask, 8));
    } catch (const ConvergenceError&) {
      ++failed;
      EXPECT_LT(upper_bound_orthant(OrthantVector::from_mask(mask, 8), g, 8), -30.0);
    }
  }
  EXPECT_GT(failed, 0);
  const auto best = global_solve_bruteforce(g, unit_weights(8), 8);
  EXPECT_GT(best.likelihood, -13.0);
  EXPECT_THROW(global_solve_bruteforce(g, Weights(8, 2), 16), ConvergenceError);
}

TEST(GlobalSolve, RefusesLargeN)
{
  std::vector<double> v(kBruteForceLimit + 1);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = 0.37 * static_cast<double>(i);
  const auto g = build_gram(SampleSet(v), 1.0);
  EXPECT_THROW(global_solve_bruteforce(g, unit_weights(v.size()), v.size()), RefusalError);
}

TEST(EvalDensity, SingleNodeFit)
{
  const auto fit = fit_trivial(SampleSet({ 0.0 }), 1.0);
  const double zero = 0.0;
  EXPECT_NEAR(eval_density(fit, std::span<const double>(&zero, 1)), 1.0, 1e-14);
  for (double k : { -2.0, 1.0, 3.0 })
    EXPECT_NEAR(eval_density(fit, std::span<const double>(&k, 1)), 0.0, 1e-28);
}

TEST(EvalDensity, IdentityFit)
{
  const auto fit = fit_trivial(SampleSet({ 0.0, 1.0, 2.0 }), 1.0);
  const double zero = 0.0;
  EXPECT_NEAR(eval_density(fit, std::span<const double>(&zero, 1)), 1.0 / 3.0, 1e-12);
}

TEST(EvalDensity, NonNegativeAndBounded)
{
  const auto samples = AnalyticPdf::sinc2().sample(200, 4);
  const auto fit = fit_trivial(samples, 0.8);
  std::vector<double> xs;
  for (double x = -40.0; x <= 40.0; x += 0.01)
    xs.push_back(x);
  for (double f : eval_density_1d(fit, xs)) {
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 0.8 * (1.0 + 1e-6));
  }
}

TEST(RootIdentity, HoldsAtConvergedFits)
{
  for (std::uint64_t seed : { 1u, 2u, 3u }) {
    const auto fit = fit_trivial(AnalyticPdf::sinc4mix().sample(300, seed), 0.8);
    const auto chk = checks::check_fit(fit);
    EXPECT_TRUE(chk.ok) << chk.message;
  }
}

TEST(Cbar, ClosedFormProperties)
{
  Rng rng(51);
  for (int i = 0; i < 2000; ++i) {
    const double g = 10.0 * rng.normal();
    const std::size_t n = 1 + rng.bits() % 100000;
    const double fc = 0.05 + 5.0 * rng.uniform();
    const double c = cbar(g, n, fc);
    const double nn = static_cast<double>(n);
    EXPECT_NEAR(1.0 / c - c * fc / nn, g, 1e-10 * std::max(1.0, std::abs(g)));
    // divided through by n / f_c so both sides are O(1)
    EXPECT_NEAR(c * c * fc / nn, 1.0 - c * g, 1e-10);
    EXPECT_GE(1.0 - c * g, 0.0);
    EXPECT_LE(1.0 - c * g, 1.0);
  }
  EXPECT_NEAR(cbar(0.0, 100, 4.0), 5.0, 1e-14);
  EXPECT_THROW(cbar(1.0, 0, 1.0), DomainError);
  EXPECT_THROW(cbar(1.0, 5, 0.0), DomainError);
}
