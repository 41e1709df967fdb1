#pragma once

#include "blml/sinc.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace blml {

//! Sign pattern in {-1, +1}^n selecting one branch of rho(c) = 0.
class OrthantVector
{
public:
  OrthantVector() = default;
  //! Throws DomainError unless every entry is exactly +1 or -1.
  explicit OrthantVector(std::vector<std::int8_t> signs);

  static OrthantVector positive(std::size_t n);
  //! Bit k of `mask` set means entry k is -1.
  static OrthantVector from_mask(std::uint64_t mask, std::size_t n);

  std::size_t size() const noexcept { return signs_.size(); }
  int operator[](std::size_t i) const { return signs_[i]; }
  const std::vector<std::int8_t>& signs() const noexcept { return signs_; }

  OrthantVector flipped(std::size_t i) const;
  OrthantVector negated() const;
  //! Sum of the entries (tie-break key).
  long sum() const noexcept;
  Eigen::VectorXd as_vector() const;

  bool operator==(const OrthantVector&) const = default;

private:
  std::vector<std::int8_t> signs_;
};

//! Duplicity counts per node; all ones for unbinned fits.
using Weights = std::vector<std::size_t>;

Weights unit_weights(std::size_t n);

//! A root of rho(c) = 0 in a fixed orthant.
struct CoefficientVector
{
  Eigen::VectorXd values;
  OrthantVector orthant;
  double residual_norm = 0.0; //!< max-norm of rho at `values`
  int iterations = 0;
};

struct SolverOptions
{
  //! Max-norm tolerance on rho; 0 selects 1e-10 * n. Raised to the rounding
  //! floor of rho when some coefficients are very large.
  double tol = 0.0;
  int max_iter = 100;
  int max_halvings = 50;
  //! Up to this size the Newton system is factorized densely; beyond it the
  //! Gram matrix is replaced in the Jacobian by a pivoted partial Cholesky
  //! factor while residuals stay exact.
  std::size_t dense_limit = 1500;
  double low_rank_tol = 1e-12;
  //! Wall-clock limit in seconds, checked once per iteration; exceeding it
  //! raises ConvergenceError.
  double time_limit = std::numeric_limits<double>::infinity();
  //! Optional start point; must lie strictly inside the orthant.
  std::optional<Eigen::VectorXd> start;
};

//! rho_i = (1/n) sum_j w_j c_j s_ij - 1/c_i.
Eigen::VectorXd rho(const Eigen::VectorXd& c,
                    const GramMatrix& gram,
                    const Weights& weights,
                    std::size_t n);

//! d rho / d c = diag(1/c^2) + (1/n) S diag(w).
Eigen::MatrixXd rho_jacobian(const Eigen::VectorXd& c,
                             const GramMatrix& gram,
                             const Weights& weights,
                             std::size_t n);

//! Safeguarded Newton iteration for the unique root of rho = 0 inside
//! `orthant`. Steps are halved until the iterate keeps its signs and the
//! Euclidean residual decreases. Throws ConvergenceError on failure.
CoefficientVector solve_orthant(const GramMatrix& gram,
                                const Weights& weights,
                                std::size_t n,
                                const OrthantVector& orthant,
                                const SolverOptions& options = {});

//! log prod_i (1/c_i^2)^{w_i} = -sum_i w_i log c_i^2. Larger is better.
double likelihood_value(const Eigen::VectorXd& c, const Weights& weights);

//! True when (l_cand, cand) beats (l_best, best): higher likelihood, or a tie
//! within 1e-9 relative resolved toward the larger sign sum.
bool likelihood_prefers(double l_cand,
                        const OrthantVector& cand,
                        double l_best,
                        const OrthantVector& best);

inline constexpr std::size_t kBruteForceLimit = 20;

struct GlobalSolution
{
  CoefficientVector coefficients;
  OrthantVector orthant;
  double likelihood = 0.0;
};

//! n log(c0^T S c0) - 2 n log n, an upper bound on the log-likelihood of
//! the root in `orthant` for unit weights; -infinity if the quadratic form
//! is not positive.
double upper_bound_orthant(const OrthantVector& orthant,
                           const GramMatrix& gram,
                           std::size_t n);

//! Solves every orthant and keeps the best root. Exponential; refuses
//! n > kBruteForceLimit with RefusalError. With unit weights, an orthant
//! whose solve fails is skipped when its upper bound is below the best
//! root found; otherwise the ConvergenceError propagates.
GlobalSolution global_solve_bruteforce(const GramMatrix& gram,
                                       const Weights& weights,
                                       std::size_t n,
                                       const SolverOptions& options = {});

//! Search bookkeeping carried by fits that explore several orthants.
struct FitDiagnostics
{
  bool budget_terminated = false;
  std::size_t orthants_visited = 1;
  //! Likelihood after each accepted move (first entry is the start orthant).
  std::vector<double> likelihood_trace;
  //! c0^T S c0 of the orthant chosen by the quadratic-form phase.
  double bqp_objective = 0.0;
};

//! Fitted estimator f(x) = ((1/n) sum_b w_b c_b sinc_fc(x - x_b))^2.
struct BlmlFit
{
  SampleSet nodes;
  Weights weights;
  CoefficientVector coefficients;
  CutoffFrequency fc{ 1.0 };
  std::size_t n = 0;
  std::string algorithm;
  FitDiagnostics diagnostics;

  double log_likelihood() const { return likelihood_value(coefficients.values, weights); }
  //! Series coefficients w_b c_b / n of the square-root density.
  std::vector<double> amplitude_coefficients() const;
};

std::vector<double> eval_density(const BlmlFit& fit, const SampleSet& queries);
double eval_density(const BlmlFit& fit, std::span<const double> x);

//! Evaluates on a 1-D grid; faster than building a SampleSet per point.
std::vector<double> eval_density_1d(const BlmlFit& fit, std::span<const double> xs);

//! |c^T W S W c - n^2| / n^2 using `gram` built on the fit's nodes.
double root_identity_error(const BlmlFit& fit, const GramMatrix& gram);
double root_identity_error(const BlmlFit& fit);

//! The sequence c-bar for one sample: the root of 1/c - c f_c / n = g whose
//! sign follows g, evaluated as sign(g) 2 / (|g| + sqrt(g^2 + 4 f_c / n)).
//! At g = 0 it is +sqrt(n / f_c).
double cbar(double g, std::size_t n, double fc);

//! Integral of a 1-D fit: trapezoid rule at spacing 1/(8 f_c) over the node
//! range padded by 200/f_c, plus the averaged 1/x^2 tail beyond it.
double density_mass_1d(const BlmlFit& fit);

//! Maximum of a 1-D fit on a grid of spacing 1/(32 f_c) covering the nodes.
double density_max_1d(const BlmlFit& fit);

} // namespace blml
