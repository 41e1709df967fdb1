#pragma once

#include "blml/sample_set.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace blml {

//! Per-dimension cut-off frequency f_c, in cycles per unit of x
//! (angular cut-off is 2*pi*f_c).
class CutoffFrequency
{
public:
  CutoffFrequency(double fc); // NOLINT: implicit for the common 1-D case
  explicit CutoffFrequency(std::vector<double> fc);

  std::size_t dim() const noexcept { return fc_.size(); }
  double operator[](std::size_t j) const { return fc_[j]; }
  const std::vector<double>& values() const noexcept { return fc_; }

  //! prod_j f_c[j]: the kernel's value at zero displacement.
  double product() const noexcept;
  double max() const noexcept;

  //! Every component multiplied by `a`.
  CutoffFrequency scaled(double a) const;

  double angular(std::size_t j) const { return 2.0 * std::numbers::pi * fc_[j]; }

private:
  std::vector<double> fc_;
};

//! sin(pi fc delta) / (pi delta), equal to fc at delta = 0.
double sinc_kernel(double delta, double fc);

//! Product of per-dimension kernels.
double sinc_kernel_nd(std::span<const double> delta, const CutoffFrequency& fc);

namespace detail {

// |pi fc delta| below this uses the two-term Taylor expansion.
inline constexpr double kTaylorThreshold = 1e-8;

inline double sinc_unchecked(double delta, double fc) noexcept
{
  const double a = std::numbers::pi * fc * delta;
  if (std::abs(a) < kTaylorThreshold)
    return fc * (1.0 - a * a / 6.0);
  return std::sin(a) / (std::numbers::pi * delta);
}

inline double sinc_nd_unchecked(const double* a,
                                const double* b,
                                const CutoffFrequency& fc) noexcept
{
  double v = 1.0;
  for (std::size_t j = 0; j < fc.dim(); ++j)
    v *= sinc_unchecked(a[j] - b[j], fc[j]);
  return v;
}

} // namespace detail

//! Evaluates x -> sum_b a_b * sinc_fc(x - x_b).
//!
//! In 1-D the far-field terms are summed through the identity
//! sin(p - q) = sin p cos q - cos p sin q, leaving one division per term;
//! terms within 1/(pi fc) of the query are evaluated directly.
class SincSeries
{
public:
  SincSeries(const SampleSet& nodes,
             std::span<const double> coefficients,
             const CutoffFrequency& fc);

  double operator()(std::span<const double> x) const;
  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

  //! Evaluates at every row of `queries`.
  std::vector<double> evaluate(const SampleSet& queries) const;

private:
  double eval_1d(double x) const;

  CutoffFrequency fc_;
  SampleSet nodes_;
  std::vector<double> coef_;
  // 1-D fast path, nodes sorted ascending
  std::vector<double> xs_, a_, a_cos_, a_sin_;
  double near_ = 0.0;
};

enum class GramStorage
{
  automatic, //!< dense up to `kDenseGramLimit` nodes, implicit beyond
  dense,
  implicit
};

inline constexpr std::size_t kDenseGramLimit = 12000;

//! Symmetric matrix S with s_ij = sinc_fc(x_i - x_j).
//!
//! Dense storage is filled from the upper triangle and mirrored, so the
//! matrix equals its transpose bitwise. Implicit storage recomputes entries
//! on demand and is used when n*n doubles would not fit in memory.
class GramMatrix
{
public:
  GramMatrix(SampleSet nodes, CutoffFrequency fc, GramStorage storage);

  std::size_t size() const noexcept { return nodes_.size(); }
  const SampleSet& nodes() const noexcept { return nodes_; }
  const CutoffFrequency& cutoff() const noexcept { return fc_; }

  //! Common diagonal value prod_j f_c[j].
  double diagonal() const noexcept { return fc_.product(); }

  double operator()(std::size_t i, std::size_t j) const;

  bool is_dense() const noexcept { return dense_.has_value(); }
  //! Throws DomainError for implicit storage.
  const Eigen::MatrixXd& dense() const;

  Eigen::VectorXd multiply(const Eigen::VectorXd& v) const;
  Eigen::VectorXd column(std::size_t j) const;

  //! v^T S v.
  double quadratic_form(const Eigen::VectorXd& v) const;

  //! Diagonally pivoted partial Cholesky factor L (n x r) with
  //! S - L L^T positive semidefinite and max residual diagonal
  //! <= rel_tol * diagonal(). Returns nullopt when more than `max_rank`
  //! columns would be needed.
  std::optional<Eigen::MatrixXd> low_rank_factor(double rel_tol,
                                                 std::size_t max_rank) const;

private:
  SampleSet nodes_;
  CutoffFrequency fc_;
  std::optional<Eigen::MatrixXd> dense_;
};

//! Builds the Gram matrix of `nodes`. Throws DomainError for empty or
//! non-finite nodes or a dimension mismatch with `fc`.
GramMatrix build_gram(const SampleSet& nodes,
                      const CutoffFrequency& fc,
                      GramStorage storage = GramStorage::automatic);

} // namespace blml
