#pragma once

#include "blml/solver.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blml {

//! 1/sigma per dimension, sigma the maximum-likelihood standard deviation
//! (divisor n). Needs n >= 2 and nonzero spread.
CutoffFrequency fc_from_gaussian_fit(const SampleSet& samples);

enum class ScanAlgorithm
{
  trivial,
  quick
};

ScanAlgorithm parse_scan_algorithm(std::string_view name);

//! MNLL = -(1/n) sum_i w_i log c_i^2 (mean log f-hat at the samples) as a
//! function of f_c.
struct MnllScan
{
  std::vector<double> fc;
  std::vector<double> mnll;           //!< NaN where the fit failed
  std::vector<double> dmnll_fd;       //!< central differences (one-sided at the ends)
  std::vector<double> dmnll_analytic; //!< (1/n^2) (Wc)^T O (Wc)
  std::vector<bool> valid;
  std::size_t n = 0;
  std::string algorithm;
};

//! The fit's log-likelihood divided by n.
double mnll(const BlmlFit& fit);

//! d MNLL / d f_c at fixed nodes: (1/n^2) sum_ij w_i c_i w_j c_j
//! cos(pi f_c (x_i - x_j)). 1-D only.
double mnll_derivative(const BlmlFit& fit);

//! Fits every candidate of `fc_grid` (1-D samples). Failed candidates are
//! marked invalid. Needs a strictly increasing grid of at least 3 points.
MnllScan mnll_scan(const SampleSet& samples,
                   const std::vector<double>& fc_grid,
                   ScanAlgorithm algorithm = ScanAlgorithm::trivial,
                   const SolverOptions& options = {},
                   const std::function<void(const BlmlFit&)>& on_fit = nullptr);

//! `points` log-spaced values spanning [f/8, 8f], f from fc_from_gaussian_fit.
std::vector<double> default_fc_grid(const SampleSet& samples, std::size_t points = 24);

//! Grid point maximizing slope(left 2 steps) / slope(right 2 steps) over the
//! valid points of the MNLL curve; ties go to the smaller f_c. Throws
//! DomainError with fewer than 5 valid points and when no ratio exceeds 1.
double detect_knee(const MnllScan& scan);
double detect_knee(std::span<const double> fc, std::span<const double> curve);

} // namespace blml
