#pragma once

#include "blml/sinc.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blml {

enum class KernelKind
{
  gauss2, //!< standard normal kernel
  gauss6, //!< (1/8)(15 - 10u^2 + u^4) phi(u)
  sinc    //!< sinc_fc, signed
};

//! Accepts "gauss2"/"kde2", "gauss6"/"kde6", "sinc"/"kdesinc".
KernelKind parse_kernel_kind(std::string_view name);
std::string to_string(KernelKind kind);

//! Kernel density estimate. Evaluation is lazy; fitting only stores the
//! configuration and the samples.
struct KdeModel
{
  KernelKind kind = KernelKind::gauss2;
  std::vector<double> bandwidth; //!< per dimension, Gaussian kinds
  std::optional<CutoffFrequency> fc; //!< sinc kind
  SampleSet samples;
};

//! Schedule q = (constant / f_c) n^{-1/5} (gauss2) or n^{-1/13} (gauss6).
double kde_bandwidth(KernelKind kind, double fc, std::size_t n, double constant = 0.4);

//! `bandwidth_or_fc` is the bandwidth q for Gaussian kinds and f_c for sinc.
KdeModel kde_fit(const SampleSet& samples, KernelKind kind, double bandwidth_or_fc);
KdeModel kde_fit(const SampleSet& samples,
                 KernelKind kind,
                 const std::vector<double>& bandwidth_or_fc);

std::vector<double> kde_eval(const KdeModel& model, const SampleSet& queries);
std::vector<double> kde_eval_1d(const KdeModel& model, std::span<const double> xs);

//! Kernel profile K(u) for the Gaussian kinds.
double gaussian_kernel(KernelKind kind, double u);

} // namespace blml
