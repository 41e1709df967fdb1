#pragma once

#include "blml/solver.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace blml {

//! Samples snapped to a grid of spacing 1/f_s, merged with duplicity counts.
struct BinnedSamples
{
  SampleSet centers;                    //!< unique bin centres, sorted
  std::vector<std::int64_t> indices;    //!< grid index per centre and dim (row-major)
  Weights counts;                       //!< n_b per centre
  std::vector<double> fs;               //!< sampling rate per dimension
  std::size_t n = 0;                    //!< original sample count
};

//! Rounds every coordinate to the nearest multiple of 1/f_s (halves round
//! up) and merges duplicates. Centres are sorted lexicographically.
BinnedSamples bin_samples(const SampleSet& samples, const std::vector<double>& fs);
BinnedSamples bin_samples(const SampleSet& samples, double fs);

//! max(f_c n^{1/4}, 2.0001 f_c) per dimension.
std::vector<double> default_sampling_rate(const CutoffFrequency& fc, std::size_t n);

//! Solve in the all-positive orthant on the raw samples.
BlmlFit fit_trivial(const SampleSet& samples,
                    const CutoffFrequency& fc,
                    const SolverOptions& options = {});

//! Bin at f_s (default `default_sampling_rate`), then solve the weighted
//! system on the bin centres in the all-positive orthant.
BlmlFit fit_quick(const SampleSet& samples,
                  const CutoffFrequency& fc,
                  std::optional<std::vector<double>> fs_override = std::nullopt,
                  const SolverOptions& options = {});

inline constexpr std::size_t kBqpLimit = 200;

struct BqpOptions
{
  //! Maximum number of orthant solves in the neighbourhood search.
  std::size_t search_budget = 10000;
  //! Random starts for the quadratic-form ascent, besides +1 and -1.
  std::size_t random_starts = 6;
  std::uint64_t seed = 0x5eed;
  SolverOptions solver;
};

//! Quadratic-form orthant selection followed by Hamming-1 likelihood ascent.
//! Refuses n > kBqpLimit.
BlmlFit fit_bqp(const SampleSet& samples,
                const CutoffFrequency& fc,
                const BqpOptions& options = {});

//! State of the quadratic-form ascent.
struct BqpSearchState
{
  OrthantVector orthant;
  double objective = 0.0; //!< c0^T S c0
  std::size_t visited = 0;
};

//! Multi-start greedy single-flip ascent on c0^T S c0.
BqpSearchState maximize_quadratic_form(const GramMatrix& gram,
                                       std::size_t random_starts,
                                       std::uint64_t seed);

} // namespace blml
