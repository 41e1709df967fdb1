#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace blml {

//! Ordered observation points, row-major (n rows of `dim` coordinates).
class SampleSet
{
public:
  SampleSet() = default;

  //! 1-D samples.
  explicit SampleSet(std::vector<double> values, std::string source = {});

  //! d-D samples; `values.size()` must be a multiple of `dim`.
  SampleSet(std::size_t dim, std::vector<double> values, std::string source = {});

  std::size_t size() const noexcept { return dim_ ? values_.size() / dim_ : 0; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return values_.empty(); }

  std::span<const double> point(std::size_t i) const
  {
    return { values_.data() + i * dim_, dim_ };
  }
  double operator()(std::size_t i, std::size_t j) const
  {
    return values_[i * dim_ + j];
  }

  //! Flat row-major storage.
  const std::vector<double>& values() const noexcept { return values_; }

  //! Where the samples came from (file name, generator and seed, ...).
  const std::string& source() const noexcept { return source_; }
  void set_source(std::string s) { source_ = std::move(s); }

  //! Throws DomainError on NaN or infinity.
  void require_finite() const;

  //! Subset of rows, in the given order.
  SampleSet select(std::span<const std::size_t> rows) const;

private:
  std::size_t dim_ = 1;
  std::vector<double> values_;
  std::string source_;
};

} // namespace blml
