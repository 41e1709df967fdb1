#include "blml/sample_set.hpp"

#include "blml/errors.hpp"

#include <cmath>

namespace blml {

SampleSet::SampleSet(std::vector<double> values, std::string source)
  : dim_(1)
  , values_(std::move(values))
  , source_(std::move(source))
{}

SampleSet::SampleSet(std::size_t dim, std::vector<double> values, std::string source)
  : dim_(dim)
  , values_(std::move(values))
  , source_(std::move(source))
{
  if (dim_ == 0)
    throw DomainError("SampleSet: dimension must be positive");
  if (values_.size() % dim_ != 0)
    throw DomainError("SampleSet: value count is not a multiple of the dimension");
}

void SampleSet::require_finite() const
{
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k]))
      throw DomainError("SampleSet: non-finite coordinate at row " +
                        std::to_string(k / dim_));
  }
}

SampleSet SampleSet::select(std::span<const std::size_t> rows) const
{
  std::vector<double> out;
  out.reserve(rows.size() * dim_);
  for (auto r : rows) {
    if (r >= size())
      throw DomainError("SampleSet::select: row out of range");
    auto p = point(r);
    out.insert(out.end(), p.begin(), p.end());
  }
  return SampleSet(dim_, std::move(out), source_);
}

} // namespace blml
