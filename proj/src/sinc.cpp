#include "blml/sinc.hpp"

#include "blml/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace blml {

namespace {

constexpr double kPi = std::numbers::pi;

void check_fc(double fc)
{
  if (!(fc > 0.0) || !std::isfinite(fc))
    throw DomainError("cut-off frequency must be positive and finite");
}

} // namespace

CutoffFrequency::CutoffFrequency(double fc)
  : fc_{ fc }
{
  check_fc(fc);
}

CutoffFrequency::CutoffFrequency(std::vector<double> fc)
  : fc_(std::move(fc))
{
  if (fc_.empty())
    throw DomainError("cut-off frequency needs at least one component");
  for (double f : fc_)
    check_fc(f);
}

double CutoffFrequency::product() const noexcept
{
  return std::accumulate(fc_.begin(), fc_.end(), 1.0, std::multiplies<>());
}

double CutoffFrequency::max() const noexcept
{
  return *std::max_element(fc_.begin(), fc_.end());
}

CutoffFrequency CutoffFrequency::scaled(double a) const
{
  std::vector<double> out(fc_);
  for (auto& f : out)
    f *= a;
  return CutoffFrequency(std::move(out));
}

double sinc_kernel(double delta, double fc)
{
  if (!std::isfinite(delta))
    throw DomainError("sinc_kernel: non-finite displacement");
  check_fc(fc);
  return detail::sinc_unchecked(delta, fc);
}

double sinc_kernel_nd(std::span<const double> delta, const CutoffFrequency& fc)
{
  if (delta.size() != fc.dim())
    throw DomainError("sinc_kernel_nd: displacement has " +
                      std::to_string(delta.size()) + " components, cut-off has " +
                      std::to_string(fc.dim()));
  double v = 1.0;
  for (std::size_t j = 0; j < delta.size(); ++j)
    v *= sinc_kernel(delta[j], fc[j]);
  return v;
}

// ---------------------------------------------------------------------------

SincSeries::SincSeries(const SampleSet& nodes,
                       std::span<const double> coefficients,
                       const CutoffFrequency& fc)
  : fc_(fc)
  , nodes_(nodes)
  , coef_(coefficients.begin(), coefficients.end())
{
  if (coef_.size() != nodes.size())
    throw DomainError("SincSeries: coefficient count does not match node count");
  if (nodes.dim() != fc.dim())
    throw DomainError("SincSeries: node dimension does not match cut-off");
  if (nodes.dim() != 1)
    return;

  const std::size_t n = nodes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return nodes(a, 0) < nodes(b, 0);
  });
  xs_.resize(n);
  a_.resize(n);
  a_cos_.resize(n);
  a_sin_.resize(n);
  const double w = kPi * fc[0];
  for (std::size_t k = 0; k < n; ++k) {
    const double x = nodes(order[k], 0);
    const double a = coef_[order[k]];
    xs_[k] = x;
    a_[k] = a;
    a_cos_[k] = a * std::cos(w * x);
    a_sin_[k] = a * std::sin(w * x);
  }
  near_ = 1.0 / w;
}

double SincSeries::eval_1d(double x) const
{
  const auto lo = static_cast<std::size_t>(
    std::lower_bound(xs_.begin(), xs_.end(), x - near_) - xs_.begin());
  const auto hi = static_cast<std::size_t>(
    std::upper_bound(xs_.begin(), xs_.end(), x + near_) - xs_.begin());

  double sc = 0.0, ss = 0.0;
  for (std::size_t k = 0; k < lo; ++k) {
    const double inv = 1.0 / (x - xs_[k]);
    sc += a_cos_[k] * inv;
    ss += a_sin_[k] * inv;
  }
  for (std::size_t k = hi; k < xs_.size(); ++k) {
    const double inv = 1.0 / (x - xs_[k]);
    sc += a_cos_[k] * inv;
    ss += a_sin_[k] * inv;
  }
  const double w = kPi * fc_[0];
  double far = (std::sin(w * x) * sc - std::cos(w * x) * ss) / kPi;
  double near = 0.0;
  for (std::size_t k = lo; k < hi; ++k)
    near += a_[k] * detail::sinc_unchecked(x - xs_[k], fc_[0]);
  return far + near;
}

double SincSeries::operator()(std::span<const double> x) const
{
  if (x.size() != fc_.dim())
    throw DomainError("SincSeries: query dimension mismatch");
  if (fc_.dim() == 1)
    return eval_1d(x[0]);
  double v = 0.0;
  for (std::size_t b = 0; b < nodes_.size(); ++b)
    v += coef_[b] * detail::sinc_nd_unchecked(x.data(), nodes_.point(b).data(), fc_);
  return v;
}

std::vector<double> SincSeries::evaluate(const SampleSet& queries) const
{
  std::vector<double> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    out[i] = (*this)(queries.point(i));
  return out;
}

// ---------------------------------------------------------------------------

GramMatrix::GramMatrix(SampleSet nodes, CutoffFrequency fc, GramStorage storage)
  : nodes_(std::move(nodes))
  , fc_(std::move(fc))
{
  if (nodes_.empty())
    throw DomainError("build_gram: no nodes");
  if (nodes_.dim() != fc_.dim())
    throw DomainError("build_gram: node dimension does not match cut-off");
  nodes_.require_finite();

  const std::size_t n = nodes_.size();
  if (storage == GramStorage::automatic)
    storage = n <= kDenseGramLimit ? GramStorage::dense : GramStorage::implicit;
  if (storage == GramStorage::implicit)
    return;

  Eigen::MatrixXd s(n, n);
  const double diag = fc_.product();
  for (std::size_t j = 0; j < n; ++j) {
    const double* xj = nodes_.point(j).data();
    for (std::size_t i = 0; i < j; ++i)
      s(i, j) = detail::sinc_nd_unchecked(nodes_.point(i).data(), xj, fc_);
    s(j, j) = diag;
  }
  // mirror the upper triangle
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 1; i < n; ++i)
      s(i, j) = s(j, i);
  dense_ = std::move(s);
}

double GramMatrix::operator()(std::size_t i, std::size_t j) const
{
  if (dense_)
    return (*dense_)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  if (i == j)
    return diagonal();
  // order the pair so that the implicit matrix is symmetric by construction
  if (i > j)
    std::swap(i, j);
  return detail::sinc_nd_unchecked(nodes_.point(i).data(), nodes_.point(j).data(), fc_);
}

const Eigen::MatrixXd& GramMatrix::dense() const
{
  if (!dense_)
    throw DomainError("GramMatrix: implicit storage has no dense matrix");
  return *dense_;
}

Eigen::VectorXd GramMatrix::multiply(const Eigen::VectorXd& v) const
{
  const auto n = static_cast<Eigen::Index>(size());
  if (v.size() != n)
    throw DomainError("GramMatrix::multiply: size mismatch");
  if (dense_)
    return dense_->selfadjointView<Eigen::Upper>() * v;

  Eigen::VectorXd out(n);
  if (fc_.dim() == 1) {
    SincSeries series(nodes_, std::span<const double>(v.data(), v.size()), fc_);
    for (Eigen::Index i = 0; i < n; ++i)
      out[i] = series(nodes_(static_cast<std::size_t>(i), 0));
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      acc += (*this)(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * v[j];
    out[i] = acc;
  }
  return out;
}

Eigen::VectorXd GramMatrix::column(std::size_t j) const
{
  const auto n = static_cast<Eigen::Index>(size());
  if (dense_)
    return dense_->col(static_cast<Eigen::Index>(j));
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out[i] = (*this)(static_cast<std::size_t>(i), j);
  return out;
}

double GramMatrix::quadratic_form(const Eigen::VectorXd& v) const
{
  return v.dot(multiply(v));
}

std::optional<Eigen::MatrixXd> GramMatrix::low_rank_factor(double rel_tol,
                                                           std::size_t max_rank) const
{
  const auto n = static_cast<Eigen::Index>(size());
  const double stop = rel_tol * diagonal();
  Eigen::VectorXd d = Eigen::VectorXd::Constant(n, diagonal());
  const auto cap = static_cast<Eigen::Index>(std::min<std::size_t>(max_rank, size()));
  Eigen::MatrixXd l(n, cap);

  for (Eigen::Index k = 0; k < cap; ++k) {
    Eigen::Index piv;
    const double dmax = d.maxCoeff(&piv);
    if (dmax <= stop) {
      l.conservativeResize(n, k);
      return l;
    }
    Eigen::VectorXd col = column(static_cast<std::size_t>(piv));
    if (k > 0)
      col.noalias() -= l.leftCols(k) * l.row(piv).leftCols(k).transpose();
    col /= std::sqrt(dmax);
    l.col(k) = col;
    d -= col.cwiseAbs2();
    d = d.cwiseMax(0.0);
    d[piv] = 0.0;
  }
  if (d.maxCoeff() <= stop)
    return l;
  return std::nullopt;
}

GramMatrix build_gram(const SampleSet& nodes, const CutoffFrequency& fc, GramStorage storage)
{
  return GramMatrix(nodes, fc, storage);
}

} // namespace blml
