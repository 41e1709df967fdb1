#include "blml/kde.hpp"

#include "blml/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace blml {

namespace {

// exp(-u^2/2) underflows to zero beyond this
constexpr double kWindow = 40.0;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

bool is_gaussian(KernelKind k)
{
  return k == KernelKind::gauss2 || k == KernelKind::gauss6;
}

// samples sorted by their first coordinate
struct SortedRows
{
  std::vector<std::size_t> order;
  std::vector<double> first;
};

SortedRows sort_rows(const SampleSet& s)
{
  SortedRows r;
  r.order.resize(s.size());
  std::iota(r.order.begin(), r.order.end(), 0);
  std::sort(r.order.begin(), r.order.end(), [&](auto a, auto b) { return s(a, 0) < s(b, 0); });
  r.first.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k)
    r.first[k] = s(r.order[k], 0);
  return r;
}

std::vector<double> eval_gaussian(const KdeModel& m, const SampleSet& q)
{
  const std::size_t d = m.samples.dim();
  const auto rows = sort_rows(m.samples);
  double norm = static_cast<double>(m.samples.size());
  for (double h : m.bandwidth)
    norm *= h;
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double x0 = q(i, 0);
    const double reach = kWindow * m.bandwidth[0];
    const auto lo = std::lower_bound(rows.first.begin(), rows.first.end(), x0 - reach) -
                    rows.first.begin();
    const auto hi = std::upper_bound(rows.first.begin(), rows.first.end(), x0 + reach) -
                    rows.first.begin();
    double acc = 0.0;
    for (auto k = lo; k < hi; ++k) {
      const std::size_t r = rows.order[static_cast<std::size_t>(k)];
      double v = 1.0;
      for (std::size_t j = 0; j < d && v != 0.0; ++j) {
        const double u = (q(i, j) - m.samples(r, j)) / m.bandwidth[j];
        v *= std::abs(u) > kWindow ? 0.0 : gaussian_kernel(m.kind, u);
      }
      acc += v;
    }
    out[i] = acc / norm;
  }
  return out;
}

} // namespace

KernelKind parse_kernel_kind(std::string_view name)
{
  if (name == "gauss2" || name == "kde2")
    return KernelKind::gauss2;
  if (name == "gauss6" || name == "kde6")
    return KernelKind::gauss6;
  if (name == "sinc" || name == "kdesinc")
    return KernelKind::sinc;
  throw DomainError("unknown kernel kind '" + std::string(name) + "'");
}

std::string to_string(KernelKind kind)
{
  switch (kind) {
    case KernelKind::gauss2: return "kde2";
    case KernelKind::gauss6: return "kde6";
    case KernelKind::sinc: return "kdesinc";
  }
  return "?";
}

double gaussian_kernel(KernelKind kind, double u)
{
  const double phi = kInvSqrt2Pi * std::exp(-0.5 * u * u);
  if (kind == KernelKind::gauss6) {
    const double u2 = u * u;
    return 0.125 * (15.0 - 10.0 * u2 + u2 * u2) * phi;
  }
  return phi;
}

double kde_bandwidth(KernelKind kind, double fc, std::size_t n, double constant)
{
  if (!(fc > 0.0) || n == 0)
    throw DomainError("kde_bandwidth: need f_c > 0 and n > 0");
  const double nn = static_cast<double>(n);
  switch (kind) {
    case KernelKind::gauss2: return constant / fc * std::pow(nn, -0.2);
    case KernelKind::gauss6: return constant / fc * std::pow(nn, -1.0 / 13.0);
    case KernelKind::sinc: break;
  }
  throw DomainError("kde_bandwidth: the sinc kernel has no bandwidth schedule");
}

KdeModel kde_fit(const SampleSet& samples, KernelKind kind, double bandwidth_or_fc)
{
  return kde_fit(samples, kind, std::vector<double>(samples.dim(), bandwidth_or_fc));
}

KdeModel kde_fit(const SampleSet& samples, KernelKind kind, const std::vector<double>& p)
{
  if (samples.empty())
    throw DomainError("kde_fit: no samples");
  if (p.size() != samples.dim())
    throw DomainError("kde_fit: parameter dimension mismatch");
  samples.require_finite();
  KdeModel m;
  m.kind = kind;
  m.samples = samples;
  if (is_gaussian(kind)) {
    for (double q : p)
      if (!(q > 0.0) || !std::isfinite(q))
        throw DomainError("kde_fit: bandwidth must be positive");
    m.bandwidth = p;
  } else {
    m.fc = CutoffFrequency(p);
  }
  return m;
}

std::vector<double> kde_eval(const KdeModel& model, const SampleSet& queries)
{
  if (queries.dim() != model.samples.dim())
    throw DomainError("kde_eval: query dimension mismatch");
  if (is_gaussian(model.kind))
    return eval_gaussian(model, queries);
  std::vector<double> ones(model.samples.size(), 1.0 / static_cast<double>(model.samples.size()));
  return SincSeries(model.samples, ones, *model.fc).evaluate(queries);
}

std::vector<double> kde_eval_1d(const KdeModel& model, std::span<const double> xs)
{
  if (model.samples.dim() != 1)
    throw DomainError("kde_eval_1d: model is not one-dimensional");
  return kde_eval(model, SampleSet(std::vector<double>(xs.begin(), xs.end())));
}

} // namespace blml
