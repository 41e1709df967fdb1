#include "blml/solver.hpp"

#include "blml/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace blml {

// ---------------------------------------------------------------- OrthantVector

OrthantVector::OrthantVector(std::vector<std::int8_t> signs)
  : signs_(std::move(signs))
{
  for (auto s : signs_)
    if (s != 1 && s != -1)
      throw DomainError("OrthantVector: entries must be +1 or -1");
}

OrthantVector OrthantVector::positive(std::size_t n)
{
  return OrthantVector(std::vector<std::int8_t>(n, 1));
}

OrthantVector OrthantVector::from_mask(std::uint64_t mask, std::size_t n)
{
  std::vector<std::int8_t> s(n, 1);
  for (std::size_t k = 0; k < n && k < 64; ++k)
    if (mask >> k & 1u)
      s[k] = -1;
  return OrthantVector(std::move(s));
}

OrthantVector OrthantVector::flipped(std::size_t i) const
{
  OrthantVector o(*this);
  o.signs_.at(i) = static_cast<std::int8_t>(-o.signs_[i]);
  return o;
}

OrthantVector OrthantVector::negated() const
{
  OrthantVector o(*this);
  for (auto& s : o.signs_)
    s = static_cast<std::int8_t>(-s);
  return o;
}

long OrthantVector::sum() const noexcept
{
  long s = 0;
  for (auto v : signs_)
    s += v;
  return s;
}

Eigen::VectorXd OrthantVector::as_vector() const
{
  Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i)
    v[static_cast<Eigen::Index>(i)] = signs_[i];
  return v;
}

Weights unit_weights(std::size_t n)
{
  return Weights(n, 1);
}

// ---------------------------------------------------------------- residual

namespace {

Eigen::VectorXd to_vector(const Weights& w)
{
  Eigen::VectorXd v(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = static_cast<double>(w[i]);
  return v;
}

void check_system(const GramMatrix& gram, const Weights& weights, std::size_t n)
{
  if (weights.size() != gram.size())
    throw DomainError("weight count does not match the Gram matrix");
  if (n == 0)
    throw DomainError("sample count must be positive");
  for (auto w : weights)
    if (w == 0)
      throw DomainError("weights must be positive integers");
}

} // namespace

Eigen::VectorXd rho(const Eigen::VectorXd& c,
                    const GramMatrix& gram,
                    const Weights& weights,
                    std::size_t n)
{
  check_system(gram, weights, n);
  if (c.size() != static_cast<Eigen::Index>(gram.size()))
    throw DomainError("rho: coefficient count does not match the Gram matrix");
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (c[i] == 0.0 || !std::isfinite(c[i]))
      throw DomainError("rho: coefficients must be finite and nonzero");
  const Eigen::VectorXd swc = gram.multiply(to_vector(weights).cwiseProduct(c));
  return swc / static_cast<double>(n) - c.cwiseInverse();
}

Eigen::MatrixXd rho_jacobian(const Eigen::VectorXd& c,
                             const GramMatrix& gram,
                             const Weights& weights,
                             std::size_t n)
{
  check_system(gram, weights, n);
  const auto m = static_cast<Eigen::Index>(gram.size());
  Eigen::MatrixXd j(m, m);
  for (Eigen::Index col = 0; col < m; ++col) {
    const double wj = static_cast<double>(weights[static_cast<std::size_t>(col)]);
    j.col(col) = gram.column(static_cast<std::size_t>(col)) * (wj / static_cast<double>(n));
  }
  j.diagonal() += c.cwiseAbs2().cwiseInverse();
  return j;
}

// ---------------------------------------------------------------- Newton

namespace {

// Solves (diag(a) + S/n) y = b, the symmetrized Newton system.
class NewtonSystem
{
public:
  NewtonSystem(const GramMatrix& gram, std::size_t n, const SolverOptions& opt)
    : gram_(gram)
    , n_(static_cast<double>(n))
  {
    const std::size_t m = gram.size();
    if (gram.is_dense() && m <= opt.dense_limit)
      return;
    const std::size_t cap = gram.is_dense() ? m / 2 : std::min<std::size_t>(m, 3000);
    low_rank_ = gram.low_rank_factor(opt.low_rank_tol, cap);
    if (!low_rank_ && !gram.is_dense())
      throw DomainError("Newton system too large: implicit Gram matrix without a "
                        "low-rank factorization within rank " +
                        std::to_string(cap));
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const
  {
    if (low_rank_) {
      // Woodbury: (A + L L^T / n)^{-1}
      const Eigen::MatrixXd& l = *low_rank_;
      const Eigen::VectorXd ainv = a.cwiseInverse();
      const Eigen::MatrixXd al = ainv.asDiagonal() * l;
      Eigen::MatrixXd k = l.transpose() * al;
      k.diagonal().array() += n_;
      const Eigen::VectorXd ab = ainv.cwiseProduct(b);
      const Eigen::VectorXd t = k.llt().solve(l.transpose() * ab);
      return ab - al * t;
    }
    Eigen::MatrixXd m = gram_.dense() / n_;
    m.diagonal() += a;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success)
      return llt.solve(b);
    return m.ldlt().solve(b);
  }

private:
  const GramMatrix& gram_;
  double n_;
  std::optional<Eigen::MatrixXd> low_rank_;
};

double potential(const Eigen::VectorXd& wc,
                 const Eigen::VectorXd& swc,
                 const Eigen::VectorXd& c,
                 const Eigen::VectorXd& w,
                 double n)
{
  return wc.dot(swc) / (2.0 * n) - w.dot(c.cwiseAbs().array().log().matrix());
}

std::vector<double> to_std(const Eigen::VectorXd& v)
{
  return { v.data(), v.data() + v.size() };
}

} // namespace

CoefficientVector solve_orthant(const GramMatrix& gram,
                                const Weights& weights,
                                std::size_t n,
                                const OrthantVector& orthant,
                                const SolverOptions& opt)
{
  check_system(gram, weights, n);
  const auto m = static_cast<Eigen::Index>(gram.size());
  if (orthant.size() != gram.size())
    throw DomainError("orthant length does not match the Gram matrix");
  const double tol = opt.tol > 0.0 ? opt.tol : 1e-10 * static_cast<double>(n);
  const double nn = static_cast<double>(n);
  const Eigen::VectorXd w = to_vector(weights);
  const Eigen::VectorXd sign = orthant.as_vector();

  Eigen::VectorXd c;
  if (opt.start) {
    c = *opt.start;
    if (c.size() != m || (c.cwiseProduct(sign).array() <= 0.0).any())
      throw DomainError("solve_orthant: start point is not inside the orthant");
  } else {
    c = sign / std::sqrt(gram.diagonal());
  }

  const auto started = std::chrono::steady_clock::now();
  NewtonSystem system(gram, n, opt);
  Eigen::VectorXd swc = gram.multiply(w.cwiseProduct(c));
  Eigen::VectorXd r = swc / nn - c.cwiseInverse();
  Eigen::VectorXd best = c;
  double best_res = r.lpNorm<Eigen::Infinity>();
  const double diag_max = gram.diagonal();
  // rho cannot be resolved below the rounding error of its largest terms,
  // which matters once some |c| is huge (near-coincident nodes, mixed signs)
  auto attainable = [&](const Eigen::VectorXd& x) {
    const double eps = std::numeric_limits<double>::epsilon();
    return std::max(tol, 16.0 * eps * diag_max * w.cwiseProduct(x).lpNorm<1>() / nn);
  };

  for (int it = 0; it <= opt.max_iter; ++it) {
    double res = r.lpNorm<Eigen::Infinity>();
    if (res <= attainable(c)) {
      // confirm against a freshly computed residual
      swc = gram.multiply(w.cwiseProduct(c));
      r = swc / nn - c.cwiseInverse();
      res = r.lpNorm<Eigen::Infinity>();
      if (res <= attainable(c))
        return { std::move(c), orthant, res, it };
    }
    if (res < best_res) {
      best_res = res;
      best = c;
    }
    if (it == opt.max_iter)
      break;
    if (std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() >
        opt.time_limit)
      throw ConvergenceError("solve_orthant: time limit reached", to_std(best), best_res, it);

    const Eigen::VectorXd a = c.cwiseAbs2().cwiseProduct(w).cwiseInverse();
    const Eigen::VectorXd step = system.solve(a, -r).cwiseQuotient(w);
    const Eigen::VectorXd sws = gram.multiply(w.cwiseProduct(step));

    // rho = 0 is the stationary point of the convex potential
    // F(c) = (Wc)^T S (Wc) / 2n - sum w log|c|, whose gradient is W rho;
    // backtrack on F (Armijo), with roundoff slack for the final steps
    const Eigen::VectorXd wc = w.cwiseProduct(c);
    const Eigen::VectorXd wstep = w.cwiseProduct(step);
    const double slope = w.cwiseProduct(r).dot(step);
    const double f0 = potential(wc, swc, c, w, nn);
    const double slack = 1e-13 * (std::abs(f0) + 1.0);
    double alpha = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial, trial_r;
    for (int h = 0; h <= opt.max_halvings; ++h, alpha *= 0.5) {
      trial = c + alpha * step;
      if ((trial.cwiseProduct(sign).array() <= 0.0).any())
        continue;
      const Eigen::VectorXd trial_swc = swc + alpha * sws;
      const double f = potential(wc + alpha * wstep, trial_swc, trial, w, nn);
      if (f <= f0 + 1e-4 * alpha * slope + slack) {
        trial_r = trial_swc / nn - trial.cwiseInverse();
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw ConvergenceError("solve_orthant: line search stalled", to_std(best),
                             best_res, it);
    c = std::move(trial);
    swc += alpha * sws;
    r = std::move(trial_r);
  }
  throw ConvergenceError("solve_orthant: iteration limit reached", to_std(best),
                         best_res, opt.max_iter);
}

double likelihood_value(const Eigen::VectorXd& c, const Weights& weights)
{
  if (static_cast<std::size_t>(c.size()) != weights.size())
    throw DomainError("likelihood_value: weight count mismatch");
  double l = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    l -= static_cast<double>(weights[static_cast<std::size_t>(i)]) * std::log(c[i] * c[i]);
  return l;
}

bool likelihood_prefers(double l_cand,
                        const OrthantVector& cand,
                        double l_best,
                        const OrthantVector& best)
{
  const double tie = 1e-9 * std::max(1.0, std::abs(l_best));
  if (l_cand > l_best + tie)
    return true;
  if (l_cand < l_best - tie)
    return false;
  return cand.sum() > best.sum();
}

GlobalSolution global_solve_bruteforce(const GramMatrix& gram,
                                       const Weights& weights,
                                       std::size_t n,
                                       const SolverOptions& options)
{
  const std::size_t m = gram.size();
  if (m > kBruteForceLimit)
    throw RefusalError("global_solve_bruteforce: " + std::to_string(m) +
                       " nodes exceeds the enumeration limit of " +
                       std::to_string(kBruteForceLimit));
  const bool unit = n == m && std::all_of(weights.begin(), weights.end(),
                                          [](std::size_t w) { return w == 1; });
  std::optional<GlobalSolution> best;
  // numerically degenerate orthants (roots with |c| beyond ~1e8) are
  // settled by the bound once every orthant has been tried
  std::vector<std::pair<OrthantVector, ConvergenceError>> failed;
  const std::uint64_t count = std::uint64_t{ 1 } << m;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    auto orthant = OrthantVector::from_mask(mask, m);
    try {
      auto root = solve_orthant(gram, weights, n, orthant, options);
      const double l = likelihood_value(root.values, weights);
      if (!best || likelihood_prefers(l, orthant, best->likelihood, best->orthant))
        best = GlobalSolution{ std::move(root), std::move(orthant), l };
    } catch (const ConvergenceError& e) {
      if (!unit)
        throw;
      failed.emplace_back(std::move(orthant), e);
    }
  }
  for (const auto& [orthant, error] : failed)
    if (!best || upper_bound_orthant(orthant, gram, n) >= best->likelihood)
      throw error;
  return *best;
}

double upper_bound_orthant(const OrthantVector& orthant, const GramMatrix& gram, std::size_t n)
{
  if (orthant.size() != gram.size())
    throw DomainError("upper_bound_orthant: orthant length mismatch");
  const double q = gram.quadratic_form(orthant.as_vector());
  if (!(q > 0.0))
    return -std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);
  return nn * std::log(q) - 2.0 * nn * std::log(nn);
}

// ---------------------------------------------------------------- density

std::vector<double> BlmlFit::amplitude_coefficients() const
{
  std::vector<double> a(weights.size());
  for (std::size_t b = 0; b < a.size(); ++b)
    a[b] = static_cast<double>(weights[b]) *
           coefficients.values[static_cast<Eigen::Index>(b)] / static_cast<double>(n);
  return a;
}

std::vector<double> eval_density(const BlmlFit& fit, const SampleSet& queries)
{
  const auto a = fit.amplitude_coefficients();
  SincSeries g(fit.nodes, a, fit.fc);
  auto out = g.evaluate(queries);
  for (auto& v : out)
    v *= v;
  return out;
}

double eval_density(const BlmlFit& fit, std::span<const double> x)
{
  const auto a = fit.amplitude_coefficients();
  const double g = SincSeries(fit.nodes, a, fit.fc)(x);
  return g * g;
}

std::vector<double> eval_density_1d(const BlmlFit& fit, std::span<const double> xs)
{
  if (fit.nodes.dim() != 1)
    throw DomainError("eval_density_1d: fit is not one-dimensional");
  const auto a = fit.amplitude_coefficients();
  SincSeries g(fit.nodes, a, fit.fc);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = g(xs[i]);
    out[i] = v * v;
  }
  return out;
}

double root_identity_error(const BlmlFit& fit, const GramMatrix& gram)
{
  const Eigen::VectorXd wc = to_vector(fit.weights).cwiseProduct(fit.coefficients.values);
  const double n2 = static_cast<double>(fit.n) * static_cast<double>(fit.n);
  return std::abs(gram.quadratic_form(wc) - n2) / n2;
}

double root_identity_error(const BlmlFit& fit)
{
  return root_identity_error(fit, build_gram(fit.nodes, fit.fc));
}

double cbar(double g, std::size_t n, double fc)
{
  if (n == 0 || !(fc > 0.0) || !std::isfinite(g))
    throw DomainError("cbar: need n > 0, f_c > 0 and finite g");
  const double s = std::sqrt(g * g + 4.0 * fc / static_cast<double>(n));
  const double c = 2.0 / (std::abs(g) + s);
  return g < 0.0 ? -c : c;
}

namespace {

std::pair<double, double> node_range(const BlmlFit& fit)
{
  const auto& v = fit.nodes.values();
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return { *lo, *hi };
}

} // namespace

double density_mass_1d(const BlmlFit& fit)
{
  if (fit.nodes.dim() != 1)
    throw DomainError("density_mass_1d: fit is not one-dimensional");
  const double fc = fit.fc[0];
  auto [lo, hi] = node_range(fit);
  const double pad = 200.0 / fc;
  const double left = lo - pad, right = hi + pad;
  const double h = 1.0 / (8.0 * fc);
  const auto count = static_cast<std::size_t>(std::ceil((right - left) / h)) + 1;
  std::vector<double> xs(count);
  for (std::size_t k = 0; k < count; ++k)
    xs[k] = left + static_cast<double>(k) * h;
  const auto f = eval_density_1d(fit, xs);
  double mass = 0.0;
  for (std::size_t k = 0; k + 1 < count; ++k)
    mass += 0.5 * h * (f[k] + f[k + 1]);

  // far field: g(x) ~ Im(e^{i pi fc (x-m)} Z) / (pi (x-m)), averaged g^2 = |Z|^2/(2 pi^2 (x-m)^2)
  const double mid = 0.5 * (lo + hi);
  const auto a = fit.amplitude_coefficients();
  std::complex<double> z = 0.0;
  for (std::size_t b = 0; b < a.size(); ++b)
    z += a[b] * std::polar(1.0, -std::numbers::pi * fc * (fit.nodes(b, 0) - mid));
  const double amp = std::norm(z) / (2.0 * std::numbers::pi * std::numbers::pi);
  const double x_end = left + static_cast<double>(count - 1) * h;
  mass += amp / (x_end - mid) + amp / (mid - left);
  return mass;
}

double density_max_1d(const BlmlFit& fit)
{
  if (fit.nodes.dim() != 1)
    throw DomainError("density_max_1d: fit is not one-dimensional");
  const double fc = fit.fc[0];
  auto [lo, hi] = node_range(fit);
  const double h = 1.0 / (32.0 * fc);
  const double left = lo - 2.0 / fc;
  const auto count = static_cast<std::size_t>(std::ceil((hi + 2.0 / fc - left) / h)) + 1;
  std::vector<double> xs(count);
  for (std::size_t k = 0; k < count; ++k)
    xs[k] = left + static_cast<double>(k) * h;
  // include the nodes themselves, where the peaks tend to sit
  xs.insert(xs.end(), fit.nodes.values().begin(), fit.nodes.values().end());
  const auto f = eval_density_1d(fit, xs);
  return *std::max_element(f.begin(), f.end());
}

} // namespace blml
