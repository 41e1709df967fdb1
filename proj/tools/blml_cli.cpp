// blml: command-line front end for the BLML estimators and benchmarks.

#include "blml/algorithms.hpp"
#include "blml/bandwidth.hpp"
#include "blml/errors.hpp"
#include "blml/io.hpp"
#include "blml/kde.hpp"
#include "blml/pointprocess.hpp"
#include "blml/rng.hpp"
#include "blml/surrogate.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

using namespace blml;
namespace fs = std::filesystem;

namespace {

std::vector<double> parse_doubles(const std::string& text, const std::string& what)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty())
      continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size())
        throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError(what + ": '" + cell + "' is not a number");
    }
  }
  return out;
}

// "100..10000" -> half-decade points; otherwise a comma list
std::vector<std::size_t> parse_sizes(const std::string& text)
{
  std::vector<std::size_t> sizes;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto ends = parse_doubles(text.substr(0, dots) + "," + text.substr(dots + 2), "--sizes");
    if (ends.size() != 2 || !(ends[0] >= 1.0) || !(ends[1] >= ends[0]))
      throw ConfigError("--sizes: expected lo..hi with 1 <= lo <= hi");
    const double a = std::log10(ends[0]), b = std::log10(ends[1]);
    for (double e = a; e <= b + 1e-9; e += 0.5)
      sizes.push_back(static_cast<std::size_t>(std::llround(std::pow(10.0, e))));
  } else {
    for (double v : parse_doubles(text, "--sizes")) {
      if (!(v >= 1.0) || v != std::floor(v))
        throw ConfigError("--sizes: sizes must be positive integers");
      sizes.push_back(static_cast<std::size_t>(v));
    }
  }
  if (sizes.empty())
    throw ConfigError("--sizes: no sizes given");
  return sizes;
}

// "lo:hi:step" -> arithmetic grid; otherwise a comma list
std::vector<double> parse_grid(const std::string& text, const std::string& what)
{
  if (text.find(':') != std::string::npos) {
    std::string t = text;
    std::replace(t.begin(), t.end(), ':', ',');
    const auto p = parse_doubles(t, what);
    if (p.size() != 3 || !(p[2] > 0.0) || !(p[1] >= p[0]))
      throw ConfigError(what + ": expected lo:hi:step with step > 0");
    std::vector<double> g;
    const auto count = static_cast<std::size_t>(std::floor((p[1] - p[0]) / p[2] + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k)
      g.push_back(p[0] + static_cast<double>(k) * p[2]);
    return g;
  }
  return parse_doubles(text, what);
}

std::vector<EstimatorSpec> parse_estimators(const std::string& text, double kde2c, double kde6c)
{
  std::vector<EstimatorSpec> out;
  std::stringstream ss(text);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty())
      continue;
    EstimatorSpec e;
    e.kind = parse_estimator_kind(name);
    e.kde_constant = e.kind == EstimatorKind::kde6 ? kde6c : kde2c;
    out.push_back(e);
  }
  if (out.empty())
    throw ConfigError("no estimators given");
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& j)
{
  io::write_atomic(path, j.dump(2) + "\n");
}

// Config text hashed into output comments; destination paths are left out
// so the same run written elsewhere is byte-identical.
std::string canonical(const CLI::App& app)
{
  static const std::set<std::string> outputs = { "--output", "--csv", "--json", "--out-dir", "--curve" };
  std::string out;
  for (const auto* sub : app.get_subcommands()) {
    out += sub->get_name();
    for (const auto* opt : sub->get_options()) {
      if (opt->get_name().empty() || outputs.count(opt->get_name()) || opt->count() == 0)
        continue;
      out += " " + opt->get_name() + "=";
      for (const auto& r : opt->results())
        out += r + ";";
    }
  }
  return out;
}

// ---------------------------------------------------------------- fit

struct FitArgs
{
  std::string input, output, curve, algo = "trivial", fc, fs, bandwidth, grid;
  std::size_t budget = 10000;
  std::uint64_t seed = 0x5eed;
  double kde_constant = 0.4;
  std::size_t curve_points = 1000;
};

void cmd_fit(const FitArgs& a, const CLI::App& app)
{
  const auto samples = io::read_samples(a.input);
  const auto kind = parse_estimator_kind(a.algo);
  const auto fcv = a.fc.empty() ? std::vector<double>{} : parse_doubles(a.fc, "--fc");
  nlohmann::json out;
  std::function<double(double)> density;

  if (is_blml(kind) || kind == EstimatorKind::kdesinc) {
    if (fcv.size() != samples.dim())
      throw ConfigError("--fc needs one value per sample dimension");
  }
  if (is_blml(kind)) {
    const CutoffFrequency fc(fcv);
    BlmlFit fit;
    if (kind == EstimatorKind::trivial) {
      fit = fit_trivial(samples, fc);
    } else if (kind == EstimatorKind::quick) {
      std::optional<std::vector<double>> fsv;
      if (!a.fs.empty())
        fsv = parse_doubles(a.fs, "--fs");
      fit = fit_quick(samples, fc, fsv);
    } else {
      BqpOptions o;
      o.search_budget = a.budget;
      o.seed = a.seed;
      fit = fit_bqp(samples, fc, o);
    }
    out = io::to_json(fit);
    out["root_identity_error"] = root_identity_error(fit);
    auto shared = std::make_shared<BlmlFit>(std::move(fit));
    density = [shared](double x) { return eval_density(*shared, std::span<const double>(&x, 1)); };
  } else {
    const auto kk = kind == EstimatorKind::kde2   ? KernelKind::gauss2
                    : kind == EstimatorKind::kde6 ? KernelKind::gauss6
                                                  : KernelKind::sinc;
    std::vector<double> p;
    if (kk == KernelKind::sinc) {
      p = fcv;
    } else if (!a.bandwidth.empty()) {
      p = parse_doubles(a.bandwidth, "--bandwidth");
    } else {
      if (fcv.size() != samples.dim())
        throw ConfigError("KDE needs --bandwidth or --fc (one value per dimension)");
      for (double f : fcv)
        p.push_back(kde_bandwidth(kk, f, samples.size(), a.kde_constant));
    }
    auto model = std::make_shared<KdeModel>(kde_fit(samples, kk, p));
    out = io::to_json(*model);
    density = [model](double x) { return kde_eval(*model, SampleSet({ x }))[0]; };
  }
  write_json(a.output, out);

  if (!a.curve.empty()) {
    if (samples.dim() != 1)
      throw ConfigError("--curve is only available for 1-D samples");
    std::vector<double> xs;
    if (!a.grid.empty()) {
      xs = parse_grid(a.grid, "--grid");
    } else {
      const auto& v = samples.values();
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      const double pad = 0.1 * (*hi - *lo) + 1.0;
      for (std::size_t k = 0; k < a.curve_points; ++k)
        xs.push_back(*lo - pad + (*hi - *lo + 2.0 * pad) * static_cast<double>(k) /
                                   static_cast<double>(std::max<std::size_t>(a.curve_points - 1, 1)));
    }
    io::CsvWriter w({ "x", "density" }, io::provenance_comment(canonical(app), a.seed));
    for (double x : xs)
      w.add_row({ io::format_number(x), io::format_number(density(x)) });
    w.write(a.curve);
  }
}

// ---------------------------------------------------------------- mise

struct MiseArgs
{
  std::string pdf = "sinc4mix", estimators = "trivial,quick,kde2,kde6,kdesinc", sizes = "100..10000";
  std::string csv, json;
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  double fc = 0.0, fc_ratio = 2.0, kde_constant = 0.4, kde6_constant = 0.4;
};

void cmd_mise(const MiseArgs& a, const CLI::App& app)
{
  if (a.reps == 0)
    throw ConfigError("--reps must be at least 1");
  const auto pdf = AnalyticPdf::from_name(a.pdf);
  const double fc = a.fc > 0.0 ? a.fc : a.fc_ratio * pdf.effective_cutoff();
  MiseOptions o;
  o.sizes = parse_sizes(a.sizes);
  o.reps = a.reps;
  o.seed = a.seed;
  const auto reports =
    mise_sweep(parse_estimators(a.estimators, a.kde_constant, a.kde6_constant), pdf, fc, o);
  const auto comment = io::provenance_comment(canonical(app), a.seed);
  const auto table = io::mise_csv(reports, comment);
  if (!a.csv.empty())
    table.write(a.csv);
  else
    std::cout << table.str();
  if (!a.json.empty()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports)
      j.push_back(io::to_json(r));
    write_json(a.json, j);
  }
}

// ---------------------------------------------------------------- fcscan

struct ScanArgs
{
  std::string mode = "mnll", pdf = "sinc4mix", estimator = "trivial", ratios = "0.25,0.5,1,2,4";
  std::string input, grid, algo = "trivial", csv, json;
  std::size_t n = 1000, reps = 20, points = 24;
  std::uint64_t seed = 1;
};

void cmd_fcscan(const ScanArgs& a, const CLI::App& app)
{
  const auto comment = io::provenance_comment(canonical(app), a.seed);
  if (a.mode == "mise-vs-fc") {
    const auto ratios = parse_grid(a.ratios, "--ratios");
    if (ratios.empty())
      throw ConfigError("--ratios: empty ratio grid");
    if (a.reps == 0)
      throw ConfigError("--reps must be at least 1");
    const auto pdf = AnalyticPdf::from_name(a.pdf);
    EstimatorSpec e;
    e.kind = parse_estimator_kind(a.estimator);
    MiseOptions o;
    o.sizes = { a.n };
    o.reps = a.reps;
    o.seed = a.seed;
    io::CsvWriter w({ "ratio", "fc", "mean_ise", "stderr_ise" }, comment);
    for (double r : ratios) {
      if (!(r > 0.0))
        throw ConfigError("--ratios: ratios must be positive");
      const double fc = r * pdf.effective_cutoff();
      const auto rep = mise_sweep({ e }, pdf, fc, o)[0];
      w.add_row({ io::format_number(r), io::format_number(fc), io::format_number(rep.mean_ise[0]),
                  io::format_number(rep.stderr_ise[0]) });
    }
    if (!a.csv.empty())
      w.write(a.csv);
    else
      std::cout << w.str();
    return;
  }
  if (a.mode != "mnll")
    throw ConfigError("--mode must be mnll or mise-vs-fc");
  const auto samples = a.input.empty() ? AnalyticPdf::from_name(a.pdf).sample(a.n, a.seed)
                                       : io::read_samples(a.input);
  const auto grid = a.grid.empty() ? default_fc_grid(samples, a.points) : parse_grid(a.grid, "--grid");
  const auto scan = mnll_scan(samples, grid, parse_scan_algorithm(a.algo));
  auto j = io::to_json(scan);
  try {
    j["knee"] = detect_knee(scan);
  } catch (const DomainError& e) {
    j["knee"] = nullptr;
    j["knee_error"] = e.what();
  }
  const auto table = io::mnll_csv(scan, comment);
  if (!a.csv.empty())
    table.write(a.csv);
  else
    std::cout << table.str();
  if (!a.json.empty())
    write_json(a.json, j);
  else
    std::cout << "knee," << (j["knee"].is_null() ? std::string("none") : io::format_number(j["knee"].get<double>()))
              << "\n";
}

// ---------------------------------------------------------------- bench-time

struct BenchArgs
{
  std::string pdf = "sinc4mix", estimators = "quick,trivial,kde2", sizes = "1000,10000", csv;
  std::uint64_t seed = 1;
  double fc = 0.0, budget = std::numeric_limits<double>::infinity();
  std::size_t queries = 1000, repeats = 3;
};

void cmd_bench(const BenchArgs& a, const CLI::App& app)
{
  const auto pdf = AnalyticPdf::from_name(a.pdf);
  const double fc = a.fc > 0.0 ? a.fc : 2.0 * pdf.effective_cutoff();
  const auto specs = parse_estimators(a.estimators, 0.4, 0.4);
  io::CsvWriter w({ "estimator", "n", "seconds" }, io::provenance_comment(canonical(app), a.seed));
  for (std::size_t n : parse_sizes(a.sizes)) {
    const auto samples = pdf.sample(n, replicate_seed(a.seed, n, 0));
    for (const auto& s : specs) {
      const auto t = time_estimator(s, samples, fc, a.queries, a.repeats, a.budget);
      if (t.censored)
        std::cerr << s.name() << " at n=" << n << " stopped at the budget; seconds is a lower bound\n";
      w.add_row({ s.name(), std::to_string(n), io::format_number(t.seconds) });
    }
  }
  if (!a.csv.empty())
    w.write(a.csv);
  else
    std::cout << w.str();
}

// ---------------------------------------------------------------- cif

struct CifArgs
{
  std::string spikes, covariates, backend = "quick", fc, fs, domain, out_dir = ".";
  bool history = false;
  double fraction = 0.8, kde_constant = 0.4;
  std::uint64_t seed = 0;
};

void cmd_cif(const CifArgs& a, const CLI::App& app)
{
  SpikeTrain train;
  train.times = io::read_spike_times(a.spikes);
  train.track = io::read_covariate_track(a.covariates);
  train.t_begin = train.track.t0;
  train.t_end = train.track.t_end();
  train.validate();

  CovariateConfig cov{ train.track.dim > 0, a.history };
  auto [fit_part, test_part] = split_train(train, a.fraction);
  if (test_part.count() < kMinTestEvents)
    throw RefusalError("cif: " + std::to_string(test_part.count()) +
                       " events in the test segment, at least " + std::to_string(kMinTestEvents) +
                       " are required");

  // default domain and f_c from the training rows
  std::vector<double> grid_times;
  for (std::size_t k = 0; k < fit_part.track.steps; ++k)
    if (fit_part.track.time(k) <= fit_part.t_end)
      grid_times.push_back(fit_part.track.time(k));
  const auto rows = build_covariates(fit_part, grid_times, cov);
  const std::size_t d = rows.rows.dim();

  CovariateDomain dom;
  if (!a.domain.empty()) {
    std::stringstream ss(a.domain);
    std::string part;
    while (std::getline(ss, part, ',')) {
      std::replace(part.begin(), part.end(), ':', ',');
      const auto p = parse_doubles(part, "--domain");
      if (p.size() != 2 || !(p[1] > p[0]))
        throw ConfigError("--domain: expected lo:hi per dimension");
      dom.lo.push_back(p[0]);
      dom.hi.push_back(p[1]);
    }
    if (dom.dim() != d)
      throw ConfigError("--domain needs " + std::to_string(d) + " intervals");
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      double lo = rows.rows(0, j), hi = lo;
      for (std::size_t i = 0; i < rows.rows.size(); ++i) {
        lo = std::min(lo, rows.rows(i, j));
        hi = std::max(hi, rows.rows(i, j));
      }
      const double pad = 0.05 * (hi - lo) + 1e-9;
      dom.lo.push_back(lo - pad);
      dom.hi.push_back(hi + pad);
    }
  }

  CifOptions o;
  o.backend = parse_cif_backend(a.backend);
  o.covariates = cov;
  o.kde_constant = a.kde_constant;
  o.fc = a.fc.empty() ? fc_from_gaussian_fit(rows.rows).values() : parse_doubles(a.fc, "--fc");
  if (!a.fs.empty())
    o.fs = parse_doubles(a.fs, "--fs");

  const auto model = fit_cif(fit_part, dom, o);
  const auto ks = time_rescale(test_part, model);
  const auto comment = io::provenance_comment(canonical(app), a.seed);
  const fs::path dir(a.out_dir);
  write_json(dir / "model.json", io::to_json(model));
  write_json(dir / "ks.json", io::to_json(ks));
  io::ks_curve_csv(ks, comment).write(dir / "ks_curve.csv");
  std::cout << "normalized_ks," << io::format_number(ks.normalized_ks) << "\npass,"
            << (ks.pass ? "true" : "false") << "\n";
}

// ---------------------------------------------------------------- helpers

void cmd_sample(const std::string& pdf, std::size_t n, std::uint64_t seed, const std::string& out,
                const CLI::App& app)
{
  const auto s = AnalyticPdf::from_name(pdf).sample(n, seed);
  io::CsvWriter w({ "x" }, io::provenance_comment(canonical(app), seed));
  for (double x : s.values())
    w.add_row({ io::format_number(x) });
  w.write(out);
}

struct SimArgs
{
  double duration = 400.0, dt = 0.01, sigma = 1.0, tau = 2.0, bound = 4.0;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

void cmd_simulate(const SimArgs& a, const CLI::App& app)
{
  OuParams p;
  p.duration = a.duration;
  p.dt = a.dt;
  p.sigma = a.sigma;
  p.tau = a.tau;
  p.bound = a.bound;
  const auto track = simulate_ou(p, derive_seed(a.seed, 1));
  const auto train = simulate_events(track, bump_intensity, 10.0, a.duration, derive_seed(a.seed, 2));
  const auto comment = io::provenance_comment(canonical(app), a.seed);
  const fs::path dir(a.out_dir);
  io::CsvWriter sp({ "t" }, comment);
  for (double t : train.times)
    sp.add_row({ io::format_number(t) });
  sp.write(dir / "spikes.csv");
  io::CsvWriter cv({ "t", "x", "y" }, comment);
  for (std::size_t k = 0; k < track.steps; ++k)
    cv.add_row({ io::format_number(track.time(k)), io::format_number(track.values[2 * k]),
                 io::format_number(track.values[2 * k + 1]) });
  cv.write(dir / "covariates.csv");
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{ "Band-limited maximum-likelihood density estimation" };
  app.require_subcommand(1);

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit an estimator to a sample CSV");
  f->add_option("--input,-i", fit.input, "Samples CSV (header x or x1..xd)")->required();
  f->add_option("--output,-o", fit.output, "Fit JSON")->required();
  f->add_option("--algo", fit.algo, "trivial|quick|bqp|kde2|kde6|kdesinc")->capture_default_str();
  f->add_option("--fc", fit.fc, "Cut-off frequency, comma separated per dimension");
  f->add_option("--fs", fit.fs, "Sampling rate override for quick");
  f->add_option("--bandwidth", fit.bandwidth, "KDE bandwidth per dimension");
  f->add_option("--kde-constant", fit.kde_constant, "KDE bandwidth constant")->capture_default_str();
  f->add_option("--budget", fit.budget, "BQP orthant budget")->capture_default_str();
  f->add_option("--seed", fit.seed, "Seed for the BQP random starts")->capture_default_str();
  f->add_option("--curve", fit.curve, "Density curve CSV (1-D)");
  f->add_option("--grid", fit.grid, "Curve grid lo:hi:step or list");
  f->add_option("--curve-points", fit.curve_points, "Curve points when --grid is absent");

  MiseArgs mise;
  auto* m = app.add_subcommand("mise", "MISE as a function of n");
  m->add_option("--pdf", mise.pdf, "sinc2|sinc4mix|gaussian")->capture_default_str();
  m->add_option("--estimators", mise.estimators)->capture_default_str();
  m->add_option("--sizes", mise.sizes, "lo..hi (half decades) or list")->capture_default_str();
  m->add_option("--reps", mise.reps)->capture_default_str();
  m->add_option("--seed", mise.seed)->capture_default_str();
  m->add_option("--fc", mise.fc, "Absolute f_c (overrides --fc-ratio)");
  m->add_option("--fc-ratio", mise.fc_ratio, "f_c as a multiple of the true cut-off")->capture_default_str();
  m->add_option("--kde-constant", mise.kde_constant)->capture_default_str();
  m->add_option("--kde6-constant", mise.kde6_constant)->capture_default_str();
  m->add_option("--csv", mise.csv, "Output CSV (stdout when absent)");
  m->add_option("--json", mise.json, "Output JSON");

  ScanArgs scan;
  auto* s = app.add_subcommand("fcscan", "Cut-off frequency scans");
  s->add_option("--mode", scan.mode, "mnll|mise-vs-fc")->capture_default_str();
  s->add_option("--pdf", scan.pdf)->capture_default_str();
  s->add_option("--input,-i", scan.input, "Samples CSV (mnll mode)");
  s->add_option("--n", scan.n)->capture_default_str();
  s->add_option("--reps", scan.reps)->capture_default_str();
  s->add_option("--seed", scan.seed)->capture_default_str();
  s->add_option("--estimator", scan.estimator)->capture_default_str();
  s->add_option("--ratios", scan.ratios, "f_c / f_c_true ratios")->capture_default_str();
  s->add_option("--grid", scan.grid, "f_c grid lo:hi:step or list (mnll)");
  s->add_option("--points", scan.points, "Default log grid size")->capture_default_str();
  s->add_option("--algo", scan.algo, "trivial|quick")->capture_default_str();
  s->add_option("--csv", scan.csv);
  s->add_option("--json", scan.json);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench-time", "Wall-clock time per estimator and n");
  b->add_option("--pdf", bench.pdf)->capture_default_str();
  b->add_option("--estimators", bench.estimators)->capture_default_str();
  b->add_option("--sizes", bench.sizes)->capture_default_str();
  b->add_option("--seed", bench.seed)->capture_default_str();
  b->add_option("--fc", bench.fc, "Absolute f_c (default 2x the true cut-off)");
  b->add_option("--queries", bench.queries)->capture_default_str();
  b->add_option("--repeats", bench.repeats)->capture_default_str();
  b->add_option("--budget", bench.budget, "Skip repeats when the warm-up exceeds this many seconds");
  b->add_option("--csv", bench.csv);

  CifArgs cif;
  auto* c = app.add_subcommand("cif", "Conditional intensity fit and KS goodness of fit");
  c->add_option("--spikes", cif.spikes, "Spike CSV (header t)")->required();
  c->add_option("--covariates", cif.covariates, "Covariate grid CSV (header t,x,y)")->required();
  c->add_option("--backend", cif.backend, "quick|kde2")->capture_default_str();
  c->add_option("--fc", cif.fc, "f_c per covariate dimension (default 1/sd)");
  c->add_option("--fs", cif.fs, "Sampling rate override for quick");
  c->add_option("--domain", cif.domain, "lo:hi per dimension, comma separated");
  c->add_flag("--history", cif.history, "Add h = log(time since last event)");
  c->add_option("--fraction", cif.fraction, "Training fraction")->capture_default_str();
  c->add_option("--kde-constant", cif.kde_constant)->capture_default_str();
  c->add_option("--seed", cif.seed, "Recorded in output comments")->capture_default_str();
  c->add_option("--out-dir", cif.out_dir)->capture_default_str();

  std::string sample_pdf = "sinc4mix", sample_out;
  std::size_t sample_n = 1000;
  std::uint64_t sample_seed = 1;
  auto* sa = app.add_subcommand("sample", "Draw samples from a test density");
  sa->add_option("--pdf", sample_pdf)->capture_default_str();
  sa->add_option("--n", sample_n)->capture_default_str();
  sa->add_option("--seed", sample_seed)->capture_default_str();
  sa->add_option("--output,-o", sample_out)->required();

  SimArgs sim;
  auto* si = app.add_subcommand("simulate", "Simulate an inhomogeneous Poisson train on OU tracks");
  si->add_option("--duration", sim.duration)->capture_default_str();
  si->add_option("--dt", sim.dt)->capture_default_str();
  si->add_option("--sigma", sim.sigma)->capture_default_str();
  si->add_option("--tau", sim.tau)->capture_default_str();
  si->add_option("--bound", sim.bound)->capture_default_str();
  si->add_option("--seed", sim.seed)->capture_default_str();
  si->add_option("--out-dir", sim.out_dir)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*f)
      cmd_fit(fit, app);
    else if (*m)
      cmd_mise(mise, app);
    else if (*s)
      cmd_fcscan(scan, app);
    else if (*b)
      cmd_bench(bench, app);
    else if (*c)
      cmd_cif(cif, app);
    else if (*sa)
      cmd_sample(sample_pdf, sample_n, sample_seed, sample_out, app);
    else if (*si)
      cmd_simulate(sim, app);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const RefusalError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "solver failed: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
