#include "blml/io.hpp"

#include "blml/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace blml::io {

namespace {

std::string trim(std::string_view s)
{
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos)
    return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

std::vector<std::string> split(const std::string& line)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& cell, std::size_t line, const std::string& origin)
{
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+')
    ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty())
    throw ParseError(origin + ": '" + cell + "' is not a number", line);
  if (!std::isfinite(v))
    throw ParseError(origin + ": non-finite value '" + cell + "'", line);
  return v;
}

} // namespace

CsvData parse_csv(const std::string& text, const std::string& origin)
{
  CsvData data;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#')
      continue;
    auto cells = split(t);
    if (!header) {
      data.columns = std::move(cells);
      for (const auto& c : data.columns)
        if (c.empty())
          throw ParseError(origin + ": empty column name in header", lineno);
      header = true;
      continue;
    }
    if (cells.size() != data.columns.size())
      throw ParseError(origin + ": expected " + std::to_string(data.columns.size()) +
                         " fields, found " + std::to_string(cells.size()),
                       lineno);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells)
      row.push_back(parse_number(c, lineno, origin));
    data.rows.push_back(std::move(row));
  }
  if (!header)
    throw ParseError(origin + ": missing header row", 0);
  return data;
}

CsvData read_csv(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path.string());
}

SampleSet read_samples(const std::filesystem::path& path)
{
  const auto data = read_csv(path);
  const std::size_t d = data.columns.size();
  if (d == 1) {
    if (data.columns[0] != "x")
      throw ParseError(path.string() + ": sample header must be 'x' or 'x1,...,xd'", 1);
  } else {
    for (std::size_t j = 0; j < d; ++j)
      if (data.columns[j] != "x" + std::to_string(j + 1))
        throw ParseError(path.string() + ": sample header must be 'x' or 'x1,...,xd'", 1);
  }
  if (data.rows.empty())
    throw ParseError(path.string() + ": no samples", 0);
  std::vector<double> values;
  values.reserve(data.rows.size() * d);
  for (const auto& r : data.rows)
    values.insert(values.end(), r.begin(), r.end());
  return SampleSet(d, std::move(values), path.string());
}

std::vector<double> read_spike_times(const std::filesystem::path& path)
{
  const auto data = read_csv(path);
  if (data.columns.size() != 1 || data.columns[0] != "t")
    throw ParseError(path.string() + ": spike header must be 't'", 1);
  std::vector<double> t;
  for (const auto& r : data.rows)
    t.push_back(r[0]);
  return t;
}

CovariateTrack read_covariate_track(const std::filesystem::path& path)
{
  const auto data = read_csv(path);
  if (data.columns.empty() || data.columns[0] != "t")
    throw ParseError(path.string() + ": covariate header must start with 't'", 1);
  if (data.rows.size() < 2)
    throw ParseError(path.string() + ": need at least two grid rows", 0);
  CovariateTrack tr;
  tr.dim = data.columns.size() - 1;
  tr.names.assign(data.columns.begin() + 1, data.columns.end());
  tr.t0 = data.rows[0][0];
  tr.steps = data.rows.size();
  tr.dt = (data.rows.back()[0] - tr.t0) / static_cast<double>(tr.steps - 1);
  if (!(tr.dt > 0.0))
    throw ParseError(path.string() + ": time column must increase", 0);
  for (std::size_t k = 0; k < tr.steps; ++k) {
    if (std::abs(data.rows[k][0] - tr.time(k)) > 1e-6 * tr.dt + 1e-9 * std::abs(tr.time(k)))
      throw ParseError(path.string() + ": time grid is not uniform", 0);
    tr.values.insert(tr.values.end(), data.rows[k].begin() + 1, data.rows[k].end());
  }
  return tr;
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  std::filesystem::create_directories(dir);
  const auto tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out)
      throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

std::string format_number(double v)
{
  if (std::isnan(v))
    return "nan";
  char buf[32];
  // shortest representation that round-trips
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v)
      break;
  }
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns, std::string comment)
  : columns_(std::move(columns))
  , comment_(std::move(comment))
{}

void CsvWriter::add_row(std::vector<std::string> cells)
{
  if (cells.size() != columns_.size())
    throw DomainError("CsvWriter: row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvWriter::str() const
{
  std::string out;
  if (!comment_.empty())
    out += comment_ + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k)
        out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_)
    line(r);
  return out;
}

std::string config_hash(const std::string& canonical)
{
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string provenance_comment(const std::string& canonical, std::uint64_t seed)
{
  return "# config_hash=" + config_hash(canonical) + ",seed=" + std::to_string(seed);
}

// ---------------------------------------------------------------- JSON

nlohmann::json to_json(const BlmlFit& fit)
{
  nlohmann::json j;
  j["algorithm"] = fit.algorithm;
  j["dim"] = fit.nodes.dim();
  j["n"] = fit.n;
  j["fc"] = fit.fc.values();
  j["nodes"] = fit.nodes.values();
  j["weights"] = fit.weights;
  const auto& c = fit.coefficients.values;
  j["coefficients"] = std::vector<double>(c.data(), c.data() + c.size());
  j["residual_norm"] = fit.coefficients.residual_norm;
  j["iterations"] = fit.coefficients.iterations;
  j["log_likelihood"] = fit.log_likelihood();
  j["diagnostics"] = { { "budget_terminated", fit.diagnostics.budget_terminated },
                       { "orthants_visited", fit.diagnostics.orthants_visited },
                       { "likelihood_trace", fit.diagnostics.likelihood_trace },
                       { "bqp_objective", fit.diagnostics.bqp_objective } };
  return j;
}

BlmlFit blml_fit_from_json(const nlohmann::json& j)
{
  try {
    BlmlFit fit;
    const auto dim = j.at("dim").get<std::size_t>();
    fit.nodes = SampleSet(dim, j.at("nodes").get<std::vector<double>>());
    fit.weights = j.at("weights").get<Weights>();
    const auto c = j.at("coefficients").get<std::vector<double>>();
    fit.coefficients.values = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    std::vector<std::int8_t> s;
    for (double v : c)
      s.push_back(v > 0 ? 1 : -1);
    fit.coefficients.orthant = OrthantVector(std::move(s));
    fit.coefficients.residual_norm = j.value("residual_norm", 0.0);
    fit.coefficients.iterations = j.value("iterations", 0);
    fit.fc = CutoffFrequency(j.at("fc").get<std::vector<double>>());
    fit.n = j.at("n").get<std::size_t>();
    fit.algorithm = j.value("algorithm", std::string());
    if (fit.weights.size() != fit.nodes.size() || c.size() != fit.nodes.size())
      throw DomainError("fit JSON: node, weight and coefficient counts differ");
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("fit JSON: ") + e.what(), 0);
  }
}

nlohmann::json to_json(const KdeModel& m)
{
  nlohmann::json j;
  j["algorithm"] = to_string(m.kind);
  j["dim"] = m.samples.dim();
  j["n"] = m.samples.size();
  if (m.fc)
    j["fc"] = m.fc->values();
  else
    j["bandwidth"] = m.bandwidth;
  return j;
}

nlohmann::json to_json(const MiseReport& r)
{
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < r.sizes.size(); ++k)
    rows.push_back({ { "n", r.sizes[k] },
                     { "mean_ise", r.mean_ise[k] },
                     { "stderr_ise", r.stderr_ise[k] },
                     { "failures", r.failures[k] },
                     { "ise", r.ise[k] } });
  return { { "estimator", r.estimator }, { "pdf", r.pdf }, { "fc", r.fc },
           { "reps", r.reps },           { "seed", r.seed }, { "sizes", rows } };
}

nlohmann::json to_json(const KsReport& r)
{
  return { { "m", r.z.size() },
           { "ks_distance", r.ks_distance },
           { "normalized_ks", r.normalized_ks },
           { "pass", r.pass },
           { "clamped_rows", r.clamped_rows } };
}

nlohmann::json to_json(const MnllScan& s)
{
  auto clean = [](const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v)
      a.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
    return a;
  };
  return { { "n", s.n },
           { "algorithm", s.algorithm },
           { "fc", s.fc },
           { "mnll", clean(s.mnll) },
           { "dmnll_fd", clean(s.dmnll_fd) },
           { "dmnll_analytic", clean(s.dmnll_analytic) } };
}

nlohmann::json to_json(const CifModel& m)
{
  auto density = [](const BoxDensity& b) {
    nlohmann::json j = b.blml ? to_json(*b.blml) : to_json(*b.kde);
    j["box_mass"] = b.mass;
    return j;
  };
  return { { "backend", m.backend == CifBackend::quick ? "quick" : "kde2" },
           { "rate", m.rate },
           { "events", m.events },
           { "duration", m.duration },
           { "domain_lo", m.domain.lo },
           { "domain_hi", m.domain.hi },
           { "use_track", m.covariates.use_track },
           { "use_history", m.covariates.use_history },
           { "floor_activations", m.floor_activations->load() },
           { "numerator", density(m.numerator) },
           { "denominator", density(m.denominator) } };
}

// ---------------------------------------------------------------- CSV tables

CsvWriter mise_csv(const std::vector<MiseReport>& reports, const std::string& comment)
{
  CsvWriter w({ "estimator", "n", "rep_count", "mean_ise", "stderr_ise" }, comment);
  for (const auto& r : reports)
    for (std::size_t k = 0; k < r.sizes.size(); ++k)
      w.add_row({ r.estimator, std::to_string(r.sizes[k]), std::to_string(r.ise[k].size()),
                  format_number(r.mean_ise[k]), format_number(r.stderr_ise[k]) });
  return w;
}

CsvWriter mnll_csv(const MnllScan& s, const std::string& comment)
{
  CsvWriter w({ "fc", "mnll", "dmnll_fd", "dmnll_analytic" }, comment);
  for (std::size_t k = 0; k < s.fc.size(); ++k)
    w.add_row({ format_number(s.fc[k]), format_number(s.mnll[k]), format_number(s.dmnll_fd[k]),
                format_number(s.dmnll_analytic[k]) });
  return w;
}

CsvWriter ks_curve_csv(const KsReport& r, const std::string& comment)
{
  CsvWriter w({ "model_cdf", "empirical_cdf", "z" }, comment);
  for (std::size_t k = 0; k < r.z.size(); ++k)
    w.add_row({ format_number(r.model_cdf[k]), format_number(r.empirical_cdf[k]),
                format_number(r.z[k]) });
  return w;
}

} // namespace blml::io
