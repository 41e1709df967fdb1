#pragma once

#include "blml/bandwidth.hpp"
#include "blml/kde.hpp"
#include "blml/pointprocess.hpp"
#include "blml/solver.hpp"
#include "blml/surrogate.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace blml::io {

//! Numeric CSV: a header row, then one row per record. Lines starting with
//! '#' and blank lines are skipped. Throws ParseError with the line number.
struct CsvData
{
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

CsvData read_csv(const std::filesystem::path& path);
CsvData parse_csv(const std::string& text, const std::string& origin = "<string>");

//! Samples with header `x` or `x1,...,xd`.
SampleSet read_samples(const std::filesystem::path& path);
//! Event times with header `t`.
std::vector<double> read_spike_times(const std::filesystem::path& path);
//! Covariate grid with header `t,<names...>` on a uniform time step.
CovariateTrack read_covariate_track(const std::filesystem::path& path);

//! Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

//! Shortest round-trip representation ("%.17g" trimmed).
std::string format_number(double v);

//! Tabular output: comment line, header, rows.
class CsvWriter
{
public:
  CsvWriter(std::vector<std::string> columns, std::string comment);
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  void write(const std::filesystem::path& path) const { write_atomic(path, str()); }

private:
  std::vector<std::string> columns_;
  std::string comment_;
  std::vector<std::vector<std::string>> rows_;
};

//! "# config_hash=<16 hex>,seed=<seed>".
std::string provenance_comment(const std::string& canonical_config, std::uint64_t seed);
//! FNV-1a 64-bit hash, hex encoded.
std::string config_hash(const std::string& canonical_config);

nlohmann::json to_json(const BlmlFit& fit);
nlohmann::json to_json(const KdeModel& model);
nlohmann::json to_json(const MiseReport& report);
nlohmann::json to_json(const KsReport& report);
nlohmann::json to_json(const MnllScan& scan);
nlohmann::json to_json(const CifModel& model);

//! Rebuilds a fit written by to_json.
BlmlFit blml_fit_from_json(const nlohmann::json& j);

CsvWriter mise_csv(const std::vector<MiseReport>& reports, const std::string& comment);
CsvWriter mnll_csv(const MnllScan& scan, const std::string& comment);
CsvWriter ks_curve_csv(const KsReport& report, const std::string& comment);

} // namespace blml::io
