#include "blml/algorithms.hpp"
#include "blml/errors.hpp"
#include "blml/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace blml;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content)
{
  const auto p = fs::temp_directory_path() / ("blml_io_" + name);
  std::ofstream(p) << content;
  return p;
}

} // namespace

TEST(Csv, ParsesCommentsAndBlanks)
{
  const auto d = io::parse_csv("# made by hand\nx,y\n1,2\n\n3.5,-4e-3\n");
  EXPECT_EQ(d.columns, (std::vector<std::string>{ "x", "y" }));
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_EQ(d.rows[1][1], -4e-3);
}

TEST(Csv, ReportsLineOfBadCell)
{
  try {
    io::parse_csv("x\n1\nabc\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(io::parse_csv("x,y\n1\n"), ParseError);
}

TEST(ReadSamples, OneAndTwoDimensional)
{
  const auto a = io::read_samples(temp_file("a.csv", "x\n0.5\n1.5\n"));
  EXPECT_EQ(a.dim(), 1u);
  EXPECT_EQ(a.size(), 2u);
  const auto b = io::read_samples(temp_file("b.csv", "x1,x2\n0,1\n2,3\n4,5\n"));
  EXPECT_EQ(b.dim(), 2u);
  EXPECT_EQ(b(2, 1), 5.0);
  EXPECT_THROW(io::read_samples(temp_file("c.csv", "t\n1\n")), ParseError);
  EXPECT_THROW(io::read_samples("/nonexistent/blml.csv"), ConfigError);
}

TEST(ReadCovariateTrack, RequiresUniformGrid)
{
  const auto t = io::read_covariate_track(temp_file("t.csv", "t,x\n0,1\n0.5,2\n1.0,3\n"));
  EXPECT_EQ(t.steps, 3u);
  EXPECT_DOUBLE_EQ(t.dt, 0.5);
  EXPECT_THROW(io::read_covariate_track(temp_file("u.csv", "t,x\n0,1\n0.5,2\n1.5,3\n")), ParseError);
}

TEST(FormatNumber, RoundTrips)
{
  for (double v : { 0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0 })
    EXPECT_EQ(std::stod(io::format_number(v)), v);
  EXPECT_EQ(io::format_number(0.5), "0.5");
}

TEST(CsvWriter, CommentHeaderRows)
{
  io::CsvWriter w({ "a", "b" }, io::provenance_comment("cfg", 7));
  w.add_row({ "1", "2" });
  const auto s = w.str();
  EXPECT_EQ(s.rfind("# config_hash=", 0), 0u);
  EXPECT_NE(s.find(",seed=7\na,b\n1,2\n"), std::string::npos);
  EXPECT_THROW(w.add_row({ "1" }), Error);
}

TEST(ConfigHash, StableAndSensitive)
{
  EXPECT_EQ(io::config_hash("abc"), io::config_hash("abc"));
  EXPECT_NE(io::config_hash("abc"), io::config_hash("abd"));
  EXPECT_EQ(io::config_hash("").size(), 16u);
}

TEST(WriteAtomic, ReplacesContent)
{
  const auto p = fs::temp_directory_path() / "blml_io_atomic.txt";
  io::write_atomic(p, "one");
  io::write_atomic(p, "two");
  std::ifstream in(p);
  std::string s;
  in >> s;
  EXPECT_EQ(s, "two");
}

TEST(Json, FitRoundTrip)
{
  const auto fit = fit_trivial(SampleSet({ 0.0, 0.5, 1.7 }), 0.8);
  const auto j = io::to_json(fit);
  EXPECT_EQ(j["coefficients"].size(), 3u);
  const auto back = io::blml_fit_from_json(j);
  EXPECT_EQ(back.nodes.values(), fit.nodes.values());
  for (int i = 0; i < 3; ++i)
    EXPECT_EQ(back.coefficients.values[i], fit.coefficients.values[i]);
  const double x = 0.3;
  EXPECT_EQ(eval_density(back, std::span<const double>(&x, 1)), eval_density(fit, std::span<const double>(&x, 1)));
}
