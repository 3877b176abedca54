#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>

#include "transona/config.hpp"
#include "transona/error.hpp"

using namespace transona;

namespace {

const char* kMinimal =
    "[inputs]\n"
    "tutor = \"t.csv\"\n"
    "positions = \"p.csv\"\n"
    "observations = \"o.csv\"\n"
    "layout = \"l.json\"\n";

std::string thrown_message(const std::string& toml) {
  try {
    PipelineConfig::from_toml(toml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("toml subset: sections, comments, quotes, types") {
  auto t = TomlTable::parse(
      "# top comment\n"
      "top = 1\n"
      "[a]\n"
      "s = \"hash # inside quotes stays\"  # trailing comment\n"
      "i = -42\n"
      "f = 2.5\n"
      "b = true\n"
      "\n"
      "[a.b]\n"
      "nested = \"x\"\n");
  CHECK(t.get_int("top", 0) == 1);
  CHECK(t.get_string("a.s", "") == "hash # inside quotes stays");
  CHECK(t.get_int("a.i", 0) == -42);
  CHECK(t.get_double("a.f", 0.0) == 2.5);
  CHECK(t.get_bool("a.b", false));
  CHECK(t.get_string("a.b.nested", "") == "x");
  CHECK(t.has("a.i"));
  CHECK_FALSE(t.has("a.missing"));
}

TEST_CASE("toml subset: parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(TomlTable::parse("[broken\nx = 1\n"),
                       doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_WITH_AS(TomlTable::parse("[ok]\nno equals here\n"),
                       doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_WITH_AS(TomlTable::parse("key =\n"), doctest::Contains("line 1"),
                       ConfigError);
}

TEST_CASE("toml subset: type errors name the key and the offending value") {
  auto t = TomlTable::parse("[a]\nx = pear\n");
  CHECK_THROWS_WITH_AS(t.get_int("a.x", 0), doctest::Contains("a.x"), ConfigError);
  auto t2 = TomlTable::parse("[a]\nx = 1.5.2\n");
  CHECK_THROWS_WITH_AS(t2.get_double("a.x", 0.0), doctest::Contains("1.5.2"), ConfigError);
  auto t3 = TomlTable::parse("[a]\nx = yes\n");
  CHECK_THROWS_AS(t3.get_bool("a.x", false), ConfigError);
}

TEST_CASE("pipeline config: defaults recorded for auditability") {
  auto c = PipelineConfig::from_toml(kMinimal);
  CHECK(c.tutor_path == "t.csv");
  CHECK(c.output_dir == "out");
  CHECK(c.detectors.idle_threshold_s == 120.0);
  CHECK(c.tif.tutor_log_s == 5.0);
  CHECK(c.tif.spatial_s == 20.0);
  CHECK_FALSE(c.tif.binary);
  CHECK(c.unit_mode == UnitMode::WHOLE);
  CHECK(c.positive_group == "LOW");
  CHECK(c.bootstrap_replicates == 1000);
  CHECK_FALSE(c.seed_set);
  CHECK_FALSE(c.alignment.max_range_mm.has_value());
  CHECK(c.threads == 0);

  auto& d = c.defaulted_keys;
  CHECK(std::find(d.begin(), d.end(), "output.dir") != d.end());
  CHECK(std::find(d.begin(), d.end(), "tif.binary") != d.end());
  CHECK(std::find(d.begin(), d.end(), "inputs.tutor") == d.end());
}

TEST_CASE("pipeline config: explicit values override defaults") {
  std::string toml = std::string(kMinimal) +
                     "[output]\ndir = \"results\"\n"
                     "[units]\nmode = \"SPLIT_BY_FIRST_VISIT\"\n"
                     "[tif]\nbinary = true\ntutor_log_s = 7.5\n"
                     "[spatial]\nmax_range_mm = 1500\n"
                     "[bootstrap]\nreplicates = 250\nseed = 99\n"
                     "[afm]\nlambda_delta = 0.5\n"
                     "[run]\nthreads = 4\n"
                     "[offsets]\ntutor_ms = -120\n";
  auto c = PipelineConfig::from_toml(toml);
  CHECK(c.output_dir == "results");
  CHECK(c.unit_mode == UnitMode::SPLIT_BY_FIRST_VISIT);
  CHECK(c.tif.binary);
  CHECK(c.tif.tutor_log_s == 7.5);
  REQUIRE(c.alignment.max_range_mm.has_value());
  CHECK(*c.alignment.max_range_mm == 1500.0);
  CHECK(c.bootstrap_replicates == 250);
  CHECK(c.seed_set);
  CHECK(c.seed == 99);
  CHECK(c.lambda_delta == 0.5);
  CHECK(c.threads == 4);
  CHECK(c.offsets.tutor == -120);
}

TEST_CASE("pipeline config: missing required keys are named") {
  CHECK(thrown_message("").find("inputs.tutor") != std::string::npos);
  CHECK(thrown_message("[inputs]\ntutor = \"t\"\npositions = \"p\"\n"
                       "observations = \"o\"\n")
            .find("inputs.layout") != std::string::npos);
}

TEST_CASE("pipeline config: bad unit mode rejected") {
  CHECK_THROWS_WITH_AS(
      PipelineConfig::from_toml(std::string(kMinimal) + "[units]\nmode = \"HALVES\"\n"),
      doctest::Contains("HALVES"), ConfigError);
}

TEST_CASE("file io: missing file raises a data error") {
  CHECK_THROWS_AS(read_file("/nonexistent/path/config.toml"), DataError);
  CHECK_THROWS_AS(PipelineConfig::from_file("/nonexistent/path/config.toml"), DataError);
}
