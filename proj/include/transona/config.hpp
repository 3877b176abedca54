#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transona/detectors.hpp"
#include "transona/ingest.hpp"
#include "transona/render.hpp"
#include "transona/spatial.hpp"
#include "transona/tma.hpp"

namespace transona {

// Minimal TOML-subset reader: [section.sub] tables, scalar values (string,
// integer, float, boolean), '#' comments. Keys are exposed dot-joined.
class TomlTable {
 public:
  static TomlTable parse(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& def);
  std::int64_t get_int(const std::string& key, std::int64_t def);
  double get_double(const std::string& key, double def);
  bool get_bool(const std::string& key, bool def);

  // required variants, throwing ConfigError naming the key
  std::string require_string(const std::string& key);
  std::int64_t require_int(const std::string& key);

  // keys that were absent and filled from defaults (auditability)
  const std::vector<std::string>& defaulted_keys() const { return defaulted_; }
  std::vector<std::string> unused_keys() const;

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> used_;
  std::vector<std::string> defaulted_;
};

struct PipelineConfig {
  std::string tutor_path;
  std::string positions_path;
  std::string observations_path;
  std::string layout_path;
  std::string output_dir;

  ClockOffsets offsets;
  DetectorParams detectors;
  AlignmentParams alignment;
  VisitParams visits;
  TifConfig tif;
  double lambda_theta = 1.0;
  double lambda_delta = 1.0;
  UnitMode unit_mode = UnitMode::WHOLE;
  std::string positive_group = "LOW";
  std::size_t bootstrap_replicates = 1000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  RenderStyle style;
  int threads = 0;  // 0 = hardware default

  std::vector<std::string> defaulted_keys;

  static PipelineConfig from_toml(const std::string& text);
  static PipelineConfig from_file(const std::string& path);
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace transona
