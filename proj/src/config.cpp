#include "transona/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "transona/csv.hpp"
#include "transona/error.hpp"

namespace transona {

TomlTable TomlTable::parse(const std::string& text) {
  TomlTable table;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    // strip comments outside quotes
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        line = line.substr(0, i);
        break;
      }
    }
    line = csv::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": bad table header");
      section = csv::trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = csv::trim(line.substr(0, eq));
    std::string value = csv::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    const std::string full = section.empty() ? key : section + "." + key;
    table.values_[full] = value;
    table.used_[full] = false;
  }
  return table;
}

std::string TomlTable::get_string(const std::string& key, const std::string& def) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    defaulted_.push_back(key);
    return def;
  }
  used_[key] = true;
  return it->second;
}

std::int64_t TomlTable::get_int(const std::string& key, std::int64_t def) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    defaulted_.push_back(key);
    return def;
  }
  used_[key] = true;
  char* end = nullptr;
  const std::int64_t v = std::strtoll(it->second.c_str(), &end, 10);
  if (end != it->second.c_str() + it->second.size())
    throw ConfigError("config key '" + key + "': expected integer, got '" + it->second + "'");
  return v;
}

double TomlTable::get_double(const std::string& key, double def) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    defaulted_.push_back(key);
    return def;
  }
  used_[key] = true;
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end != it->second.c_str() + it->second.size())
    throw ConfigError("config key '" + key + "': expected number, got '" + it->second + "'");
  return v;
}

bool TomlTable::get_bool(const std::string& key, bool def) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    defaulted_.push_back(key);
    return def;
  }
  used_[key] = true;
  if (it->second == "true") return true;
  if (it->second == "false") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + it->second + "'");
}

std::string TomlTable::require_string(const std::string& key) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config: missing required key '" + key + "'");
  used_[key] = true;
  return it->second;
}

std::int64_t TomlTable::require_int(const std::string& key) {
  if (!has(key)) throw ConfigError("config: missing required key '" + key + "'");
  return get_int(key, 0);
}

std::vector<std::string> TomlTable::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, used] : used_)
    if (!used) out.push_back(k);
  return out;
}

PipelineConfig PipelineConfig::from_toml(const std::string& text) {
  TomlTable t = TomlTable::parse(text);
  PipelineConfig c;
  c.tutor_path = t.require_string("inputs.tutor");
  c.positions_path = t.require_string("inputs.positions");
  c.observations_path = t.require_string("inputs.observations");
  c.layout_path = t.require_string("inputs.layout");
  c.output_dir = t.get_string("output.dir", "out");

  c.offsets.tutor = t.get_int("offsets.tutor_ms", 0);
  c.offsets.detector = t.get_int("offsets.detector_ms", 0);
  c.offsets.observation = t.get_int("offsets.observation_ms", 0);
  c.offsets.spatial = t.get_int("offsets.spatial_ms", 0);

  c.detectors.idle_threshold_s = t.get_double("detectors.idle_threshold_s", 120.0);
  c.detectors.misuse_gap_s = t.get_double("detectors.misuse_gap_s", 3.0);
  c.detectors.misuse_run_len = static_cast<int>(t.get_int("detectors.misuse_run_len", 3));
  c.detectors.struggle_window = static_cast<int>(t.get_int("detectors.struggle_window", 8));
  c.detectors.struggle_rate_cutoff = t.get_double("detectors.struggle_rate_cutoff", 0.3);
  c.detectors.struggle_cooldown =
      static_cast<int>(t.get_int("detectors.struggle_cooldown", 10));

  c.alignment.cos_threshold =
      t.get_double("spatial.cos_threshold", 0.7071067811865476);
  c.alignment.min_displacement_mm = t.get_double("spatial.min_displacement_mm", 50.0);
  if (t.has("spatial.max_range_mm"))
    c.alignment.max_range_mm = t.get_double("spatial.max_range_mm", 0.0);
  c.visits.radius_mm = t.get_double("spatial.visit_radius_mm", 1000.0);
  c.visits.min_duration_s = t.get_double("spatial.visit_min_duration_s", 10.0);

  c.tif.tutor_log_s = t.get_double("tif.tutor_log_s", 5.0);
  c.tif.detector_s = t.get_double("tif.detector_s", 10.0);
  c.tif.observation_s = t.get_double("tif.observation_s", 15.0);
  c.tif.spatial_s = t.get_double("tif.spatial_s", 20.0);
  c.tif.binary = t.get_bool("tif.binary", false);

  c.lambda_theta = t.get_double("afm.lambda_theta", 1.0);
  c.lambda_delta = t.get_double("afm.lambda_delta", 1.0);

  const std::string mode = t.get_string("units.mode", "WHOLE");
  if (mode == "WHOLE") c.unit_mode = UnitMode::WHOLE;
  else if (mode == "SPLIT_BY_FIRST_VISIT") c.unit_mode = UnitMode::SPLIT_BY_FIRST_VISIT;
  else throw ConfigError("config key 'units.mode': unknown mode '" + mode + "'");

  c.positive_group = t.get_string("model.positive_group", "LOW");
  c.bootstrap_replicates =
      static_cast<std::size_t>(t.get_int("bootstrap.replicates", 1000));
  if (t.has("bootstrap.seed")) {
    c.seed = static_cast<std::uint64_t>(t.get_int("bootstrap.seed", 0));
    c.seed_set = true;
  }

  c.style.canvas_w = t.get_double("render.canvas_w", 800.0);
  c.style.canvas_h = t.get_double("render.canvas_h", 600.0);
  c.style.edge_width_scale = t.get_double("render.edge_width_scale", 12.0);
  c.style.node_radius_scale = t.get_double("render.node_radius_scale", 40.0);
  c.style.edge_threshold_frac = t.get_double("render.edge_threshold_frac", 0.05);
  c.style.color_positive = t.get_string("render.color_positive", "#c0392b");
  c.style.color_negative = t.get_string("render.color_negative", "#2471a3");

  c.threads = static_cast<int>(t.get_int("run.threads", 0));

  c.defaulted_keys = t.defaulted_keys();
  return c;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  return from_toml(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

}  // namespace transona
