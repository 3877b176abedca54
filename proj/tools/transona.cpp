#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "transona/config.hpp"
#include "transona/error.hpp"
#include "transona/pipeline.hpp"
#include "transona/replay.hpp"
#include "transona/synth.hpp"

namespace fs = std::filesystem;
using namespace transona;

namespace {

int env_threads() {
  const char* v = std::getenv("TRANSONA_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) throw ConfigError("TRANSONA_THREADS must be a non-negative integer");
  return static_cast<int>(n);
}

PipelineConfig load_config(const std::string& path, const std::string& out_override,
                           int threads) {
  if (path.empty()) throw ConfigError("--config is required for this subcommand");
  auto cfg = PipelineConfig::from_file(path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (threads > 0) cfg.threads = threads;
  return cfg;
}

void report(const PipelineResult& r) {
  for (const auto& f : r.written_files) std::cout << "wrote " << f << '\n';
}

std::string default_synth_config(const std::string& dir) {
  std::ostringstream os;
  os << "[inputs]\n"
     << "tutor = \"" << dir << "/tutor.csv\"\n"
     << "positions = \"" << dir << "/positions.csv\"\n"
     << "observations = \"" << dir << "/observations.csv\"\n"
     << "layout = \"" << dir << "/layout.json\"\n\n"
     << "[output]\n"
     << "dir = \"" << dir << "/out\"\n\n"
     << "[spatial]\n"
     << "max_range_mm = 1500\n\n"
     << "[bootstrap]\n"
     << "replicates = 400\n"
     << "seed = 7\n";
  return os.str();
}

int run_replay(const PipelineConfig& cfg, const std::string& code_name,
               const std::vector<int>& students, int k) {
  // chain up to afm for groups, but the raw notes come straight off the inputs
  const auto observations = parse_observations(read_file(cfg.observations_path));
  auto res = run_pipeline(cfg, "afm");
  auto merged = stream_from_csv(read_file((fs::path(cfg.output_dir) / "merged.csv").string()));
  std::map<StudentId, std::string> labels;
  std::set<StudentId> targets(students.begin(), students.end());
  for (const auto& [sid, g] : res.groups.groups) {
    labels[sid] = to_string(g);
    if (students.empty()) targets.insert(sid);
  }
  auto rep = replay_windows(observations.notes, merged, targets,
                            Code::from_string(code_name), labels, k);
  const auto text = replay_report_to_text(rep);
  write_file((fs::path(cfg.output_dir) / "replay.txt").string(), text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transmodal ordered network analysis pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  int threads = 0;
  app.add_option("-c,--config", config_path, "TOML config file");
  app.add_option("-o,--out", out_override, "override output directory");
  app.add_option("--threads", threads, "worker cap (TRANSONA_THREADS mirrors this)");

  // stage subcommands share the pipeline; each stops after its stage
  const std::vector<std::pair<std::string, std::string>> stages = {
      {"ingest", "merge"},       {"detect", "detectors"}, {"spatial", "spatial"},
      {"afm", "afm"},            {"units", "units"},      {"accumulate", "accumulate"},
      {"model", "model"},        {"stats", "stats"},      {"render", "render"},
  };
  std::map<std::string, CLI::App*> stage_cmds;
  for (const auto& [name, upto] : stages)
    stage_cmds[name] = app.add_subcommand(name, "run the pipeline through the " + name + " stage");
  auto* run_cmd = app.add_subcommand("run", "run the full pipeline");

  auto* replay_cmd = app.add_subcommand("replay", "extract qualitative replay windows");
  std::string replay_code = "HINT_REQUEST";
  std::vector<int> replay_students;
  int replay_k = 3;
  replay_cmd->add_option("--code", replay_code, "target code");
  replay_cmd->add_option("--students", replay_students, "target student ids (default: all)");
  replay_cmd->add_option("-k", replay_k, "notes per side");

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic classroom dataset");
  SynthParams sp;
  std::string synth_dir = "synth";
  synth_cmd->add_option("--students", sp.students, "student count");
  synth_cmd->add_option("--days", sp.days, "number of class days");
  synth_cmd->add_option("--session-s", sp.session_s, "session length in seconds");
  synth_cmd->add_option("--seed", sp.seed, "generator seed")->required();
  synth_cmd->add_option("--out", synth_dir, "output directory");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (threads == 0) threads = env_threads();

    if (synth_cmd->parsed()) {
      auto out = synth_generate(sp);
      fs::create_directories(synth_dir);
      write_file((fs::path(synth_dir) / "tutor.csv").string(), out.tutor_csv);
      write_file((fs::path(synth_dir) / "positions.csv").string(), out.positions_csv);
      write_file((fs::path(synth_dir) / "observations.csv").string(), out.observations_csv);
      write_file((fs::path(synth_dir) / "layout.json").string(), out.layout_json);
      write_file((fs::path(synth_dir) / "truth.csv").string(), out.truth_csv());
      write_file((fs::path(synth_dir) / "config.toml").string(),
                 default_synth_config(synth_dir));
      std::cout << "wrote synthetic dataset to " << synth_dir << '\n';
      return 0;
    }

    auto cfg = load_config(config_path, out_override, threads);
    if (replay_cmd->parsed()) return run_replay(cfg, replay_code, replay_students, replay_k);
    if (run_cmd->parsed()) {
      report(run_pipeline(cfg));
      return 0;
    }
    for (const auto& [name, upto] : stages)
      if (stage_cmds[name]->parsed()) {
        report(run_pipeline(cfg, upto));
        return 0;
      }
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  }
}
