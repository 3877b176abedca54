#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = TRANSONA_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

int run_env(const std::string& env, const std::string& args) {
  const std::string cmd = env + " " + kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::path("cli_scratch") / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  std::string operator/(const std::string& f) const { return (dir / f).string(); }
};

// one shared synthetic dataset per test binary run
const Scratch& dataset() {
  static Scratch s("data");
  static bool made = false;
  if (!made) {
    REQUIRE(run("synth --seed 7 --students 8 --days 2 --out " + s.dir.string()) == 0);
    made = true;
  }
  return s;
}

}  // namespace

TEST_CASE("synth writes a complete self-contained dataset") {
  const auto& d = dataset();
  for (const char* f :
       {"tutor.csv", "positions.csv", "observations.csv", "layout.json", "truth.csv",
        "config.toml"})
    CHECK(fs::exists(d.dir / f));
  CHECK(run("synth") == 2);  // --seed is required
}

TEST_CASE("run: exit 0 and the documented artifacts") {
  const auto& d = dataset();
  Scratch out("run_out");
  REQUIRE(run("run -c " + (d / "config.toml") + " -o " + out.dir.string()) == 0);
  for (const char* f :
       {"visits.csv", "merged.csv", "learning_rates.csv", "units.csv", "adjacency.csv",
        "scores.csv", "scores_intutor.csv", "basis.json", "nodes.csv", "stats.json",
        "network_low.svg", "network_high.svg", "subtracted.svg", "network_low.dot",
        "run_metadata.json"})
    CHECK(fs::exists(out.dir / f));
}

TEST_CASE("repeated runs are byte identical") {
  const auto& d = dataset();
  Scratch a("det_a"), b("det_b");
  REQUIRE(run("run -c " + (d / "config.toml") + " -o " + a.dir.string()) == 0);
  REQUIRE(run("run -c " + (d / "config.toml") + " -o " + b.dir.string()) == 0);
  CHECK(slurp(a.dir / "stats.json") == slurp(b.dir / "stats.json"));
  CHECK(slurp(a.dir / "network_low.svg") == slurp(b.dir / "network_low.svg"));
  CHECK(slurp(a.dir / "scores.csv") == slurp(b.dir / "scores.csv"));
}

TEST_CASE("stage subcommands stop after their stage") {
  const auto& d = dataset();
  Scratch out("stage_out");
  REQUIRE(run("ingest -c " + (d / "config.toml") + " -o " + out.dir.string()) == 0);
  CHECK(fs::exists(out.dir / "merged.csv"));
  CHECK_FALSE(fs::exists(out.dir / "learning_rates.csv"));
  CHECK_FALSE(fs::exists(out.dir / "stats.json"));

  REQUIRE(run("afm -c " + (d / "config.toml") + " -o " + out.dir.string()) == 0);
  CHECK(fs::exists(out.dir / "learning_rates.csv"));
  CHECK_FALSE(fs::exists(out.dir / "adjacency.csv"));
}

TEST_CASE("replay writes a report file") {
  const auto& d = dataset();
  Scratch out("replay_out");
  REQUIRE(run("replay -c " + (d / "config.toml") + " -o " + out.dir.string() + " -k 2") ==
          0);
  CHECK(fs::exists(out.dir / "replay.txt"));
}

TEST_CASE("exit codes: 2 for config problems") {
  Scratch s("cfg_err");
  CHECK(run("run") == 2);  // no --config at all
  std::ofstream(s / "bad.toml") << "[broken\n";
  CHECK(run("run -c " + (s / "bad.toml")) == 2);
  std::ofstream(s / "incomplete.toml") << "[inputs]\ntutor = \"t.csv\"\n";
  CHECK(run("run -c " + (s / "incomplete.toml")) == 2);
  CHECK(run("bogus-subcommand") == 2);
}

TEST_CASE("exit codes: 3 for data problems") {
  Scratch s("data_err");
  std::ofstream(s / "ghost.toml") << "[inputs]\n"
                                  << "tutor = \"" << (s / "missing.csv") << "\"\n"
                                  << "positions = \"" << (s / "missing.csv") << "\"\n"
                                  << "observations = \"" << (s / "missing.csv") << "\"\n"
                                  << "layout = \"" << (s / "missing.json") << "\"\n";
  CHECK(run("run -c " + (s / "ghost.toml")) == 3);
}

TEST_CASE("TRANSONA_THREADS mirrors --threads") {
  const auto& d = dataset();
  Scratch out("thr_out");
  CHECK(run_env("TRANSONA_THREADS=2",
                "run -c " + (d / "config.toml") + " -o " + out.dir.string()) == 0);
  CHECK(fs::exists(out.dir / "stats.json"));
  CHECK(run_env("TRANSONA_THREADS=banana",
                "run -c " + (d / "config.toml") + " -o " + out.dir.string()) == 2);

  // thread count must not change the results
  Scratch serial("thr_serial");
  REQUIRE(run("run --threads 1 -c " + (d / "config.toml") + " -o " +
              serial.dir.string()) == 0);
  Scratch wide("thr_wide");
  REQUIRE(run("run --threads 8 -c " + (d / "config.toml") + " -o " + wide.dir.string()) ==
          0);
  CHECK(slurp(serial.dir / "stats.json") == slurp(wide.dir / "stats.json"));
  CHECK(slurp(serial.dir / "adjacency.csv") == slurp(wide.dir / "adjacency.csv"));
}
