#include "transona/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "transona/detectors.hpp"
#include "transona/error.hpp"
#include "transona/render.hpp"
#include "transona/spatial.hpp"
#include "transona/tma.hpp"

namespace transona {

namespace fs = std::filesystem;
using json = nlohmann::json;

void assign_sessions(std::vector<Event>& events, const std::vector<Event>& tutor_events) {
  struct Span {
    Millis lo, hi;
    std::string day;
    int period;
  };
  std::map<std::pair<std::string, int>, Span> spans;
  for (const auto& e : tutor_events) {
    auto key = std::make_pair(e.day, e.period);
    auto it = spans.find(key);
    if (it == spans.end())
      spans[key] = {e.timestamp, e.timestamp, e.day, e.period};
    else {
      it->second.lo = std::min(it->second.lo, e.timestamp);
      it->second.hi = std::max(it->second.hi, e.timestamp);
    }
  }
  if (spans.empty()) return;
  for (auto& e : events) {
    if (!e.day.empty()) continue;
    const Span* best = nullptr;
    Millis best_d = 0;
    for (const auto& [k, s] : spans) {
      Millis d = 0;
      if (e.timestamp < s.lo) d = s.lo - e.timestamp;
      else if (e.timestamp > s.hi) d = e.timestamp - s.hi;
      if (!best || d < best_d) {
        best = &s;
        best_d = d;
      }
    }
    e.day = best->day;
    e.period = best->period;
  }
}

std::vector<Code> in_tutor_universe() {
  return {Code(Code::CORRECT_ATTEMPT), Code(Code::CORRECT_FIRST_ATTEMPT),
          Code(Code::INCORRECT_ATTEMPT), Code(Code::HINT_REQUEST),
          Code(Code::STRUGGLING), Code(Code::IDLING), Code(Code::TUTOR_MISUSE)};
}

namespace {

std::vector<std::pair<UnitKey, AdjacencyVector>> accumulate_units(
    const std::map<UnitKey, UnitContext>& units, const TifConfig& tif,
    const std::vector<Code>& universe, int threads) {
  std::vector<const UnitContext*> ctx;
  std::vector<UnitKey> keys;
  for (const auto& [k, u] : units) {
    keys.push_back(k);
    ctx.push_back(&u);
  }
  std::vector<AdjacencyVector> vecs(ctx.size());
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(ctx.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < ctx.size(); ++i) vecs[i] = accumulate(*ctx[i], tif, universe);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < ctx.size(); i = next.fetch_add(1))
          vecs[i] = accumulate(*ctx[i], tif, universe);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<std::pair<UnitKey, AdjacencyVector>> out;
  for (std::size_t i = 0; i < keys.size(); ++i)
    out.emplace_back(keys[i], std::move(vecs[i]));
  return out;
}

json rank_test_json(const RankTestResult& r) {
  return json{{"statistic", r.statistic},
              {"z", r.z},
              {"p", r.p},
              {"r", r.r},
              {"method", r.method == PValueMethod::EXACT ? "EXACT" : "NORMAL_APPROX"},
              {"n1", r.n1},
              {"n2", r.n2}};
}

json glm_json(const GlmFit& f) {
  std::vector<double> coef(f.coefficients.data(), f.coefficients.data() + f.coefficients.size());
  return json{{"coefficients", coef},
              {"log_likelihood", f.log_likelihood},
              {"aic", f.aic},
              {"k", f.k},
              {"converged", f.converged}};
}

struct OnaModel {
  WeightMatrix normalized;
  RotationBasis basis;
  Scores scores;
  std::vector<int> labels;  // HIGH = 1
  Eigen::MatrixXd score_matrix;
};

OnaModel build_model(const std::vector<std::pair<UnitKey, AdjacencyVector>>& adj_in,
                     const std::map<StudentId, std::string>& group_labels,
                     const std::string& positive_group) {
  auto adj = adj_in;
  // units without a fitted learning-rate group cannot enter the grouped model
  adj.erase(std::remove_if(adj.begin(), adj.end(),
                           [&](const auto& p) {
                             auto it = group_labels.find(p.first.student);
                             return it == group_labels.end() || it->second.empty();
                           }),
            adj.end());
  if (adj.empty()) throw DataError("no units with group labels");
  OnaModel m;
  auto matrix = to_weight_matrix(adj, group_labels);
  m.normalized = sphere_normalize(matrix);
  auto [basis, scores] = means_rotation(m.normalized, positive_group);
  m.basis = std::move(basis);
  m.scores = std::move(scores);
  const auto n = static_cast<Eigen::Index>(m.scores.units.size());
  m.score_matrix.resize(n, 2);
  m.score_matrix.col(0) = m.scores.x;
  m.score_matrix.col(1) = m.scores.y;
  for (std::size_t i = 0; i < m.normalized.groups.size(); ++i)
    m.labels.push_back(m.normalized.groups[i] == "HIGH" ? 1 : 0);
  return m;
}

std::string units_to_csv(const std::map<UnitKey, UnitContext>& units) {
  std::ostringstream os;
  os << "unit,phase,event_count\n";
  for (const auto& [key, u] : units) {
    UnitKey base = key;
    base.phase.reset();
    os << base.label() << ',';
    if (key.phase)
      os << (*key.phase == VisitPhase::PRE_VISIT ? "PRE_VISIT" : "POST_VISIT");
    os << ',' << u.events.size() << '\n';
  }
  return os.str();
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const std::string& upto) {
  fs::create_directories(config.output_dir);
  PipelineResult result;
  auto save = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(config.output_dir) / name).string();
    write_file(path, content);
    result.written_files.push_back(path);
  };
  auto done = [&](const char* s) { return !upto.empty() && upto == s; };

  std::string stage = "config";
  try {
    stage = "ingest";
    const auto tutor_rows = parse_tutor_rows(read_file(config.tutor_path));
    const auto position_samples = parse_positions(read_file(config.positions_path));
    const auto observations = parse_observations(read_file(config.observations_path));
    const auto layout = parse_layout(read_file(config.layout_path));
    auto tutor_events = tutor_rows_to_events(tutor_rows);
    if (done("ingest")) {
      save("tutor_events.csv", stream_to_csv(tutor_events));
      save("observation_events.csv", stream_to_csv(observations.events));
      return result;
    }

    stage = "detectors";
    auto detector_events = run_detectors(tutor_rows, config.detectors);
    if (done("detectors")) {
      save("detector_events.csv", stream_to_csv(detector_events));
      return result;
    }

    stage = "spatial";
    std::vector<PositionSample> teacher;
    std::string teacher_tag;
    for (const auto& s : position_samples)
      if (s.tag == "teacher") teacher_tag = "teacher";
    if (teacher_tag.empty() && !position_samples.empty())
      teacher_tag = position_samples.front().tag;
    for (const auto& s : position_samples)
      if (s.tag == teacher_tag) teacher.push_back(s);
    auto orientations = infer_orientation(teacher, config.alignment);
    auto alignment_events = screen_alignment(orientations, teacher, layout, config.alignment);
    auto visits = detect_visits(teacher, layout, config.visits);
    auto first_visits = first_visit_times(visits);
    save("visits.csv", visits_to_csv(visits));
    if (done("spatial")) {
      save("alignment_events.csv", stream_to_csv(alignment_events));
      return result;
    }

    stage = "merge";
    auto merged = merge_streams({{tutor_events, config.offsets.tutor},
                                 {detector_events, config.offsets.detector},
                                 {observations.events, config.offsets.observation},
                                 {alignment_events, config.offsets.spatial}});
    assign_sessions(merged, tutor_events);
    save("merged.csv", stream_to_csv(merged));
    if (done("merge")) return result;

    stage = "afm";
    std::vector<Event> merged_tutor;
    for (const auto& e : merged)
      if (e.source == EventSource::TUTOR_LOG) merged_tutor.push_back(e);
    auto table = build_opportunity_table(merged_tutor);
    auto fit = fit_iafm(table.rows, config.lambda_theta, config.lambda_delta);
    if (!fit.converged) throw NumericError("iAFM did not converge");
    result.groups = median_split(fit);
    save("learning_rates.csv", learning_rates_to_csv(fit, result.groups));
    std::map<StudentId, std::string> group_labels;
    for (const auto& [sid, g] : result.groups.groups) group_labels[sid] = to_string(g);
    if (done("afm")) return result;

    stage = "units";
    auto units = build_units(merged, first_visits, config.unit_mode);
    std::set<StudentId> missing_layout;
    for (const auto& [k, u] : units)
      if (!layout.find(k.student)) missing_layout.insert(k.student);
    save("units.csv", units_to_csv(units));
    if (done("units")) return result;

    stage = "accumulate";
    const auto full_universe = Code::all_builtins();
    const auto tutor_universe = in_tutor_universe();
    auto adj_full = accumulate_units(units, config.tif, full_universe, config.threads);
    auto adj_tutor = accumulate_units(units, config.tif, tutor_universe, config.threads);
    save("adjacency.csv", adjacency_to_csv(adj_full, group_labels));
    if (done("accumulate")) return result;

    stage = "model";
    auto full = build_model(adj_full, group_labels, config.positive_group);
    auto intutor = build_model(adj_tutor, group_labels, config.positive_group);
    save("scores.csv", scores_to_csv(full.scores, full.normalized.groups));
    save("scores_intutor.csv", scores_to_csv(intutor.scores, intutor.normalized.groups));
    save("basis.json", basis_to_json(full.basis, full_universe));
    auto node_layout = coregister(full.normalized, full.scores);
    save("nodes.csv", layout_to_csv(node_layout));
    if (done("model")) return result;

    stage = "stats";
    std::vector<double> x_low, x_high;
    for (std::size_t i = 0; i < full.labels.size(); ++i)
      (full.labels[i] ? x_high : x_low)
          .push_back(full.scores.x[static_cast<Eigen::Index>(i)]);
    result.mr_rank_sum = wilcoxon_rank_sum(x_low, x_high);
    auto glm_full = logistic_aic(full.score_matrix, full.labels);
    auto glm_intutor = logistic_aic(intutor.score_matrix, intutor.labels);
    if (!config.seed_set)
      throw ConfigError("bootstrap.seed is required when the bootstrap runs");
    if (full.labels != intutor.labels)
      throw DataError("model unit sets diverged between code universes");
    result.model_contrast =
        bootstrap_aic_compare(full.score_matrix, intutor.score_matrix, full.labels,
                              config.bootstrap_replicates, config.seed);

    json stats;
    stats["mr_rank_sum_low_vs_high"] = rank_test_json(result.mr_rank_sum);
    stats["glm_multimodal"] = glm_json(glm_full);
    stats["glm_in_tutor"] = glm_json(glm_intutor);
    stats["bootstrap_aic"] = json{{"t", result.model_contrast.t},
                                  {"df", result.model_contrast.df},
                                  {"p", result.model_contrast.p},
                                  {"mean_diff", result.model_contrast.mean_diff},
                                  {"ci_low", result.model_contrast.ci_low},
                                  {"ci_high", result.model_contrast.ci_high},
                                  {"replicates", result.model_contrast.aic_a.size()},
                                  {"seed", result.model_contrast.seed}};
    if (config.unit_mode == UnitMode::SPLIT_BY_FIRST_VISIT) {
      // repeated-measures contrast: per-student mean MR score pre vs post
      for (const std::string group : {"LOW", "HIGH"}) {
        std::map<StudentId, std::pair<std::vector<double>, std::vector<double>>> per_student;
        for (std::size_t i = 0; i < full.scores.units.size(); ++i) {
          const auto& key = full.scores.units[i];
          if (full.normalized.groups[i] != group || !key.phase) continue;
          auto& slot = per_student[key.student];
          auto& side = *key.phase == VisitPhase::PRE_VISIT ? slot.first : slot.second;
          side.push_back(full.scores.x[static_cast<Eigen::Index>(i)]);
        }
        std::vector<double> diffs;
        for (const auto& [sid, pp] : per_student) {
          if (pp.first.empty() || pp.second.empty()) continue;
          auto mean = [](const std::vector<double>& v) {
            double m = 0;
            for (double x : v) m += x;
            return m / static_cast<double>(v.size());
          };
          diffs.push_back(mean(pp.second) - mean(pp.first));
        }
        bool all_zero = true;
        for (double d : diffs) all_zero = all_zero && d == 0.0;
        if (!diffs.empty() && !all_zero)
          stats["visit_signed_rank_" + group] = rank_test_json(wilcoxon_signed_rank(diffs));
      }
    }
    result.stats_json = stats.dump(2) + "\n";
    save("stats.json", result.stats_json);
    if (done("stats")) return result;

    stage = "render";
    auto net_low = group_mean_network(full.normalized, "LOW");
    auto net_high = group_mean_network(full.normalized, "HIGH");
    auto subtracted = subtract_networks(full.normalized, "LOW", "HIGH");
    save("network_low.svg", render_network(node_layout, net_low, config.style));
    save("network_high.svg", render_network(node_layout, net_high, config.style));
    save("subtracted.svg", render_subtracted(node_layout, subtracted, config.style));
    save("network_low.dot", export_dot(node_layout, net_low, config.style));
    if (done("render")) return result;

    stage = "metadata";
    json meta;
    meta["afm"] = {{"lambda_theta", config.lambda_theta},
                   {"lambda_delta", config.lambda_delta},
                   {"skipped_missing_kc", table.skipped_missing_kc},
                   {"median_split_value", result.groups.split_value},
                   {"median_tie_warning", result.groups.tie_warning},
                   {"delta_granularity", "per-student"}};
    meta["conventions"] = {
        {"merge_tie_order", "SPATIAL < TUTOR_LOG < DETECTOR < OBSERVATION"},
        {"rank_sum_statistic", "Mann-Whitney U (rank sum minus minimum)"},
        {"effect_size", "r = |Z| / sqrt(N)"},
        {"bootstrap_t", "Welch two-sample, unpaired"},
        {"tif_shape", "boxcar (0, W]"}};
    meta["defaulted_keys"] = config.defaulted_keys;
    meta["unit_mode"] =
        config.unit_mode == UnitMode::WHOLE ? "WHOLE" : "SPLIT_BY_FIRST_VISIT";
    meta["positive_group"] = config.positive_group;
    meta["seed"] = config.seed;
    meta["tif"] = {{"tutor_log_s", config.tif.tutor_log_s},
                   {"detector_s", config.tif.detector_s},
                   {"observation_s", config.tif.observation_s},
                   {"spatial_s", config.tif.spatial_s},
                   {"binary", config.tif.binary}};
    std::vector<StudentId> missing(missing_layout.begin(), missing_layout.end());
    meta["students_missing_from_layout"] = missing;
    save("run_metadata.json", meta.dump(2) + "\n");
  } catch (const ConfigError& e) {
    for (const auto& f : result.written_files) fs::remove(f);
    throw ConfigError("stage " + stage + ": " + e.what());
  } catch (const NumericError& e) {
    for (const auto& f : result.written_files) fs::remove(f);
    throw NumericError("stage " + stage + ": " + e.what());
  } catch (const std::exception& e) {
    for (const auto& f : result.written_files) fs::remove(f);
    throw DataError("stage " + stage + ": " + e.what());
  }
  return result;
}

}  // namespace transona
