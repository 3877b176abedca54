#pragma once

#include <map>
#include <string>
#include <vector>

#include "transona/afm.hpp"
#include "transona/config.hpp"
#include "transona/events.hpp"
#include "transona/ona.hpp"
#include "transona/stats.hpp"

namespace transona {

struct PipelineResult {
  std::vector<std::string> written_files;
  GroupAssignment groups;
  RankTestResult mr_rank_sum;          // LOW vs HIGH on the MR dimension
  BootstrapComparison model_contrast;  // multimodal vs in-tutor-only AIC
  std::string stats_json;
};

// Stamps non-tutor events with the (day, period) of the enclosing (or
// nearest) tutor session span.
void assign_sessions(std::vector<Event>& events, const std::vector<Event>& tutor_events);

// The seven-code in-tutor universe (tutor log + detector codes).
std::vector<Code> in_tutor_universe();

// Full ingest -> detectors -> spatial -> merge -> afm -> units -> accumulate
// -> model -> stats -> render chain. Writes all artifacts into
// config.output_dir; on any stage failure removes partial outputs and
// rethrows naming the stage. A non-empty `upto` stops after that stage, which
// is how the per-stage CLI subcommands share one implementation.
PipelineResult run_pipeline(const PipelineConfig& config, const std::string& upto = "");

}  // namespace transona
