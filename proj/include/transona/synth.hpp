#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "transona/afm.hpp"
#include "transona/events.hpp"

namespace transona {

// Seeded synthetic-classroom generator. Group membership modulates how
// students respond to teacher attention (talk + screen alignment) and how
// fast their first-attempt accuracy improves per practice opportunity.
struct SynthParams {
  int students = 20;
  int days = 3;
  double session_s = 900.0;
  // probability the attended student's next action is the group-typical one
  double low_hint_after_attention = 0.9;
  double high_correct_after_attention = 0.9;
  // first-attempt-correct logit: base + rate * opportunity. The bases
  // compensate the slope gap so day-aggregated accuracy crosses over between
  // groups; the stable group signal is the attention response, not the logs.
  double low_base_logit = 1.1;
  double high_base_logit = 0.0;
  double low_learn_rate = 0.02;
  double high_learn_rate = 0.10;
  double attention_period_s = 25.0;  // one teacher attention episode per period
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthOutput {
  std::string tutor_csv;
  std::string positions_csv;
  std::string observations_csv;
  std::string layout_json;
  std::map<StudentId, LearningGroup> truth;  // planted groups

  std::string truth_csv() const;
};

SynthOutput synth_generate(const SynthParams& params);

}  // namespace transona
