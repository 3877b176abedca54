#pragma once

#include <vector>

#include "transona/events.hpp"
#include "transona/ingest.hpp"

namespace transona {

struct DetectorParams {
  double idle_threshold_s = 120.0;
  double misuse_gap_s = 3.0;
  int misuse_run_len = 3;
  int struggle_window = 8;          // opportunities
  double struggle_rate_cutoff = 0.3;
  int struggle_cooldown = 10;       // opportunities

  void validate() const;
};

// One IDLING event per inter-transaction gap exceeding the threshold, stamped
// at gap start + threshold. Input rows must be time-ordered per student.
std::vector<Event> detect_idle(const std::vector<TutorTransactionRow>& transactions,
                               const DetectorParams& params);

// One TUTOR_MISUSE per run of >= misuse_run_len assistance-exploiting actions
// within one problem, each within misuse_gap_s of its predecessor.
std::vector<Event> detect_misuse(const std::vector<TutorTransactionRow>& transactions,
                                 const DetectorParams& params);

// STRUGGLING when the recent first-attempt-correct rate on a kc drops below
// the cutoff, with per-kc cooldown.
std::vector<Event> detect_struggle(const std::vector<TutorTransactionRow>& transactions,
                                   const DetectorParams& params);

// All three detectors over a multi-student transaction list.
std::vector<Event> run_detectors(const std::vector<TutorTransactionRow>& transactions,
                                 const DetectorParams& params);

}  // namespace transona
