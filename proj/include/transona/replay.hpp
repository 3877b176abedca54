#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "transona/events.hpp"
#include "transona/ingest.hpp"

namespace transona {

struct ReplayNote {
  Millis offset_ms = 0;  // signed, relative to the anchor event
  std::string text;
};

struct ReplayEntry {
  Millis event_time = 0;
  StudentId student = 0;
  std::vector<ReplayNote> before;  // nearest first
  std::vector<ReplayNote> after;   // nearest first
};

struct ReplaySection {
  std::string group;
  std::vector<ReplayEntry> entries;
};

struct ReplayReport {
  std::string target_code;
  std::vector<ReplaySection> sections;
};

// For every target-code event by a target student, the k nearest teacher
// notes before and after it, grouped by student group for side-by-side review.
ReplayReport replay_windows(const std::vector<ObservationRow>& notes,
                            const std::vector<Event>& stream,
                            const std::set<StudentId>& target_students, const Code& target_code,
                            const std::map<StudentId, std::string>& group_labels, int k = 3);

std::string replay_report_to_text(const ReplayReport& report);

}  // namespace transona
