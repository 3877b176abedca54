#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transona/events.hpp"

namespace transona {

struct Point {
  double x = 0;  // millimeters
  double y = 0;
};

struct TutorTransactionRow {
  Millis timestamp = 0;
  StudentId student = 0;
  std::string day;
  int period = 0;
  enum class Action { ATTEMPT, HINT_REQUEST } action = Action::ATTEMPT;
  enum class Outcome { CORRECT, INCORRECT, HINT } outcome = Outcome::CORRECT;
  bool is_first_attempt = false;  // meaningful only for ATTEMPT rows
  std::string problem;
  std::string step;
  std::string kc;
};

struct PositionSample {
  Millis timestamp = 0;
  double x = 0;  // mm
  double y = 0;  // mm
  std::string tag;
};

struct ObservationRow {
  Millis timestamp = 0;
  std::string label;
  std::optional<StudentId> student;
  std::string note;
};

struct StudentPlacement {
  StudentId id = 0;
  Point seat;
  Point screen;
};

struct ClassLayout {
  std::vector<StudentPlacement> students;
  Point room_min;
  Point room_max;

  const StudentPlacement* find(StudentId id) const;
};

struct ClockOffsets {
  Millis tutor = 0;
  Millis detector = 0;
  Millis observation = 0;
  Millis spatial = 0;

  Millis for_source(EventSource s) const;
};

struct ObservationParse {
  std::vector<Event> events;          // recognized labels
  std::vector<ObservationRow> notes;  // free-text rows kept for replay
};

// CSV schema: timestamp_ms,student_id,day,period,action,outcome,is_first_attempt,problem,step,kc
std::vector<TutorTransactionRow> parse_tutor_rows(const std::string& csv);
std::vector<Event> tutor_rows_to_events(const std::vector<TutorTransactionRow>& rows);
std::vector<Event> parse_tutor_log(const std::string& csv);

// CSV schema: timestamp_ms,x_mm,y_mm,tag_id. Ordered per tag; duplicate
// timestamps for one tag collapse to the last row.
std::vector<PositionSample> parse_positions(const std::string& csv);

// CSV schema: timestamp_ms,label,student_id,note. "talking" / "raising hand"
// become coded events; other labels are retained as notes.
ObservationParse parse_observations(const std::string& csv);

// Layout JSON:
//   { "students": [{"id":, "seat":[x,y], "screen":[x,y]}], "room":[[x0,y0],[x1,y1]] }
ClassLayout parse_layout(const std::string& json_text);
std::string layout_to_json(const ClassLayout& layout);

}  // namespace transona
