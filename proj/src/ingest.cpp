#include "transona/ingest.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "transona/csv.hpp"
#include "transona/error.hpp"

namespace transona {

const StudentPlacement* ClassLayout::find(StudentId id) const {
  for (const auto& s : students)
    if (s.id == id) return &s;
  return nullptr;
}

Millis ClockOffsets::for_source(EventSource s) const {
  switch (s) {
    case EventSource::TUTOR_LOG: return tutor;
    case EventSource::DETECTOR: return detector;
    case EventSource::OBSERVATION: return observation;
    case EventSource::SPATIAL: return spatial;
  }
  return 0;
}

namespace {

std::vector<std::string> data_lines(const std::string& text, const std::string& expected_header,
                                    const std::string& what) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::string> lines;
  if (!std::getline(is, line)) throw DataError(what + ": empty file");
  if (csv::trim(line) != expected_header)
    throw DataError(what + ": unexpected header '" + csv::trim(line) + "'");
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

}  // namespace

std::vector<TutorTransactionRow> parse_tutor_rows(const std::string& text) {
  auto lines = data_lines(
      text, "timestamp_ms,student_id,day,period,action,outcome,is_first_attempt,problem,step,kc",
      "tutor log");
  std::vector<TutorTransactionRow> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 2;
    if (csv::trim(lines[i]).empty()) continue;
    auto f = csv::split(lines[i], ',');
    if (f.size() != 10)
      throw DataError("tutor log: expected 10 fields at line " + std::to_string(lineno));
    TutorTransactionRow r;
    r.timestamp = csv::parse_int(f[0], "tutor log timestamp", lineno);
    r.student = static_cast<StudentId>(csv::parse_int(f[1], "tutor log student", lineno));
    r.day = csv::trim(f[2]);
    r.period = static_cast<int>(csv::parse_int(f[3], "tutor log period", lineno));
    const std::string action = csv::trim(f[4]);
    const std::string outcome = csv::trim(f[5]);
    if (action == "ATTEMPT") {
      r.action = TutorTransactionRow::Action::ATTEMPT;
      if (outcome == "CORRECT") r.outcome = TutorTransactionRow::Outcome::CORRECT;
      else if (outcome == "INCORRECT") r.outcome = TutorTransactionRow::Outcome::INCORRECT;
      else throw DataError("tutor log: unknown outcome '" + outcome + "' at line " +
                           std::to_string(lineno));
    } else if (action == "HINT_REQUEST") {
      r.action = TutorTransactionRow::Action::HINT_REQUEST;
      r.outcome = TutorTransactionRow::Outcome::HINT;
    } else {
      throw DataError("tutor log: unknown action '" + action + "' at line " +
                      std::to_string(lineno));
    }
    const std::string first = csv::trim(f[6]);
    r.is_first_attempt = (first == "1" || first == "true");
    r.problem = csv::trim(f[7]);
    r.step = csv::trim(f[8]);
    r.kc = csv::trim(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<Event> tutor_rows_to_events(const std::vector<TutorTransactionRow>& rows) {
  std::vector<Event> events;
  events.reserve(rows.size());
  for (const auto& r : rows) {
    Event e;
    e.timestamp = r.timestamp;
    e.source = EventSource::TUTOR_LOG;
    e.student = r.student;
    e.day = r.day;
    e.period = r.period;
    if (r.action == TutorTransactionRow::Action::HINT_REQUEST) {
      e.codes.insert(Code(Code::HINT_REQUEST));
    } else if (r.outcome == TutorTransactionRow::Outcome::CORRECT) {
      e.codes.insert(Code(Code::CORRECT_ATTEMPT));
      if (r.is_first_attempt) e.codes.insert(Code(Code::CORRECT_FIRST_ATTEMPT));
    } else {
      e.codes.insert(Code(Code::INCORRECT_ATTEMPT));
    }
    e.payload["problem"] = r.problem;
    e.payload["step"] = r.step;
    e.payload["kc"] = r.kc;
    if (r.action == TutorTransactionRow::Action::ATTEMPT)
      e.payload["first"] = r.is_first_attempt ? "1" : "0";
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<Event> parse_tutor_log(const std::string& csv_text) {
  return tutor_rows_to_events(parse_tutor_rows(csv_text));
}

std::vector<PositionSample> parse_positions(const std::string& text) {
  auto lines = data_lines(text, "timestamp_ms,x_mm,y_mm,tag_id", "positions");
  // per tag: keep last row for a duplicated timestamp
  std::map<std::string, std::map<Millis, PositionSample>> by_tag;
  std::vector<std::string> tag_order;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 2;
    if (csv::trim(lines[i]).empty()) continue;
    auto f = csv::split(lines[i], ',');
    if (f.size() != 4)
      throw DataError("positions: expected 4 fields at line " + std::to_string(lineno));
    PositionSample s;
    s.timestamp = csv::parse_int(f[0], "position timestamp", lineno);
    s.x = csv::parse_double(f[1], "position x_mm", lineno);
    s.y = csv::parse_double(f[2], "position y_mm", lineno);
    s.tag = csv::trim(f[3]);
    if (!by_tag.count(s.tag)) tag_order.push_back(s.tag);
    by_tag[s.tag][s.timestamp] = s;
  }
  std::vector<PositionSample> out;
  for (const auto& tag : tag_order)
    for (const auto& [t, s] : by_tag[tag]) out.push_back(s);
  return out;
}

ObservationParse parse_observations(const std::string& text) {
  auto lines = data_lines(text, "timestamp_ms,label,student_id,note", "observations");
  ObservationParse out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 2;
    if (csv::trim(lines[i]).empty()) continue;
    auto f = csv::split(lines[i], ',', 4);
    if (f.size() != 4)
      throw DataError("observations: expected 4 fields at line " + std::to_string(lineno));
    ObservationRow row;
    row.timestamp = csv::parse_int(f[0], "observation timestamp", lineno);
    row.label = csv::trim(f[1]);
    if (!csv::trim(f[2]).empty())
      row.student = static_cast<StudentId>(csv::parse_int(f[2], "observation student", lineno));
    row.note = f[3];
    if (row.label == "talking" || row.label == "raising hand") {
      Event e;
      e.timestamp = row.timestamp;
      e.source = EventSource::OBSERVATION;
      e.codes.insert(row.label == "talking" ? Code(Code::TALKING)
                                            : Code(Code::RAISING_HAND));
      if (row.label == "talking") {
        // Target retained in payload; the horizon filter treats TALKING as public.
        if (row.student) e.payload["target"] = std::to_string(*row.student);
      } else {
        e.student = row.student;
      }
      if (!row.note.empty()) e.payload["note"] = row.note;
      out.events.push_back(std::move(e));
    } else {
      out.notes.push_back(std::move(row));
    }
  }
  return out;
}

ClassLayout parse_layout(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("layout json: ") + e.what());
  }
  ClassLayout layout;
  if (!j.contains("room") || !j.contains("students"))
    throw DataError("layout json: missing 'room' or 'students'");
  layout.room_min = {j["room"][0][0].get<double>(), j["room"][0][1].get<double>()};
  layout.room_max = {j["room"][1][0].get<double>(), j["room"][1][1].get<double>()};
  std::map<StudentId, bool> seen;
  for (const auto& s : j["students"]) {
    StudentPlacement p;
    p.id = s["id"].get<StudentId>();
    p.seat = {s["seat"][0].get<double>(), s["seat"][1].get<double>()};
    p.screen = {s["screen"][0].get<double>(), s["screen"][1].get<double>()};
    if (seen[p.id]) throw DataError("layout json: duplicate student id " + std::to_string(p.id));
    seen[p.id] = true;
    auto inside = [&](const Point& q) {
      return q.x >= layout.room_min.x && q.x <= layout.room_max.x &&
             q.y >= layout.room_min.y && q.y <= layout.room_max.y;
    };
    if (!inside(p.seat) || !inside(p.screen))
      throw DataError("layout json: student " + std::to_string(p.id) +
                      " placed outside room bounds");
    layout.students.push_back(p);
  }
  return layout;
}

std::string layout_to_json(const ClassLayout& layout) {
  nlohmann::json j;
  j["room"] = {{layout.room_min.x, layout.room_min.y}, {layout.room_max.x, layout.room_max.y}};
  j["students"] = nlohmann::json::array();
  for (const auto& s : layout.students) {
    j["students"].push_back({{"id", s.id},
                             {"seat", {s.seat.x, s.seat.y}},
                             {"screen", {s.screen.x, s.screen.y}}});
  }
  return j.dump(2) + "\n";
}

}  // namespace transona
