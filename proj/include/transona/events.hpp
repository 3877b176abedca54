#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace transona {

// Behavioral code attached to an event. Ten built-ins plus a namespace for
// user-defined extension codes ("ext:<name>").
class Code {
 public:
  enum Builtin {
    CORRECT_ATTEMPT,
    CORRECT_FIRST_ATTEMPT,
    INCORRECT_ATTEMPT,
    HINT_REQUEST,
    STRUGGLING,
    IDLING,
    TUTOR_MISUSE,
    RAISING_HAND,
    TALKING,
    SCREEN_ALIGNMENT,
  };
  static constexpr int kBuiltinCount = 10;

  Code(Builtin b) : id_(builtin_name(b)) {}
  static Code extension(const std::string& name) { return Code("ext:" + name); }
  static Code from_string(const std::string& s);

  const std::string& id() const { return id_; }
  bool is_builtin() const { return id_.rfind("ext:", 0) != 0; }

  friend bool operator==(const Code& a, const Code& b) { return a.id_ == b.id_; }
  friend bool operator<(const Code& a, const Code& b) { return a.id_ < b.id_; }

  static const char* builtin_name(Builtin b);
  // The ten built-ins in codebook order.
  static std::vector<Code> all_builtins();

 private:
  explicit Code(std::string id) : id_(std::move(id)) {}
  std::string id_;
};

enum class EventSource { TUTOR_LOG, DETECTOR, OBSERVATION, SPATIAL };

const char* to_string(EventSource s);
EventSource source_from_string(const std::string& s);

// Merge tie-break rank at equal timestamps: SPATIAL < TUTOR_LOG < DETECTOR < OBSERVATION.
int tie_rank(EventSource s);

using StudentId = int;
using Millis = std::int64_t;

struct Event {
  Millis timestamp = 0;  // ms since session epoch
  EventSource source = EventSource::TUTOR_LOG;
  std::optional<StudentId> student;  // absent for untargeted teacher events
  std::string day;                   // ISO date
  int period = 0;
  std::set<Code> codes;              // non-empty
  std::map<std::string, std::string> payload;

  bool has_code(const Code& c) const { return codes.count(c) > 0; }
};

bool operator==(const Event& a, const Event& b);

enum class VisitPhase { PRE_VISIT, POST_VISIT };

struct UnitKey {
  StudentId student = 0;
  std::string day;
  int period = 0;
  std::optional<VisitPhase> phase;  // present only in visit-split mode

  friend bool operator<(const UnitKey& a, const UnitKey& b) {
    auto pa = a.phase ? static_cast<int>(*a.phase) : -1;
    auto pb = b.phase ? static_cast<int>(*b.phase) : -1;
    return std::tie(a.student, a.day, a.period, pa) <
           std::tie(b.student, b.day, b.period, pb);
  }
  friend bool operator==(const UnitKey& a, const UnitKey& b) {
    return a.student == b.student && a.day == b.day && a.period == b.period &&
           a.phase == b.phase;
  }
  std::string label() const;
};

// One input stream plus the clock shift to apply to it before merging.
struct TimedStream {
  std::vector<Event> events;  // internally ordered by timestamp
  Millis offset = 0;
};

// Merges per-source streams into one globally ordered stream. Offsets are
// applied before ordering. Throws DataError naming the offending stream and
// index if an input list is unordered.
std::vector<Event> merge_streams(const std::vector<TimedStream>& streams);

// Fraction of events whose code set contains each code. Codes absent from the
// stream are absent from the map (rate 0). Throws DataError on empty stream.
std::map<Code, double> base_rates(const std::vector<Event>& stream);

// CSV serialization of a merged stream:
//   timestamp_ms,source,student_id,day,period,codes,payload
// codes semicolon-joined; payload URL-encoded key=value pairs joined by '&'.
std::string stream_to_csv(const std::vector<Event>& stream);
std::vector<Event> stream_from_csv(const std::string& csv);

}  // namespace transona
