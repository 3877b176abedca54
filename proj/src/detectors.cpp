#include "transona/detectors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <tuple>

#include "transona/error.hpp"

namespace transona {

namespace {

Millis seconds_ms(double s) { return static_cast<Millis>(s * 1000.0); }

Event detector_event(const TutorTransactionRow& anchor, Millis when, Code::Builtin code) {
  Event e;
  e.timestamp = when;
  e.source = EventSource::DETECTOR;
  e.student = anchor.student;
  e.day = anchor.day;
  e.period = anchor.period;
  e.codes.insert(Code(code));
  return e;
}

using SessionKey = std::tuple<StudentId, std::string, int>;

std::map<SessionKey, std::vector<const TutorTransactionRow*>> by_session(
    const std::vector<TutorTransactionRow>& rows) {
  std::map<SessionKey, std::vector<const TutorTransactionRow*>> out;
  for (const auto& r : rows) out[{r.student, r.day, r.period}].push_back(&r);
  return out;
}

void sort_events(std::vector<Event>& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
}

}  // namespace

void DetectorParams::validate() const {
  if (idle_threshold_s <= 0 || misuse_gap_s <= 0 || misuse_run_len <= 0 ||
      struggle_window <= 0 || struggle_cooldown <= 0)
    throw ConfigError("detector params must be positive");
  if (struggle_rate_cutoff <= 0 || struggle_rate_cutoff >= 1)
    throw ConfigError("struggle_rate_cutoff must lie in (0,1)");
}

std::vector<Event> detect_idle(const std::vector<TutorTransactionRow>& transactions,
                               const DetectorParams& params) {
  params.validate();
  const Millis threshold = seconds_ms(params.idle_threshold_s);
  std::vector<Event> events;
  for (const auto& [key, rows] : by_session(transactions)) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const Millis gap = rows[i]->timestamp - rows[i - 1]->timestamp;
      if (gap > threshold)
        events.push_back(detector_event(*rows[i - 1], rows[i - 1]->timestamp + threshold,
                                        Code::IDLING));
    }
  }
  sort_events(events);
  return events;
}

std::vector<Event> detect_misuse(const std::vector<TutorTransactionRow>& transactions,
                                 const DetectorParams& params) {
  params.validate();
  const Millis gap_ms = seconds_ms(params.misuse_gap_s);
  std::vector<Event> events;
  for (const auto& [key, rows] : by_session(transactions)) {
    std::string cur_problem;
    int run = 0;
    bool emitted = false;
    Millis last_action = 0;
    Millis last_hint = -1;
    for (const auto* r : rows) {
      if (r->problem != cur_problem) {
        cur_problem = r->problem;
        run = 0;
        emitted = false;
        last_hint = -1;
      }
      bool exploiting = false;
      if (r->action == TutorTransactionRow::Action::HINT_REQUEST) {
        exploiting = true;
      } else if (last_hint >= 0 && r->timestamp - last_hint <= gap_ms) {
        exploiting = true;  // attempt made right after a hint
      }
      const bool chained = run > 0 && r->timestamp - last_action <= gap_ms;
      if (exploiting && (run == 0 || chained)) {
        ++run;
      } else if (exploiting) {
        run = 1;  // chain broken by time, new run starts here
        emitted = false;
      } else {
        run = 0;
        emitted = false;
      }
      if (run >= params.misuse_run_len && !emitted) {
        events.push_back(detector_event(*r, r->timestamp, Code::TUTOR_MISUSE));
        emitted = true;
      }
      last_action = r->timestamp;
      if (r->action == TutorTransactionRow::Action::HINT_REQUEST)
        last_hint = r->timestamp;
    }
  }
  sort_events(events);
  return events;
}

std::vector<Event> detect_struggle(const std::vector<TutorTransactionRow>& transactions,
                                   const DetectorParams& params) {
  params.validate();
  std::vector<Event> events;
  // opportunity = first encounter of a (problem, step) by a student
  std::map<StudentId, std::set<std::pair<std::string, std::string>>> seen_steps;
  struct KcState {
    std::deque<bool> recent;
    int cooldown = 0;
  };
  std::map<std::pair<StudentId, std::string>, KcState> kc_state;
  // Transactions are processed in global time order per student.
  std::map<StudentId, std::vector<const TutorTransactionRow*>> per_student;
  for (const auto& r : transactions) per_student[r.student].push_back(&r);
  for (auto& [student, rows] : per_student) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto* a, const auto* b) { return a->timestamp < b->timestamp; });
    for (const auto* r : rows) {
      if (r->kc.empty()) continue;
      if (!seen_steps[student].insert({r->problem, r->step}).second) continue;
      const bool correct_first = r->action == TutorTransactionRow::Action::ATTEMPT &&
                                 r->outcome == TutorTransactionRow::Outcome::CORRECT;
      auto& st = kc_state[{student, r->kc}];
      st.recent.push_back(correct_first);
      if (static_cast<int>(st.recent.size()) > params.struggle_window)
        st.recent.pop_front();
      if (st.cooldown > 0) {
        --st.cooldown;
        continue;
      }
      if (static_cast<int>(st.recent.size()) < params.struggle_window) continue;
      int correct = 0;
      for (bool b : st.recent) correct += b ? 1 : 0;
      const double rate = static_cast<double>(correct) / params.struggle_window;
      if (rate < params.struggle_rate_cutoff) {
        events.push_back(detector_event(*r, r->timestamp, Code::STRUGGLING));
        st.cooldown = params.struggle_cooldown;
      }
    }
  }
  sort_events(events);
  return events;
}

std::vector<Event> run_detectors(const std::vector<TutorTransactionRow>& transactions,
                                 const DetectorParams& params) {
  auto events = detect_idle(transactions, params);
  auto misuse = detect_misuse(transactions, params);
  auto struggle = detect_struggle(transactions, params);
  events.insert(events.end(), misuse.begin(), misuse.end());
  events.insert(events.end(), struggle.begin(), struggle.end());
  sort_events(events);
  return events;
}

}  // namespace transona
