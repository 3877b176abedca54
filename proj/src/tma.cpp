#include "transona/tma.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "transona/error.hpp"

namespace transona {

double TifConfig::window_s(EventSource s) const {
  switch (s) {
    case EventSource::TUTOR_LOG: return tutor_log_s;
    case EventSource::DETECTOR: return detector_s;
    case EventSource::OBSERVATION: return observation_s;
    case EventSource::SPATIAL: return spatial_s;
  }
  return 0.0;
}

Millis TifConfig::window_ms(EventSource s) const {
  return static_cast<Millis>(window_s(s) * 1000.0);
}

void TifConfig::validate() const {
  if (tutor_log_s <= 0 || detector_s <= 0 || observation_s <= 0 || spatial_s <= 0)
    throw ConfigError("TIF windows must be positive");
}

namespace {

bool visible_to(const Event& e, StudentId student) {
  if (e.has_code(Code(Code::TALKING))) return true;  // public
  switch (e.source) {
    case EventSource::TUTOR_LOG:
    case EventSource::DETECTOR:
      return e.student && *e.student == student;
    case EventSource::SPATIAL:
      return e.student && *e.student == student;  // SCREEN_ALIGNMENT targets
    case EventSource::OBSERVATION:
      return e.student && *e.student == student;  // RAISING_HAND and similar
  }
  return false;
}

}  // namespace

std::map<UnitKey, UnitContext> build_units(const std::vector<Event>& merged,
                                           const std::map<StudentId, Millis>& first_visits,
                                           UnitMode mode) {
  // students present per (day, period)
  std::map<std::pair<std::string, int>, std::set<StudentId>> session_students;
  for (const auto& e : merged)
    if (e.student) session_students[{e.day, e.period}].insert(*e.student);

  std::map<UnitKey, UnitContext> units;
  for (const auto& e : merged) {
    const auto& candidates = session_students[{e.day, e.period}];
    for (StudentId s : candidates) {
      if (!visible_to(e, s)) continue;
      UnitKey key{s, e.day, e.period, std::nullopt};
      if (mode == UnitMode::SPLIT_BY_FIRST_VISIT) {
        auto it = first_visits.find(s);
        if (it == first_visits.end()) {
          key.phase = VisitPhase::PRE_VISIT;
        } else {
          key.phase = e.timestamp >= it->second ? VisitPhase::POST_VISIT
                                                : VisitPhase::PRE_VISIT;
        }
      }
      auto& unit = units[key];
      unit.key = key;
      unit.events.push_back(e);
    }
  }
  return units;
}

AdjacencyVector accumulate(const UnitContext& context, const TifConfig& tif,
                           const std::vector<Code>& universe) {
  tif.validate();
  const std::size_t c = universe.size();
  std::map<Code, std::size_t> index;
  for (std::size_t i = 0; i < c; ++i) index[universe[i]] = i;

  AdjacencyVector adj;
  adj.universe = universe;
  adj.weights.assign(c * c, 0.0);
  adj.event_count = context.events.size();

  const auto& ev = context.events;
  for (std::size_t j = 0; j < ev.size(); ++j) {
    // binary mode: connect each response code pair at most once per response event
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < j; ++i) {
      const Millis lag = ev[j].timestamp - ev[i].timestamp;
      if (lag <= 0) continue;
      if (lag > tif.window_ms(ev[i].source)) continue;
      for (const auto& a : ev[i].codes) {
        auto ia = index.find(a);
        if (ia == index.end()) continue;
        for (const auto& b : ev[j].codes) {
          auto ib = index.find(b);
          if (ib == index.end()) continue;
          if (tif.binary && !seen.insert({ia->second, ib->second}).second) continue;
          adj.at(ia->second, ib->second) += 1.0;
        }
      }
    }
  }
  return adj;
}

std::string adjacency_to_csv(const std::vector<std::pair<UnitKey, AdjacencyVector>>& rows,
                             const std::map<StudentId, std::string>& group_labels) {
  std::ostringstream os;
  os << "unit,phase,group";
  if (!rows.empty()) {
    const auto& u = rows.front().second.universe;
    for (const auto& a : u)
      for (const auto& b : u) os << ',' << a.id() << "->" << b.id();
  }
  os << '\n';
  os.precision(12);
  for (const auto& [key, adj] : rows) {
    UnitKey base = key;
    base.phase.reset();
    os << base.label() << ',';
    if (key.phase)
      os << (*key.phase == VisitPhase::PRE_VISIT ? "PRE_VISIT" : "POST_VISIT");
    os << ',';
    auto git = group_labels.find(key.student);
    if (git != group_labels.end()) os << git->second;
    for (double w : adj.weights) os << ',' << w;
    os << '\n';
  }
  return os.str();
}

}  // namespace transona
