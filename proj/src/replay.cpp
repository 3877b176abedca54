#include "transona/replay.hpp"

#include <algorithm>
#include <sstream>

namespace transona {

ReplayReport replay_windows(const std::vector<ObservationRow>& notes,
                            const std::vector<Event>& stream,
                            const std::set<StudentId>& target_students, const Code& target_code,
                            const std::map<StudentId, std::string>& group_labels, int k) {
  std::vector<ObservationRow> sorted_notes = notes;
  std::sort(sorted_notes.begin(), sorted_notes.end(),
            [](const ObservationRow& a, const ObservationRow& b) {
              return a.timestamp < b.timestamp;
            });

  ReplayReport report;
  report.target_code = target_code.id();
  std::map<std::string, ReplaySection> sections;
  for (const auto& e : stream) {
    if (!e.student || !target_students.count(*e.student)) continue;
    if (!e.has_code(target_code)) continue;
    ReplayEntry entry;
    entry.event_time = e.timestamp;
    entry.student = *e.student;
    // first note at or after the event
    auto split = std::lower_bound(sorted_notes.begin(), sorted_notes.end(), e.timestamp,
                                  [](const ObservationRow& n, Millis t) {
                                    return n.timestamp < t;
                                  });
    auto it = split;
    while (it != sorted_notes.begin() && static_cast<int>(entry.before.size()) < k) {
      --it;
      entry.before.push_back({it->timestamp - e.timestamp, it->note});
    }
    for (auto fw = split; fw != sorted_notes.end() && static_cast<int>(entry.after.size()) < k;
         ++fw) {
      entry.after.push_back({fw->timestamp - e.timestamp, fw->note});
    }
    auto git = group_labels.find(*e.student);
    const std::string group = git == group_labels.end() ? "(ungrouped)" : git->second;
    sections[group].group = group;
    sections[group].entries.push_back(std::move(entry));
  }
  for (auto& [g, sec] : sections) report.sections.push_back(std::move(sec));
  return report;
}

std::string replay_report_to_text(const ReplayReport& report) {
  std::ostringstream os;
  os << "replay report: code " << report.target_code << "\n";
  for (const auto& sec : report.sections) {
    os << "== group " << sec.group << " (" << sec.entries.size() << " events)\n";
    for (const auto& e : sec.entries) {
      os << "event t=" << e.event_time << "ms student " << e.student << "\n";
      for (const auto& n : e.before)
        os << "  before " << n.offset_ms << "ms: " << n.text << "\n";
      for (const auto& n : e.after)
        os << "  after +" << n.offset_ms << "ms: " << n.text << "\n";
    }
  }
  return os.str();
}

}  // namespace transona
