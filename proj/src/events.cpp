#include "transona/events.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "transona/error.hpp"

namespace transona {

const char* Code::builtin_name(Builtin b) {
  switch (b) {
    case CORRECT_ATTEMPT: return "CORRECT_ATTEMPT";
    case CORRECT_FIRST_ATTEMPT: return "CORRECT_FIRST_ATTEMPT";
    case INCORRECT_ATTEMPT: return "INCORRECT_ATTEMPT";
    case HINT_REQUEST: return "HINT_REQUEST";
    case STRUGGLING: return "STRUGGLING";
    case IDLING: return "IDLING";
    case TUTOR_MISUSE: return "TUTOR_MISUSE";
    case RAISING_HAND: return "RAISING_HAND";
    case TALKING: return "TALKING";
    case SCREEN_ALIGNMENT: return "SCREEN_ALIGNMENT";
  }
  return "?";
}

std::vector<Code> Code::all_builtins() {
  std::vector<Code> out;
  for (int i = 0; i < kBuiltinCount; ++i) out.push_back(Code(static_cast<Builtin>(i)));
  return out;
}

Code Code::from_string(const std::string& s) {
  for (int i = 0; i < kBuiltinCount; ++i) {
    auto b = static_cast<Builtin>(i);
    if (s == builtin_name(b)) return Code(b);
  }
  if (s.rfind("ext:", 0) == 0 && s.size() > 4) return Code(s);
  throw DataError("unknown code: " + s);
}

const char* to_string(EventSource s) {
  switch (s) {
    case EventSource::TUTOR_LOG: return "TUTOR_LOG";
    case EventSource::DETECTOR: return "DETECTOR";
    case EventSource::OBSERVATION: return "OBSERVATION";
    case EventSource::SPATIAL: return "SPATIAL";
  }
  return "?";
}

EventSource source_from_string(const std::string& s) {
  if (s == "TUTOR_LOG") return EventSource::TUTOR_LOG;
  if (s == "DETECTOR") return EventSource::DETECTOR;
  if (s == "OBSERVATION") return EventSource::OBSERVATION;
  if (s == "SPATIAL") return EventSource::SPATIAL;
  throw DataError("unknown event source: " + s);
}

int tie_rank(EventSource s) {
  switch (s) {
    case EventSource::SPATIAL: return 0;
    case EventSource::TUTOR_LOG: return 1;
    case EventSource::DETECTOR: return 2;
    case EventSource::OBSERVATION: return 3;
  }
  return 4;
}

bool operator==(const Event& a, const Event& b) {
  return a.timestamp == b.timestamp && a.source == b.source &&
         a.student == b.student && a.day == b.day && a.period == b.period &&
         a.codes == b.codes && a.payload == b.payload;
}

std::string UnitKey::label() const {
  std::ostringstream os;
  os << "s" << student << ":" << day << ":p" << period;
  if (phase) os << (*phase == VisitPhase::PRE_VISIT ? ":pre" : ":post");
  return os.str();
}

std::vector<Event> merge_streams(const std::vector<TimedStream>& streams) {
  std::vector<Event> merged;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    const auto& ev = streams[s].events;
    for (std::size_t i = 1; i < ev.size(); ++i) {
      if (ev[i].timestamp < ev[i - 1].timestamp) {
        throw DataError("merge_streams: stream " + std::to_string(s) +
                        " unordered at index " + std::to_string(i));
      }
    }
    for (Event e : ev) {
      e.timestamp += streams[s].offset;
      merged.push_back(std::move(e));
    }
  }
  std::stable_sort(merged.begin(), merged.end(), [](const Event& a, const Event& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return tie_rank(a.source) < tie_rank(b.source);
  });
  return merged;
}

std::map<Code, double> base_rates(const std::vector<Event>& stream) {
  if (stream.empty()) throw DataError("base_rates: empty stream");
  std::map<Code, double> counts;
  for (const auto& e : stream)
    for (const auto& c : e.codes) counts.emplace(c, 0.0).first->second += 1.0;
  for (auto& [c, v] : counts) v /= static_cast<double>(stream.size());
  return counts;
}

namespace {

std::string url_encode(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string url_decode(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out += static_cast<char>(std::stoi(s.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string stream_to_csv(const std::vector<Event>& stream) {
  std::ostringstream os;
  os << "timestamp_ms,source,student_id,day,period,codes,payload\n";
  for (const auto& e : stream) {
    os << e.timestamp << ',' << to_string(e.source) << ',';
    if (e.student) os << *e.student;
    os << ',' << e.day << ',' << e.period << ',';
    bool first = true;
    for (const auto& c : e.codes) {
      if (!first) os << ';';
      os << c.id();
      first = false;
    }
    os << ',';
    first = true;
    for (const auto& [k, v] : e.payload) {
      if (!first) os << '&';
      os << url_encode(k) << '=' << url_encode(v);
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

std::vector<Event> stream_from_csv(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  std::vector<Event> out;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 7)
      throw DataError("stream csv: bad field count at line " + std::to_string(lineno));
    Event e;
    try {
      e.timestamp = std::stoll(fields[0]);
      e.source = source_from_string(fields[1]);
      if (!fields[2].empty()) e.student = std::stoi(fields[2]);
      e.day = fields[3];
      e.period = std::stoi(fields[4]);
      for (const auto& c : split(fields[5], ';'))
        if (!c.empty()) e.codes.insert(Code::from_string(c));
      if (!fields[6].empty()) {
        for (const auto& kv : split(fields[6], '&')) {
          auto eq = kv.find('=');
          if (eq == std::string::npos)
            throw DataError("stream csv: bad payload pair");
          e.payload[url_decode(kv.substr(0, eq))] = url_decode(kv.substr(eq + 1));
        }
      }
    } catch (const std::invalid_argument&) {
      throw DataError("stream csv: malformed value at line " + std::to_string(lineno));
    }
    if (e.codes.empty())
      throw DataError("stream csv: empty code set at line " + std::to_string(lineno));
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace transona
