#include "transona/csv.hpp"

#include <cstdlib>

#include "transona/error.hpp"

namespace transona::csv {

std::vector<std::string> split(const std::string& line, char sep, int max_fields) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == sep &&
        (max_fields <= 0 || static_cast<int>(out.size()) < max_fields - 1)) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += line[i];
    }
  }
  out.push_back(cur);
  return out;
}

long long parse_int(const std::string& s, const std::string& what, int lineno) {
  const std::string t = trim(s);
  if (t.empty()) throw DataError(what + ": empty at line " + std::to_string(lineno));
  char* end = nullptr;
  long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size())
    throw DataError(what + ": malformed integer '" + t + "' at line " +
                    std::to_string(lineno));
  return v;
}

double parse_double(const std::string& s, const std::string& what, int lineno) {
  const std::string t = trim(s);
  if (t.empty()) throw DataError(what + ": empty at line " + std::to_string(lineno));
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw DataError(what + ": malformed number '" + t + "' at line " +
                    std::to_string(lineno));
  return v;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace transona::csv
