#pragma once

#include <string>
#include <vector>

namespace transona::csv {

// Splits on sep; when max_fields > 0, the final field keeps any remaining
// separators verbatim (free-text trailing columns).
std::vector<std::string> split(const std::string& line, char sep, int max_fields = 0);

// Strict numeric field parsers that reject trailing junk.
long long parse_int(const std::string& s, const std::string& what, int lineno);
double parse_double(const std::string& s, const std::string& what, int lineno);

std::string trim(const std::string& s);

}  // namespace transona::csv
