#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hvae {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Strict parse of a whole token; throws std::invalid_argument.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char delim);
std::string_view trim(std::string_view text);

/// Ordered key/value pairs carried by every artifact for provenance.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

}  // namespace hvae
