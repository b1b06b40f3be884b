#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace heatwave::csv {

// Minimal comma-separated handling. Fields are numbers, ISO dates, or plain
// tags; quoting is not part of any of the file schemas.
std::vector<std::string> split(const std::string& line);

// Shortest round-trip formatting via std::to_chars.
std::string format(double v);
std::string format(int v);

// Strict full-field parses; throw SchemaError on malformed input.
double parse_double(std::string_view field, std::string_view context);
int parse_int(std::string_view field, std::string_view context);

// Empty field or "NA" -> nullopt.
std::optional<double> parse_optional_double(std::string_view field,
                                            std::string_view context);

std::string format_optional(const std::optional<double>& v);

// Whole-file helpers.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace heatwave::csv
