#include "heatwave/csv.hpp"

#include <charconv>
#include <fstream>

#include "heatwave/errors.hpp"

namespace heatwave::csv {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string format(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string format(int v) {
  char buf[16];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view field, std::string_view context) {
  double v{};
  const auto r = std::from_chars(field.data(), field.data() + field.size(), v);
  if (r.ec != std::errc{} || r.ptr != field.data() + field.size()) {
    throw SchemaError("malformed numeric field '" + std::string(field) +
                      "' in " + std::string(context));
  }
  return v;
}

int parse_int(std::string_view field, std::string_view context) {
  int v{};
  const auto r = std::from_chars(field.data(), field.data() + field.size(), v);
  if (r.ec != std::errc{} || r.ptr != field.data() + field.size()) {
    throw SchemaError("malformed integer field '" + std::string(field) +
                      "' in " + std::string(context));
  }
  return v;
}

std::optional<double> parse_optional_double(std::string_view field,
                                            std::string_view context) {
  if (field.empty() || field == "NA") return std::nullopt;
  return parse_double(field, context);
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format(*v) : std::string();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace heatwave::csv
