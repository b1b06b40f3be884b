#include "heatwave/grid_data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "heatwave/csv.hpp"

namespace heatwave {

namespace {

// Civil-date conversions (Howard Hinnant's algorithms), exact over the
// proleptic Gregorian calendar.
int days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(int z, int& y, int& m, int& d) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y += m <= 2;
}

bool days_in_month_ok(int y, int m, int d) {
  static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  int len = lengths[m - 1];
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  if (m == 2 && leap) len = 29;
  return d <= len;
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
  if (!days_in_month_ok(year, month, day)) {
    throw SchemaError("invalid calendar date " + std::to_string(year) + "-" +
                      std::to_string(month) + "-" + std::to_string(day));
  }
  return Date(days_from_civil(year, month, day));
}

Date Date::from_iso(std::string_view s) {
  auto fail = [&] {
    throw SchemaError("malformed ISO date '" + std::string(s) + "'");
  };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
  auto num = [&](std::string_view part) {
    int v{};
    const auto r = std::from_chars(part.data(), part.data() + part.size(), v);
    if (r.ec != std::errc{} || r.ptr != part.data() + part.size()) fail();
    return v;
  };
  return from_ymd(num(s.substr(0, 4)), num(s.substr(5, 2)), num(s.substr(8, 2)));
}

std::string Date::to_iso() const {
  int y, m, d;
  civil_from_days(days_, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

void validate(const DailyObservation& obs) {
  if (!obs.cell.valid()) {
    throw RangeError("cell index out of range: lat " +
                     std::to_string(obs.cell.lat_index) + ", lon " +
                     std::to_string(obs.cell.lon_index));
  }
  if (obs.land_sea != 0 && obs.land_sea != 1) {
    throw RangeError("land_sea must be 0 or 1");
  }
  auto check_temp = [&](const std::optional<double>& v, const char* what) {
    if (v && !(*v > 0.0 && *v < 400.0)) {
      throw RangeError(std::string(what) + " outside (0, 400) K at cell (" +
                       std::to_string(obs.cell.lat_index) + "," +
                       std::to_string(obs.cell.lon_index) + ") " +
                       obs.date.to_iso());
    }
  };
  check_temp(obs.surf_air_temp, "surf_air_temp");
  for (int i = 0; i < kProfileLevels; ++i) {
    check_temp(obs.temp_profile[i], "temp profile value");
    if (obs.h2o_mmr[i] && *obs.h2o_mmr[i] < 0.0) {
      throw RangeError("h2o_mmr must be nonnegative");
    }
  }
}

Variable::Variable(Kind kind, int level) : kind_(kind), level_(level) {
  if (kind == Kind::temp || kind == Kind::mmr) {
    if (level < 1 || level > kProfileLevels) {
      throw UnknownVariableError("profile level out of 1..12: " +
                                 std::to_string(level));
    }
  } else {
    level_ = 0;
  }
}

Variable Variable::parse(std::string_view name) {
  if (name == "surf_air_temp") return Variable(Kind::surf_air_temp);
  if (name == "trop_height") return Variable(Kind::trop_height);
  if (name == "latitude") return Variable(Kind::latitude);
  if (name == "longitude") return Variable(Kind::longitude);
  if (name == "land_sea") return Variable(Kind::land_sea);
  if (name == "topography") return Variable(Kind::topography);
  auto leveled = [&](std::string_view prefix, Kind kind) -> std::optional<Variable> {
    if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix)
      return std::nullopt;
    const auto tail = name.substr(prefix.size());
    int level{};
    const auto r = std::from_chars(tail.data(), tail.data() + tail.size(), level);
    if (r.ec != std::errc{} || r.ptr != tail.data() + tail.size() || level < 1 ||
        level > kProfileLevels)
      return std::nullopt;
    return Variable(kind, level);
  };
  if (auto v = leveled("temp_", Kind::temp)) return *v;
  if (auto v = leveled("mmr_", Kind::mmr)) return *v;
  throw UnknownVariableError("unknown variable '" + std::string(name) + "'");
}

std::vector<Variable> Variable::parse_list(std::string_view comma_separated) {
  std::vector<Variable> out;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    std::size_t comma = comma_separated.find(',', start);
    if (comma == std::string_view::npos) comma = comma_separated.size();
    const auto token = comma_separated.substr(start, comma - start);
    if (!token.empty()) out.push_back(parse(token));
    start = comma + 1;
  }
  return out;
}

std::string Variable::name() const {
  switch (kind_) {
    case Kind::surf_air_temp: return "surf_air_temp";
    case Kind::trop_height: return "trop_height";
    case Kind::temp: return "temp_" + std::to_string(level_);
    case Kind::mmr: return "mmr_" + std::to_string(level_);
    case Kind::latitude: return "latitude";
    case Kind::longitude: return "longitude";
    case Kind::land_sea: return "land_sea";
    case Kind::topography: return "topography";
  }
  return {};
}

std::optional<double> Variable::value(const DailyObservation& obs) const {
  switch (kind_) {
    case Kind::surf_air_temp: return obs.surf_air_temp;
    case Kind::trop_height: return obs.trop_height;
    case Kind::temp: return obs.temp_profile[level_ - 1];
    case Kind::mmr: return obs.h2o_mmr[level_ - 1];
    case Kind::latitude: return obs.latitude;
    case Kind::longitude: return obs.longitude;
    case Kind::land_sea: return static_cast<double>(obs.land_sea);
    case Kind::topography: return obs.topography;
  }
  return std::nullopt;
}

Panel::Panel(std::vector<DailyObservation> observations) {
  for (auto& obs : observations) {
    validate(obs);
    const Key key{obs.cell, obs.date};
    if (!obs_.emplace(key, std::move(obs)).second) {
      throw DuplicateKeyError("duplicate observation for cell (" +
                              std::to_string(key.first.lat_index) + "," +
                              std::to_string(key.first.lon_index) + ") on " +
                              key.second.to_iso());
    }
  }
  if (!obs_.empty()) {
    bool first = true;
    for (const auto& [key, obs] : obs_) {
      if (first) {
        span_ = {key.second, key.second};
        region_ = {static_cast<double>(key.first.lat_index),
                   key.first.lat_index + 1.0,
                   static_cast<double>(key.first.lon_index),
                   key.first.lon_index + 1.0};
        first = false;
        continue;
      }
      span_.first = std::min(span_.first, key.second);
      span_.last = std::max(span_.last, key.second);
      region_.lat_min = std::min(region_.lat_min, double(key.first.lat_index));
      region_.lat_max = std::max(region_.lat_max, key.first.lat_index + 1.0);
      region_.lon_min = std::min(region_.lon_min, double(key.first.lon_index));
      region_.lon_max = std::max(region_.lon_max, key.first.lon_index + 1.0);
    }
  }
}

const DailyObservation* Panel::find(CellId cell, Date date) const {
  const auto it = obs_.find({cell, date});
  return it == obs_.end() ? nullptr : &it->second;
}

std::vector<CellId> Panel::cells() const {
  std::vector<CellId> out;
  for (const auto& [key, obs] : obs_) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

DateRange Panel::date_span() const {
  if (obs_.empty()) throw EmptyDatasetError("date_span of an empty panel");
  return span_;
}

BoundingBox Panel::region() const {
  if (obs_.empty()) throw EmptyDatasetError("region of an empty panel");
  return region_;
}

namespace {

const char* kPanelHeader =
    "date,lat_idx,lon_idx,latitude,longitude,land_sea,topography,"
    "surf_air_temp,trop_height,temp_1,temp_2,temp_3,temp_4,temp_5,temp_6,"
    "temp_7,temp_8,temp_9,temp_10,temp_11,temp_12,mmr_1,mmr_2,mmr_3,mmr_4,"
    "mmr_5,mmr_6,mmr_7,mmr_8,mmr_9,mmr_10,mmr_11,mmr_12";

constexpr std::size_t kPanelColumns = 9 + 2 * kProfileLevels;

}  // namespace

Panel load_panel(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw SchemaError("empty panel file: " + path);
  if (lines[0] != kPanelHeader) {
    throw SchemaError("panel header mismatch in " + path);
  }
  std::vector<DailyObservation> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = csv::split(lines[i]);
    const std::string ctx = path + ":" + std::to_string(i + 1);
    if (fields.size() != kPanelColumns) {
      throw SchemaError("expected " + std::to_string(kPanelColumns) +
                        " columns, got " + std::to_string(fields.size()) +
                        " in " + ctx);
    }
    DailyObservation obs;
    obs.date = Date::from_iso(fields[0]);
    obs.cell.lat_index = csv::parse_int(fields[1], ctx);
    obs.cell.lon_index = csv::parse_int(fields[2], ctx);
    obs.latitude = csv::parse_double(fields[3], ctx);
    obs.longitude = csv::parse_double(fields[4], ctx);
    obs.land_sea = csv::parse_int(fields[5], ctx);
    obs.topography = csv::parse_double(fields[6], ctx);
    obs.surf_air_temp = csv::parse_optional_double(fields[7], ctx);
    obs.trop_height = csv::parse_optional_double(fields[8], ctx);
    for (int l = 0; l < kProfileLevels; ++l) {
      obs.temp_profile[l] = csv::parse_optional_double(fields[9 + l], ctx);
      obs.h2o_mmr[l] =
          csv::parse_optional_double(fields[9 + kProfileLevels + l], ctx);
    }
    rows.push_back(std::move(obs));
  }
  return Panel(std::move(rows));
}

void write_panel(const Panel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write panel file: " + path);
  out << kPanelHeader << '\n';
  for (const auto& [key, obs] : panel.observations()) {
    out << obs.date.to_iso() << ',' << obs.cell.lat_index << ','
        << obs.cell.lon_index << ',' << csv::format(obs.latitude) << ','
        << csv::format(obs.longitude) << ',' << obs.land_sea << ','
        << csv::format(obs.topography) << ','
        << csv::format_optional(obs.surf_air_temp) << ','
        << csv::format_optional(obs.trop_height);
    for (int l = 0; l < kProfileLevels; ++l)
      out << ',' << csv::format_optional(obs.temp_profile[l]);
    for (int l = 0; l < kProfileLevels; ++l)
      out << ',' << csv::format_optional(obs.h2o_mmr[l]);
    out << '\n';
  }
}

Panel select_region(const Panel& panel, const BoundingBox& bbox) {
  if (bbox.degenerate()) throw InvalidArgumentError("degenerate bounding box");
  std::vector<DailyObservation> kept;
  for (const auto& [key, obs] : panel.observations()) {
    if (bbox.contains(key.first)) kept.push_back(obs);
  }
  if (kept.empty()) {
    throw EmptySelectionError("no cell falls inside the bounding box");
  }
  return Panel(std::move(kept));
}

std::map<CellId, std::optional<double>> window_mean(const Panel& panel,
                                                    const Variable& variable,
                                                    const DateRange& window) {
  if (window.length() < 1) throw InvalidArgumentError("empty window");
  if (panel.empty() || !panel.date_span().contains(window)) {
    throw WindowOutOfSpanError("window " + window.first.to_iso() + ".." +
                               window.last.to_iso() +
                               " not inside the panel date span");
  }
  std::map<CellId, std::optional<double>> out;
  for (const CellId cell : panel.cells()) {
    double sum = 0.0;
    bool complete = true;
    for (Date d = window.first; d <= window.last; d += 1) {
      const DailyObservation* obs = panel.find(cell, d);
      const std::optional<double> v = obs ? variable.value(*obs) : std::nullopt;
      if (!v) {
        complete = false;
        break;
      }
      sum += *v;  // fixed date order keeps gain arithmetic reproducible
    }
    out[cell] = complete ? std::optional<double>(sum / window.length())
                         : std::nullopt;
  }
  return out;
}

}  // namespace heatwave
