#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heatwave/errors.hpp"

namespace heatwave {

inline constexpr int kProfileLevels = 12;  // pressure levels 1..12, surface upward

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
public:
  Date() = default;

  static Date from_ymd(int year, int month, int day);
  static Date from_iso(std::string_view s);  // YYYY-MM-DD
  static Date from_days(int days) { return Date(days); }

  std::string to_iso() const;
  int days() const { return days_; }

  Date& operator+=(int d) {
    days_ += d;
    return *this;
  }
  friend Date operator+(Date a, int d) { return Date(a.days_ + d); }
  friend Date operator-(Date a, int d) { return Date(a.days_ - d); }
  friend int operator-(Date a, Date b) { return a.days_ - b.days_; }
  auto operator<=>(const Date&) const = default;

private:
  explicit Date(int days) : days_(days) {}
  int days_ = 0;
};

// Inclusive on both ends.
struct DateRange {
  Date first;
  Date last;

  int length() const { return last - first + 1; }
  bool contains(Date d) const { return first <= d && d <= last; }
  bool contains(const DateRange& r) const {
    return first <= r.first && r.last <= last;
  }
  auto operator<=>(const DateRange&) const = default;
};

// A 1-degree grid cell identified by its southwest corner degree.
struct CellId {
  int lat_index = 0;  // [-90, 89]
  int lon_index = 0;  // [-180, 179]

  bool valid() const {
    return lat_index >= -90 && lat_index <= 89 && lon_index >= -180 &&
           lon_index <= 179;
  }
  auto operator<=>(const CellId&) const = default;
};

// Degree bounding box; a cell belongs iff its corner lies in
// [lat_min, lat_max) x [lon_min, lon_max).
struct BoundingBox {
  double lat_min = 0, lat_max = 0, lon_min = 0, lon_max = 0;

  bool degenerate() const { return !(lat_min < lat_max && lon_min < lon_max); }
  bool contains(CellId c) const {
    return c.lat_index >= lat_min && c.lat_index < lat_max &&
           c.lon_index >= lon_min && c.lon_index < lon_max;
  }
  auto operator<=>(const BoundingBox&) const = default;
};

// One grid cell on one day. Retrieval gaps appear as empty optionals.
struct DailyObservation {
  CellId cell;
  Date date;
  double latitude = 0;   // center of cell, degrees
  double longitude = 0;  // center of cell, degrees
  int land_sea = 0;      // 1 = land, 0 = sea
  double topography = 0; // meters above the geoid
  std::optional<double> surf_air_temp;  // Kelvin
  std::optional<double> trop_height;    // meters above sea level
  std::array<std::optional<double>, kProfileLevels> temp_profile{};  // Kelvin
  std::array<std::optional<double>, kProfileLevels> h2o_mmr{};       // g/kg
};

// Throws RangeError when a value violates the observation invariants.
void validate(const DailyObservation& obs);

// Selector over the per-observation variables. Canonical names:
// surf_air_temp, trop_height, temp_1..temp_12, mmr_1..mmr_12,
// latitude, longitude, land_sea, topography.
class Variable {
public:
  enum class Kind {
    surf_air_temp,
    trop_height,
    temp,  // needs level
    mmr,   // needs level
    latitude,
    longitude,
    land_sea,
    topography,
  };

  Variable() = default;
  explicit Variable(Kind kind, int level = 0);

  static Variable parse(std::string_view name);  // UnknownVariableError
  static std::vector<Variable> parse_list(std::string_view comma_separated);

  Kind kind() const { return kind_; }
  int level() const { return level_; }
  std::string name() const;
  std::optional<double> value(const DailyObservation& obs) const;

  auto operator<=>(const Variable&) const = default;

private:
  Kind kind_ = Kind::surf_air_temp;
  int level_ = 0;  // 1..12 for temp/mmr
};

// Immutable collection of daily observations keyed by (cell, date).
class Panel {
public:
  Panel() = default;
  // Validates observations and rejects duplicate (cell, date) keys.
  explicit Panel(std::vector<DailyObservation> observations);

  using Key = std::pair<CellId, Date>;

  const std::map<Key, DailyObservation>& observations() const { return obs_; }
  const DailyObservation* find(CellId cell, Date date) const;
  std::vector<CellId> cells() const;
  std::size_t size() const { return obs_.size(); }
  bool empty() const { return obs_.empty(); }

  // Tight bounds over the stored observations; both require a nonempty panel.
  DateRange date_span() const;
  BoundingBox region() const;

private:
  std::map<Key, DailyObservation> obs_;
  DateRange span_{};
  BoundingBox region_{};
};

// CSV schema (header required, one row per cell-day):
// date,lat_idx,lon_idx,latitude,longitude,land_sea,topography,surf_air_temp,
// trop_height,temp_1..temp_12,mmr_1..mmr_12
// Missing numerics as empty field or NA. Finite values round-trip bit-exact.
Panel load_panel(const std::string& path);
void write_panel(const Panel& panel, const std::string& path);

// Panel restricted to cells whose corner lies in bbox.
Panel select_region(const Panel& panel, const BoundingBox& bbox);

// Per-cell arithmetic mean of the selected variable over the window, in date
// order. A cell maps to nullopt when any day of the window is absent or
// missing for it (strict rule; incomplete cells are dropped downstream).
std::map<CellId, std::optional<double>> window_mean(const Panel& panel,
                                                    const Variable& variable,
                                                    const DateRange& window);

}  // namespace heatwave
