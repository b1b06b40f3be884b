#include "heatwave/grid_data.hpp"

#include <cmath>

#include "doctest.h"
#include "heatwave/synthgen.hpp"
#include "test_util.hpp"

using namespace heatwave;

namespace {

std::string panel_header() {
  std::string h = "date,lat_idx,lon_idx,latitude,longitude,land_sea,topography,"
                  "surf_air_temp,trop_height";
  for (int l = 1; l <= 12; ++l) h += ",temp_" + std::to_string(l);
  for (int l = 1; l <= 12; ++l) h += ",mmr_" + std::to_string(l);
  return h;
}

// One row with every profile value filled.
std::string panel_row(const std::string& date, int lat, int lon, double surf,
                      double fill = 250.0) {
  std::string r = date + "," + std::to_string(lat) + "," + std::to_string(lon) +
                  "," + std::to_string(lat + 0.5) + "," +
                  std::to_string(lon + 0.5) + ",1,100," + std::to_string(surf) +
                  ",11000";
  for (int l = 0; l < 12; ++l) r += "," + std::to_string(fill);
  for (int l = 0; l < 12; ++l) r += ",2.5";
  return r;
}

}  // namespace

TEST_CASE("dates parse, format, and offset") {
  const Date d = Date::from_iso("2021-06-27");
  CHECK(d.to_iso() == "2021-06-27");
  CHECK((d + 4).to_iso() == "2021-07-01");
  CHECK((d - 27).to_iso() == "2021-05-31");
  CHECK((d + 4) - d == 4);
  CHECK(Date::from_iso("2020-02-29").to_iso() == "2020-02-29");
  CHECK_THROWS_AS(Date::from_iso("2021-02-29"), SchemaError);
  CHECK_THROWS_AS(Date::from_iso("2021-6-27"), SchemaError);
}

TEST_CASE("variable names round-trip") {
  for (const char* name : {"surf_air_temp", "trop_height", "temp_1", "temp_12",
                           "mmr_8", "latitude", "longitude", "land_sea",
                           "topography"}) {
    CHECK(Variable::parse(name).name() == name);
  }
  CHECK_THROWS_AS(Variable::parse("temp_13"), UnknownVariableError);
  CHECK_THROWS_AS(Variable::parse("temp_0"), UnknownVariableError);
  CHECK_THROWS_AS(Variable::parse("humidity"), UnknownVariableError);
  CHECK(Variable::parse_list("temp_8,trop_height").size() == 2);
}

TEST_CASE("load_panel accepts a minimal well-formed file") {
  test_util::TempDir dir;
  const auto path = dir.file("panel.csv");
  test_util::write_file(path, panel_header() + "\n" +
                                  panel_row("2021-06-01", 45, -120, 290.0) + "\n" +
                                  panel_row("2021-06-02", 45, -120, 291.0) + "\n");
  const Panel p = load_panel(path);
  CHECK(p.size() == 2);
  CHECK(p.cells().size() == 1);
  CHECK(p.date_span().length() == 2);
}

TEST_CASE("load_panel rejects duplicate (cell, date) keys") {
  test_util::TempDir dir;
  const auto path = dir.file("panel.csv");
  test_util::write_file(path, panel_header() + "\n" +
                                  panel_row("2021-06-01", 45, -120, 290.0) + "\n" +
                                  panel_row("2021-06-01", 45, -120, 291.0) + "\n");
  CHECK_THROWS_AS(load_panel(path), DuplicateKeyError);
}

TEST_CASE("load_panel schema and range errors") {
  test_util::TempDir dir;
  const auto path = dir.file("panel.csv");

  test_util::write_file(path, "date,foo\n");
  CHECK_THROWS_AS(load_panel(path), SchemaError);

  test_util::write_file(path, panel_header() + "\n2021-06-01,45,-120\n");
  CHECK_THROWS_AS(load_panel(path), SchemaError);

  test_util::write_file(path, panel_header() + "\n" +
                                  panel_row("2021-06-01", 45, -120, 290.0) + "\n");
  CHECK_NOTHROW(load_panel(path));

  // surf temp outside (0, 400)
  test_util::write_file(path, panel_header() + "\n" +
                                  panel_row("2021-06-01", 45, -120, 450.0) + "\n");
  CHECK_THROWS_AS(load_panel(path), RangeError);

  // cell index outside the valid grid
  test_util::write_file(path, panel_header() + "\n" +
                                  panel_row("2021-06-01", 95, -120, 290.0) + "\n");
  CHECK_THROWS_AS(load_panel(path), RangeError);
}

TEST_CASE("missing numerics parse from empty fields and NA") {
  test_util::TempDir dir;
  const auto path = dir.file("panel.csv");
  std::string row = "2021-06-01,45,-120,45.5,-119.5,0,0,,NA";
  for (int l = 0; l < 24; ++l) row += ",";
  test_util::write_file(path, panel_header() + "\n" + row + "\n");
  const Panel p = load_panel(path);
  const auto* obs = p.find({45, -120}, Date::from_iso("2021-06-01"));
  REQUIRE(obs != nullptr);
  CHECK(!obs->surf_air_temp.has_value());
  CHECK(!obs->trop_height.has_value());
  CHECK(!obs->temp_profile[0].has_value());
}

TEST_CASE("write_panel then load_panel is the identity") {
  SynthConfig config;
  config.n_lat = 3;
  config.n_lon = 3;
  config.date_span = {Date::from_iso("2021-06-01"), Date::from_iso("2021-06-10")};
  config.dome_window = {Date::from_iso("2021-06-07"), Date::from_iso("2021-06-10")};
  config.missing_rate = 0.1;
  config.seed = 7;
  const auto [panel, truth] = generate(config);

  test_util::TempDir dir;
  const auto path = dir.file("panel.csv");
  write_panel(panel, path);
  const Panel back = load_panel(path);

  REQUIRE(back.size() == panel.size());
  for (const auto& [key, obs] : panel.observations()) {
    const auto* b = back.find(key.first, key.second);
    REQUIRE(b != nullptr);
    CHECK(b->surf_air_temp == obs.surf_air_temp);  // bit-exact
    CHECK(b->trop_height == obs.trop_height);
    CHECK(b->temp_profile == obs.temp_profile);
    CHECK(b->h2o_mmr == obs.h2o_mmr);
    CHECK(b->latitude == obs.latitude);
    CHECK(b->topography == obs.topography);
    CHECK(b->land_sea == obs.land_sea);
  }

  // A second write produces identical bytes.
  const auto path2 = dir.file("panel2.csv");
  write_panel(back, path2);
  CHECK(test_util::read_file(path) == test_util::read_file(path2));
}

TEST_CASE("synthgen round-trip keeps the generated panel size") {
  SynthConfig config;
  config.n_lat = 12;
  config.n_lon = 12;
  config.date_span = {Date::from_iso("2021-06-01"), Date::from_iso("2021-06-30")};
  config.dome_window = {Date::from_iso("2021-06-27"), Date::from_iso("2021-06-30")};
  config.seed = 3;
  const auto [panel, truth] = generate(config);
  CHECK(panel.size() == 144u * 30u);

  test_util::TempDir dir;
  const auto path = dir.file("panel.csv");
  write_panel(panel, path);
  CHECK(load_panel(path).size() == 4320u);
}

TEST_CASE("select_region") {
  SynthConfig config;
  config.n_lat = 14;
  config.n_lon = 14;
  config.origin = {39, -126};
  config.date_span = {Date::from_iso("2021-06-01"), Date::from_iso("2021-06-05")};
  config.dome_window = {Date::from_iso("2021-06-03"), Date::from_iso("2021-06-05")};
  config.seed = 5;
  const auto [panel, truth] = generate(config);

  SUBCASE("a 12x12 degree box selects exactly 144 cells") {
    const Panel sub = select_region(panel, {40, 52, -125, -113});
    CHECK(sub.cells().size() == 144);
  }
  SUBCASE("the panel's own region is the identity") {
    const Panel sub = select_region(panel, panel.region());
    CHECK(sub.size() == panel.size());
  }
  SUBCASE("a 1x1 degree box selects one cell") {
    const Panel sub = select_region(panel, {40, 41, -120, -119});
    CHECK(sub.cells().size() == 1);
  }
  SUBCASE("an empty selection throws") {
    CHECK_THROWS_AS(select_region(panel, {-10, -5, 0, 5}), EmptySelectionError);
  }
  SUBCASE("a degenerate box throws") {
    CHECK_THROWS_AS(select_region(panel, {40, 40, -125, -113}), InvalidArgumentError);
  }
  SUBCASE("selection is idempotent") {
    const BoundingBox bbox{41, 44, -124, -121};
    const Panel once = select_region(panel, bbox);
    const Panel twice = select_region(once, bbox);
    CHECK(once.size() == twice.size());
  }
}

TEST_CASE("window_mean") {
  test_util::TempDir dir;
  const auto path = dir.file("panel.csv");
  test_util::write_file(path, panel_header() + "\n" +
                                  panel_row("2021-06-01", 45, -120, 300.0) + "\n" +
                                  panel_row("2021-06-02", 45, -120, 302.0) + "\n" +
                                  panel_row("2021-06-03", 45, -120, 304.0) + "\n" +
                                  panel_row("2021-06-04", 45, -120, 306.0) + "\n" +
                                  panel_row("2021-06-01", 46, -120, 290.0) + "\n" +
                                  panel_row("2021-06-02", 46, -120, 290.0) + "\n" +
                                  panel_row("2021-06-04", 46, -120, 290.0) + "\n");
  const Panel p = load_panel(path);
  const Variable surf = Variable::parse("surf_air_temp");
  const DateRange window{Date::from_iso("2021-06-01"), Date::from_iso("2021-06-04")};

  const auto means = window_mean(p, surf, window);
  CHECK(means.at({45, -120}) == 303.0);
  // a day absent inside the window makes the cell missing (strict rule)
  CHECK(!means.at({46, -120}).has_value());

  // single-day window returns the day's value exactly
  const auto single = window_mean(p, surf, {window.first, window.first});
  CHECK(single.at({45, -120}) == 300.0);

  CHECK_THROWS_AS(
      window_mean(p, surf,
                  {Date::from_iso("2021-05-01"), Date::from_iso("2021-06-02")}),
      WindowOutOfSpanError);
}

TEST_CASE("window_mean recovers the planted dome offset") {
  SynthConfig config;
  config.n_lat = 6;
  config.n_lon = 6;
  config.date_span = {Date::from_iso("2021-06-01"), Date::from_iso("2021-06-30")};
  config.dome_window = {Date::from_iso("2021-06-27"), Date::from_iso("2021-06-30")};
  config.dome_amplitude = 6.0;
  config.noise_sigma = 0.5;
  config.seed = 11;
  const auto [panel, truth] = generate(config);

  const Variable surf = Variable::parse("surf_air_temp");
  const DateRange pre{Date::from_iso("2021-06-23"), Date::from_iso("2021-06-26")};
  const auto pre_means = window_mean(panel, surf, pre);
  const auto post_means = window_mean(panel, surf, config.dome_window);
  // Window-mean noise has sd sigma/sqrt(2); 2*sigma covers it comfortably for
  // this fixed seed.
  for (const CellId cell : panel.cells()) {
    REQUIRE(pre_means.at(cell).has_value());
    REQUIRE(post_means.at(cell).has_value());
    const double diff = *post_means.at(cell) - *pre_means.at(cell);
    CHECK(std::abs(diff - 6.0) < 2.0 * config.noise_sigma);
  }
}

TEST_CASE("window_mean with zero noise recovers the offset exactly") {
  SynthConfig config;
  config.n_lat = 4;
  config.n_lon = 4;
  config.date_span = {Date::from_iso("2021-06-01"), Date::from_iso("2021-06-30")};
  config.dome_window = {Date::from_iso("2021-06-27"), Date::from_iso("2021-06-30")};
  config.dome_amplitude = 6.0;
  config.noise_sigma = 0.0;
  config.seed = 2;
  const auto [panel, truth] = generate(config);

  const Variable surf = Variable::parse("surf_air_temp");
  const auto pre = window_mean(
      panel, surf, {Date::from_iso("2021-06-23"), Date::from_iso("2021-06-26")});
  const auto post = window_mean(panel, surf, config.dome_window);
  for (const CellId cell : panel.cells()) {
    CHECK(*post.at(cell) - *pre.at(cell) == 6.0);
  }
}

TEST_CASE("select_region commutes with window_mean on the selected cells") {
  SynthConfig config;
  config.n_lat = 5;
  config.n_lon = 5;
  config.date_span = {Date::from_iso("2021-06-01"), Date::from_iso("2021-06-08")};
  config.dome_window = {Date::from_iso("2021-06-05"), Date::from_iso("2021-06-08")};
  config.seed = 13;
  const auto [panel, truth] = generate(config);

  const BoundingBox bbox{41, 44, -124, -121};
  const Variable v = Variable::parse("temp_8");
  const DateRange window{Date::from_iso("2021-06-02"), Date::from_iso("2021-06-05")};

  const auto whole = window_mean(panel, v, window);
  const auto sub = window_mean(select_region(panel, bbox), v, window);
  CHECK(sub.size() < whole.size());
  for (const auto& [cell, mean] : sub) {
    CHECK(whole.at(cell) == mean);
  }
}
