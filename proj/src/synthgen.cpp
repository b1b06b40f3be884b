#include "heatwave/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "heatwave/rng.hpp"

namespace heatwave {

namespace {

struct Background {
  double mean = 0;
  double sd = 1;
  double lo = -1e300;  // clamp range enforcing the observation invariants
  double hi = 1e300;
};

Background background_of(const Variable& v) {
  switch (v.kind()) {
    case Variable::Kind::temp:
      return {290.0 - 6.5 * v.level(), 6.0, 1.0, 399.0};
    case Variable::Kind::mmr:
      return {4.0, 1.5, 0.0, 1e300};
    case Variable::Kind::trop_height:
      return {11000.0, 900.0, -1e300, 1e300};
    default:
      throw ConfigError("predictor effects must target trop_height, temp_*, "
                        "or mmr_* (got " + v.name() + ")");
  }
}

std::string link_name(LinkKind link) {
  switch (link) {
    case LinkKind::none: return "none";
    case LinkKind::linear: return "linear";
    case LinkKind::sigmoid: return "sigmoid";
  }
  return {};
}

LinkKind link_from_name(const std::string& s) {
  if (s == "none") return LinkKind::none;
  if (s == "linear") return LinkKind::linear;
  if (s == "sigmoid") return LinkKind::sigmoid;
  throw ConfigError("unknown link '" + s + "'");
}

// The dynamic per-day variables, in generation order.
std::vector<Variable> dynamic_variables() {
  std::vector<Variable> vars;
  vars.emplace_back(Variable::Kind::trop_height);
  for (int l = 1; l <= kProfileLevels; ++l)
    vars.emplace_back(Variable::Kind::temp, l);
  for (int l = 1; l <= kProfileLevels; ++l)
    vars.emplace_back(Variable::Kind::mmr, l);
  return vars;
}

struct ResolvedEffect {
  LinkKind link = LinkKind::none;
  double coefficient = 0;
  double center = 0;
  double scale = 0;
  Background bg;
  double mean_on = 0, mean_off = 0, sd = 1;
};

void validate_config(const SynthConfig& c) {
  if (c.n_lat < 1 || c.n_lon < 1) throw ConfigError("grid must be nonempty");
  if (c.date_span.length() < 1) throw ConfigError("empty date span");
  if (!c.date_span.contains(c.dome_window)) {
    throw ConfigError("dome window must lie inside the date span");
  }
  if (!(c.missing_rate >= 0.0 && c.missing_rate < 1.0)) {
    throw ConfigError("missing_rate must be in [0, 1)");
  }
  if (!(c.noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
  CellId corner{c.origin.lat_index + c.n_lat - 1, c.origin.lon_index + c.n_lon - 1};
  if (!c.origin.valid() || !corner.valid()) {
    throw ConfigError("grid extends outside valid cell indices");
  }
}

}  // namespace

std::pair<Panel, GroundTruth> generate(const SynthConfig& config) {
  validate_config(config);

  const auto dyn_vars = dynamic_variables();
  std::vector<ResolvedEffect> effects(dyn_vars.size());
  for (std::size_t i = 0; i < dyn_vars.size(); ++i) {
    effects[i].bg = background_of(dyn_vars[i]);
    effects[i].mean_on = effects[i].mean_off = effects[i].bg.mean;
    effects[i].sd = effects[i].bg.sd;
  }
  for (const auto& e : config.predictor_effects) {
    const auto it = std::find(dyn_vars.begin(), dyn_vars.end(), e.variable);
    if (it == dyn_vars.end()) background_of(e.variable);  // throws
    auto& r = effects[static_cast<std::size_t>(it - dyn_vars.begin())];
    if (r.link != LinkKind::none) {
      throw ConfigError("duplicate effect for " + e.variable.name());
    }
    r.link = e.link;
    r.coefficient = e.coefficient;
    r.center = e.center;
    r.scale = e.scale;
    if (e.link == LinkKind::sigmoid) {
      if (!(e.coefficient > 0) || !(e.scale > 0)) {
        throw ConfigError("sigmoid effects need coefficient > 0 and scale > 0");
      }
      r.sd = std::sqrt(e.scale * e.coefficient);
      r.mean_on = e.center + e.coefficient / 2.0;
      r.mean_off = e.center - e.coefficient / 2.0;
    }
  }

  const bool dome_everywhere = config.dome_cells.empty();
  const auto under_dome = [&](CellId cell) {
    return dome_everywhere ||
           std::find(config.dome_cells.begin(), config.dome_cells.end(), cell) !=
               config.dome_cells.end();
  };

  GroundTruth truth;
  truth.dome_window = config.dome_window;
  truth.precursor_window = {config.dome_window.first - config.predictor_lead_days,
                            config.dome_window.last - config.predictor_lead_days};
  truth.linear_reference_date =
      config.dome_window.first - config.predictor_lead_days;
  truth.dome_amplitude = config.dome_amplitude;
  truth.noise_sigma = config.noise_sigma;
  truth.drift_per_day = config.drift_per_day;
  truth.predictor_lead_days = config.predictor_lead_days;
  truth.seed = config.seed;

  double signal_variance = 0;
  double separation_sq = 0;  // squared Mahalanobis distance over sigmoid vars
  for (std::size_t i = 0; i < dyn_vars.size(); ++i) {
    const auto& r = effects[i];
    if (r.link == LinkKind::none) continue;
    GroundTruth::EffectTruth t;
    t.variable = dyn_vars[i].name();
    t.link = link_name(r.link);
    t.coefficient = r.coefficient;
    t.center = r.center;
    t.scale = r.scale;
    t.mean_on = r.mean_on;
    t.mean_off = r.mean_off;
    t.sd = r.sd;
    truth.effects.push_back(t);
    if (r.link == LinkKind::linear) signal_variance += r.coefficient * r.coefficient;
    if (r.link == LinkKind::sigmoid) separation_sq += r.coefficient / r.scale;
  }
  truth.signal_variance = signal_variance;
  truth.gain_noise_variance = 2.0 * config.noise_sigma * config.noise_sigma /
                              config.dome_window.length();
  truth.bayes_r2 =
      signal_variance > 0
          ? signal_variance / (signal_variance + truth.gain_noise_variance)
          : 0.0;
  truth.bayes_error =
      separation_sq > 0
          ? 0.5 * std::erfc(std::sqrt(separation_sq) / (2.0 * std::sqrt(2.0)))
          : 0.5;

  const int n_days = config.date_span.length();
  std::vector<DailyObservation> observations;
  observations.reserve(config.n_cells() * static_cast<std::size_t>(n_days));

  std::size_t cell_index = 0;
  for (int li = 0; li < config.n_lat; ++li) {
    for (int lo = 0; lo < config.n_lon; ++lo, ++cell_index) {
      const CellId cell{config.origin.lat_index + li, config.origin.lon_index + lo};
      Rng rng = Rng::stream(config.seed, cell_index);

      const double baseline = rng.normal(290.0, 4.0);
      const int land_sea = rng.bernoulli(0.7) ? 1 : 0;
      const double topography = std::abs(rng.normal(500.0, 300.0));
      truth.cell_baseline[cell] = baseline;
      const bool in_dome = under_dome(cell);
      if (in_dome) truth.dome_cells.push_back(cell);

      // Pass 1: one fixed draw sequence per day.
      struct DayDraws {
        bool missing = false;
        double z_surf = 0;
        std::vector<double> values;
      };
      std::vector<DayDraws> days(static_cast<std::size_t>(n_days));
      for (int di = 0; di < n_days; ++di) {
        const Date date = config.date_span.first + di;
        auto& day = days[static_cast<std::size_t>(di)];
        day.missing = config.missing_rate > 0 && rng.bernoulli(config.missing_rate);
        day.z_surf = rng.normal();
        day.values.resize(dyn_vars.size());
        const bool precursor = in_dome && truth.precursor_window.contains(date);
        for (std::size_t vi = 0; vi < dyn_vars.size(); ++vi) {
          const auto& r = effects[vi];
          const double mean = precursor ? r.mean_on : r.mean_off;
          day.values[vi] = std::clamp(rng.normal(mean, r.sd), r.bg.lo, r.bg.hi);
        }
      }

      // Dome-day surface boost driven by the lag-date linear predictors.
      double boost = config.dome_amplitude;
      if (config.date_span.contains(truth.linear_reference_date)) {
        const int ref_di = truth.linear_reference_date - config.date_span.first;
        for (std::size_t vi = 0; vi < dyn_vars.size(); ++vi) {
          const auto& r = effects[vi];
          if (r.link != LinkKind::linear) continue;
          const double x = days[static_cast<std::size_t>(ref_di)].values[vi];
          boost += r.coefficient * (x - r.bg.mean) / r.bg.sd;
        }
      }

      for (int di = 0; di < n_days; ++di) {
        const Date date = config.date_span.first + di;
        const auto& day = days[static_cast<std::size_t>(di)];
        DailyObservation obs;
        obs.cell = cell;
        obs.date = date;
        obs.latitude = cell.lat_index + 0.5;
        obs.longitude = cell.lon_index + 0.5;
        obs.land_sea = land_sea;
        obs.topography = topography;
        if (!day.missing) {
          double surf = baseline + config.drift_per_day * di +
                        config.noise_sigma * day.z_surf;
          if (in_dome && config.dome_window.contains(date)) surf += boost;
          obs.surf_air_temp = std::clamp(surf, 1.0, 399.0);
          obs.trop_height = day.values[0];
          for (int l = 0; l < kProfileLevels; ++l) {
            obs.temp_profile[l] = day.values[1 + static_cast<std::size_t>(l)];
            obs.h2o_mmr[l] =
                day.values[1 + kProfileLevels + static_cast<std::size_t>(l)];
          }
        } else {
          truth.missing_keys.emplace_back(cell, date);
        }
        observations.push_back(std::move(obs));
      }
    }
  }

  // Forced blanking happens after generation so the draw sequence (and
  // everything else in the panel) is unchanged by it.
  for (const auto& [cell, date] : config.forced_missing) {
    if (!config.date_span.contains(date)) {
      throw ConfigError("forced_missing date outside the span");
    }
    const int li = cell.lat_index - config.origin.lat_index;
    const int lo = cell.lon_index - config.origin.lon_index;
    if (li < 0 || li >= config.n_lat || lo < 0 || lo >= config.n_lon) {
      throw ConfigError("forced_missing cell outside the grid");
    }
    const std::size_t ci =
        static_cast<std::size_t>(li) * static_cast<std::size_t>(config.n_lon) +
        static_cast<std::size_t>(lo);
    const std::size_t idx = ci * static_cast<std::size_t>(n_days) +
                            static_cast<std::size_t>(date - config.date_span.first);
    auto& obs = observations[idx];
    if (obs.surf_air_temp) {
      obs.surf_air_temp.reset();
      obs.trop_height.reset();
      obs.temp_profile.fill(std::nullopt);
      obs.h2o_mmr.fill(std::nullopt);
      truth.missing_keys.emplace_back(cell, date);
    }
  }
  std::sort(truth.missing_keys.begin(), truth.missing_keys.end());

  return {Panel(std::move(observations)), std::move(truth)};
}

namespace {

nlohmann::ordered_json range_json(const DateRange& r) {
  return {{"first", r.first.to_iso()}, {"last", r.last.to_iso()}};
}

DateRange range_from_json(const nlohmann::json& j) {
  return {Date::from_iso(j.at("first").get<std::string>()),
          Date::from_iso(j.at("last").get<std::string>())};
}

}  // namespace

SynthConfig SynthConfig::from_json(const nlohmann::json& j) {
  SynthConfig c;
  c.n_lat = j.value("n_lat", c.n_lat);
  c.n_lon = j.value("n_lon", c.n_lon);
  if (j.contains("origin")) {
    c.origin = {j["origin"].at("lat").get<int>(), j["origin"].at("lon").get<int>()};
  }
  c.date_span = range_from_json(j.at("date_span"));
  c.dome_window = range_from_json(j.at("dome_window"));
  if (j.contains("dome_cells")) {
    for (const auto& cj : j["dome_cells"]) {
      c.dome_cells.push_back({cj.at(0).get<int>(), cj.at(1).get<int>()});
    }
  }
  c.dome_amplitude = j.value("dome_amplitude", c.dome_amplitude);
  if (j.contains("predictor_effects")) {
    for (const auto& ej : j["predictor_effects"]) {
      PredictorEffect e;
      e.variable = Variable::parse(ej.at("variable").get<std::string>());
      e.link = link_from_name(ej.at("link").get<std::string>());
      e.coefficient = ej.value("coefficient", 0.0);
      e.center = ej.value("center", 0.0);
      e.scale = ej.value("scale", 1.0);
      c.predictor_effects.push_back(e);
    }
  }
  c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
  c.missing_rate = j.value("missing_rate", c.missing_rate);
  c.predictor_lead_days = j.value("predictor_lead_days", c.predictor_lead_days);
  c.drift_per_day = j.value("drift_per_day", c.drift_per_day);
  if (j.contains("forced_missing")) {
    for (const auto& fj : j["forced_missing"]) {
      c.forced_missing.emplace_back(
          CellId{fj.at(0).get<int>(), fj.at(1).get<int>()},
          Date::from_iso(fj.at(2).get<std::string>()));
    }
  }
  c.seed = j.value("seed", c.seed);
  return c;
}

nlohmann::ordered_json SynthConfig::to_json() const {
  nlohmann::ordered_json j;
  j["n_lat"] = n_lat;
  j["n_lon"] = n_lon;
  j["origin"] = {{"lat", origin.lat_index}, {"lon", origin.lon_index}};
  j["date_span"] = range_json(date_span);
  j["dome_window"] = range_json(dome_window);
  auto cells = nlohmann::ordered_json::array();
  for (const auto& cell : dome_cells)
    cells.push_back({cell.lat_index, cell.lon_index});
  j["dome_cells"] = std::move(cells);
  j["dome_amplitude"] = dome_amplitude;
  auto effs = nlohmann::ordered_json::array();
  for (const auto& e : predictor_effects) {
    effs.push_back({{"variable", e.variable.name()},
                    {"link", link_name(e.link)},
                    {"coefficient", e.coefficient},
                    {"center", e.center},
                    {"scale", e.scale}});
  }
  j["predictor_effects"] = std::move(effs);
  j["noise_sigma"] = noise_sigma;
  j["missing_rate"] = missing_rate;
  j["predictor_lead_days"] = predictor_lead_days;
  j["drift_per_day"] = drift_per_day;
  auto forced = nlohmann::ordered_json::array();
  for (const auto& [cell, date] : forced_missing) {
    forced.push_back({cell.lat_index, cell.lon_index, date.to_iso()});
  }
  j["forced_missing"] = std::move(forced);
  j["seed"] = seed;
  return j;
}

nlohmann::ordered_json GroundTruth::to_json() const {
  nlohmann::ordered_json j;
  j["dome_window"] = range_json(dome_window);
  j["precursor_window"] = range_json(precursor_window);
  j["linear_reference_date"] = linear_reference_date.to_iso();
  j["dome_amplitude"] = dome_amplitude;
  j["noise_sigma"] = noise_sigma;
  j["drift_per_day"] = drift_per_day;
  j["predictor_lead_days"] = predictor_lead_days;
  j["seed"] = seed;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& cell : dome_cells)
    cells.push_back({cell.lat_index, cell.lon_index});
  j["dome_cells"] = std::move(cells);
  auto baselines = nlohmann::ordered_json::array();
  for (const auto& [cell, b] : cell_baseline) {
    baselines.push_back({cell.lat_index, cell.lon_index, b});
  }
  j["cell_baseline"] = std::move(baselines);
  auto missing = nlohmann::ordered_json::array();
  for (const auto& [cell, date] : missing_keys) {
    missing.push_back({cell.lat_index, cell.lon_index, date.to_iso()});
  }
  j["missing_keys"] = std::move(missing);
  auto effs = nlohmann::ordered_json::array();
  for (const auto& e : effects) {
    effs.push_back({{"variable", e.variable},
                    {"link", e.link},
                    {"coefficient", e.coefficient},
                    {"center", e.center},
                    {"scale", e.scale},
                    {"mean_off", e.mean_off},
                    {"mean_on", e.mean_on},
                    {"sd", e.sd}});
  }
  j["effects"] = std::move(effs);
  j["signal_variance"] = signal_variance;
  j["gain_noise_variance"] = gain_noise_variance;
  j["bayes_r2"] = bayes_r2;
  j["bayes_error"] = bayes_error;
  return j;
}

}  // namespace heatwave
