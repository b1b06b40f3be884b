#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "heatwave/grid_data.hpp"

#include "json.hpp"

namespace heatwave {

enum class LinkKind { none, linear, sigmoid };

// How one profile variable is tied to the planted heat dome.
//
// linear: the variable stays at its background distribution, and on dome days
//   the surface boost gains coefficient * (standardized lag-date value), so a
//   gain-score regression has a known linear signal.
// sigmoid: on "precursor" days (the dome window shifted back by
//   predictor_lead_days) the variable's mean shifts by +coefficient/2, off
//   days by -coefficient/2, with variance scale*coefficient. For a balanced
//   event/non-event stack the Bayes posterior is then exactly
//   logistic((x - center) / scale).
struct PredictorEffect {
  Variable variable;
  LinkKind link = LinkKind::none;
  double coefficient = 0;
  double center = 0;  // sigmoid midpoint
  double scale = 1;   // sigmoid slope scale
};

struct SynthConfig {
  int n_lat = 12;  // grid is n_lat x n_lon cells
  int n_lon = 12;
  CellId origin{40, -125};  // southwest corner
  DateRange date_span;
  DateRange dome_window;
  std::vector<CellId> dome_cells;  // empty = every cell sits under the dome
  double dome_amplitude = 6.0;     // Kelvin added to dome-day surface temps
  std::vector<PredictorEffect> predictor_effects;
  double noise_sigma = 1.0;   // daily surface-temperature noise, Kelvin
  double missing_rate = 0.0;  // per cell-day blanking probability
  int predictor_lead_days = 14;
  double drift_per_day = 0.0;  // shared seasonal trend
  std::vector<std::pair<CellId, Date>> forced_missing;
  std::uint64_t seed = 0;

  std::size_t n_cells() const {
    return static_cast<std::size_t>(n_lat) * static_cast<std::size_t>(n_lon);
  }

  static SynthConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

// Everything the generator planted, sufficient to compute Bayes-optimal
// performance for the configs used in the test suites.
struct GroundTruth {
  std::map<CellId, double> cell_baseline;
  std::vector<CellId> dome_cells;
  DateRange dome_window;
  DateRange precursor_window;  // dome_window shifted back by the lead
  Date linear_reference_date;  // lag date whose values drive the dome boost
  double dome_amplitude = 0;
  double noise_sigma = 0;
  double drift_per_day = 0;
  int predictor_lead_days = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<CellId, Date>> missing_keys;

  struct EffectTruth {
    std::string variable;
    std::string link;
    double coefficient = 0;
    double center = 0;
    double scale = 0;
    double mean_off = 0;  // background mean (sigmoid: off-precursor mean)
    double mean_on = 0;   // sigmoid: precursor-day mean
    double sd = 0;
  };
  std::vector<EffectTruth> effects;

  // For a gain design whose post window matches the dome window: planted
  // signal variance, window-mean noise variance, and their R-squared.
  double signal_variance = 0;
  double gain_noise_variance = 0;
  double bayes_r2 = 0;
  // For a balanced event/non-event stack over the sigmoid effects.
  double bayes_error = 0;

  nlohmann::ordered_json to_json() const;
};

// Deterministic synthetic panel with a planted heat dome. Draws are streamed
// per cell, so regeneration is bit-exact for a given seed.
std::pair<Panel, GroundTruth> generate(const SynthConfig& config);

}  // namespace heatwave
