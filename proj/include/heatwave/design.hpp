#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatwave/grid_data.hpp"

namespace heatwave {

// Window geometry of one crossover arm: a post-test window, an optional
// pre-test window ending strictly before it, and a single lagged predictor
// date strictly before the post window.
struct WindowSpec {
  DateRange post;
  std::optional<DateRange> pre;
  Date predictor_lag;
};

// Throws InvalidArgumentError when the ordering invariants fail.
void validate(const WindowSpec& spec);

// All dates translated by offset days; lengths and gaps are preserved.
WindowSpec shift_spec(const WindowSpec& spec, int offset_days);

struct GainRow {
  CellId cell;
  double pre_mean = 0;
  double post_mean = 0;
  double gain = 0;  // post_mean - pre_mean, fixed at build time
  std::vector<double> predictors;
};

struct GainDataset {
  std::vector<GainRow> rows;
  std::vector<std::string> predictor_names;
  std::size_t n_cells_dropped = 0;  // cells removed by listwise deletion
};

struct LabeledRow {
  CellId cell;
  std::string scenario;
  int label = 0;  // 1 = event, 0 = non-event
  std::vector<double> predictors;
};

struct LabeledDataset {
  std::vector<LabeledRow> rows;
  std::vector<std::string> predictor_names;
  std::size_t n_cells_dropped = 0;
};

struct HistogramBin {
  double lower = 0;
  double upper = 0;
  std::size_t count = 0;
};

struct GainSummary {
  std::size_t n = 0;
  double mean = 0;
  std::size_t n_negative = 0;  // gains strictly below zero
  std::vector<HistogramBin> histogram;
  double bin_width = 0;
};

// One row per cell with a complete pre window, post window, and lag-date
// predictor vector; everything else is dropped listwise. surf_air_temp forms
// the pre/post means and is rejected as a predictor.
GainDataset build_gain_design(const Panel& panel, const WindowSpec& spec,
                              const std::vector<Variable>& predictor_vars);

struct Scenario {
  std::string tag;
  const Panel* panel = nullptr;
  WindowSpec spec;
  int label = 0;
};

// Stacks one row per complete cell per scenario; pre windows are ignored
// (classification designs drop the pre-test). Requires >= 2 scenarios and
// both labels present.
LabeledDataset build_crossover_classification(
    const std::vector<Scenario>& scenarios,
    const std::vector<Variable>& predictor_vars);

// Histogram bins are aligned to integer multiples of bin_width and cover the
// observed gain range; counts always sum to n.
GainSummary gain_summary(const GainDataset& g, double bin_width);

// CSV: cell_lat,cell_lon,scenario,label_or_gain,<predictor columns...>
// Gain rows carry an empty scenario tag. The schema stores the gain only;
// rows loaded back report pre_mean = 0 and post_mean = gain.
void write_csv(const GainDataset& g, const std::string& path);
void write_csv(const LabeledDataset& l, const std::string& path);
GainDataset read_gain_csv(const std::string& path);
LabeledDataset read_labeled_csv(const std::string& path);

}  // namespace heatwave
