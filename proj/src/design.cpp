#include "heatwave/design.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "heatwave/csv.hpp"

namespace heatwave {

void validate(const WindowSpec& spec) {
  if (spec.post.length() < 1) {
    throw InvalidArgumentError("post window is empty");
  }
  if (spec.pre) {
    if (spec.pre->length() < 1) {
      throw InvalidArgumentError("pre window is empty");
    }
    if (!(spec.pre->last < spec.post.first)) {
      throw InvalidArgumentError("pre window must end before the post window");
    }
  }
  if (!(spec.predictor_lag < spec.post.first)) {
    throw InvalidArgumentError("predictor lag date must precede the post window");
  }
}

WindowSpec shift_spec(const WindowSpec& spec, int offset_days) {
  WindowSpec out = spec;
  out.post.first += offset_days;
  out.post.last += offset_days;
  if (out.pre) {
    out.pre->first += offset_days;
    out.pre->last += offset_days;
  }
  out.predictor_lag += offset_days;
  return out;
}

namespace {

void reject_surf_air_temp(const std::vector<Variable>& predictor_vars) {
  for (const auto& v : predictor_vars) {
    if (v.kind() == Variable::Kind::surf_air_temp) {
      throw InvalidArgumentError(
          "surf_air_temp forms the pre/post means and cannot be a predictor");
    }
  }
}

// Lag-date predictor vector for one cell; nullopt when any value is missing.
std::optional<std::vector<double>> lag_predictors(
    const Panel& panel, CellId cell, Date lag,
    const std::vector<Variable>& vars) {
  const DailyObservation* obs = panel.find(cell, lag);
  if (!obs) return std::nullopt;
  std::vector<double> values;
  values.reserve(vars.size());
  for (const auto& v : vars) {
    const auto value = v.value(*obs);
    if (!value) return std::nullopt;
    values.push_back(*value);
  }
  return values;
}

std::vector<std::string> names_of(const std::vector<Variable>& vars) {
  std::vector<std::string> names;
  names.reserve(vars.size());
  for (const auto& v : vars) names.push_back(v.name());
  return names;
}

}  // namespace

GainDataset build_gain_design(const Panel& panel, const WindowSpec& spec,
                              const std::vector<Variable>& predictor_vars) {
  validate(spec);
  if (!spec.pre) {
    throw InvalidArgumentError("gain designs require a pre window");
  }
  reject_surf_air_temp(predictor_vars);
  const DateRange span = panel.date_span();
  if (!span.contains(spec.post) || !span.contains(*spec.pre) ||
      !span.contains(spec.predictor_lag)) {
    throw WindowOutOfSpanError("window spec not inside the panel date span");
  }

  const Variable surf(Variable::Kind::surf_air_temp);
  const auto pre_means = window_mean(panel, surf, *spec.pre);
  const auto post_means = window_mean(panel, surf, spec.post);

  GainDataset out;
  out.predictor_names = names_of(predictor_vars);
  for (const CellId cell : panel.cells()) {
    const auto pre_it = pre_means.find(cell);
    const auto post_it = post_means.find(cell);
    const auto predictors =
        lag_predictors(panel, cell, spec.predictor_lag, predictor_vars);
    if (pre_it == pre_means.end() || !pre_it->second ||
        post_it == post_means.end() || !post_it->second || !predictors) {
      ++out.n_cells_dropped;
      continue;
    }
    GainRow row;
    row.cell = cell;
    row.pre_mean = *pre_it->second;
    row.post_mean = *post_it->second;
    row.gain = row.post_mean - row.pre_mean;
    row.predictors = *predictors;
    out.rows.push_back(std::move(row));
  }
  if (out.rows.empty()) {
    throw NoCompleteRowsError("no cell has complete pre, post, and lag data");
  }
  return out;
}

LabeledDataset build_crossover_classification(
    const std::vector<Scenario>& scenarios,
    const std::vector<Variable>& predictor_vars) {
  if (scenarios.size() < 2) {
    throw LabelImbalanceError("a crossover stack needs at least two scenarios");
  }
  reject_surf_air_temp(predictor_vars);
  bool has_event = false, has_non_event = false;
  for (const auto& s : scenarios) {
    if (s.label != 0 && s.label != 1) {
      throw InvalidArgumentError("scenario label must be 0 or 1");
    }
    (s.label == 1 ? has_event : has_non_event) = true;
  }
  if (!has_event || !has_non_event) {
    throw LabelImbalanceError("stack must contain both an event and a non-event scenario");
  }

  LabeledDataset out;
  out.predictor_names = names_of(predictor_vars);
  for (const auto& s : scenarios) {
    validate(s.spec);  // pre windows are accepted and ignored
    if (!s.panel->date_span().contains(s.spec.predictor_lag)) {
      throw WindowOutOfSpanError("scenario '" + s.tag +
                                 "': lag date outside the panel date span");
    }
    for (const CellId cell : s.panel->cells()) {
      const auto predictors =
          lag_predictors(*s.panel, cell, s.spec.predictor_lag, predictor_vars);
      if (!predictors) {
        ++out.n_cells_dropped;
        continue;
      }
      out.rows.push_back({cell, s.tag, s.label, *predictors});
    }
  }
  if (out.rows.empty()) {
    throw NoCompleteRowsError("no scenario contributed a complete row");
  }
  return out;
}

GainSummary gain_summary(const GainDataset& g, double bin_width) {
  if (g.rows.empty()) throw EmptyDatasetError("gain_summary of an empty dataset");
  if (!(bin_width > 0)) throw InvalidArgumentError("bin_width must be positive");

  GainSummary s;
  s.n = g.rows.size();
  s.bin_width = bin_width;
  double sum = 0;
  double lo = g.rows.front().gain, hi = lo;
  for (const auto& row : g.rows) {
    sum += row.gain;
    if (row.gain < 0) ++s.n_negative;
    lo = std::min(lo, row.gain);
    hi = std::max(hi, row.gain);
  }
  s.mean = sum / static_cast<double>(s.n);

  const auto bin_index = [bin_width](double v) {
    return static_cast<long long>(std::floor(v / bin_width));
  };
  const long long first_bin = bin_index(lo);
  const long long last_bin = bin_index(hi);
  s.histogram.resize(static_cast<std::size_t>(last_bin - first_bin + 1));
  for (std::size_t i = 0; i < s.histogram.size(); ++i) {
    const double edge = static_cast<double>(first_bin + (long long)i);
    s.histogram[i].lower = edge * bin_width;
    s.histogram[i].upper = (edge + 1.0) * bin_width;
  }
  for (const auto& row : g.rows) {
    ++s.histogram[static_cast<std::size_t>(bin_index(row.gain) - first_bin)].count;
  }
  return s;
}

namespace {

void write_design_header(std::ofstream& out,
                         const std::vector<std::string>& predictor_names) {
  out << "cell_lat,cell_lon,scenario,label_or_gain";
  for (const auto& name : predictor_names) out << ',' << name;
  out << '\n';
}

struct ParsedDesign {
  std::vector<std::string> predictor_names;
  std::vector<LabeledRow> rows;        // label_or_gain carried via value below
  std::vector<double> values;
};

ParsedDesign read_design(const std::string& path) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw SchemaError("empty design file: " + path);
  const auto header = csv::split(lines[0]);
  if (header.size() < 5 || header[0] != "cell_lat" || header[1] != "cell_lon" ||
      header[2] != "scenario" || header[3] != "label_or_gain") {
    throw SchemaError("design header mismatch in " + path);
  }
  ParsedDesign parsed;
  parsed.predictor_names.assign(header.begin() + 4, header.end());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = csv::split(lines[i]);
    const std::string ctx = path + ":" + std::to_string(i + 1);
    if (fields.size() != header.size()) {
      throw SchemaError("column count mismatch in " + ctx);
    }
    LabeledRow row;
    row.cell.lat_index = csv::parse_int(fields[0], ctx);
    row.cell.lon_index = csv::parse_int(fields[1], ctx);
    row.scenario = fields[2];
    parsed.values.push_back(csv::parse_double(fields[3], ctx));
    row.predictors.reserve(parsed.predictor_names.size());
    for (std::size_t j = 4; j < fields.size(); ++j) {
      row.predictors.push_back(csv::parse_double(fields[j], ctx));
    }
    parsed.rows.push_back(std::move(row));
  }
  return parsed;
}

}  // namespace

void write_csv(const GainDataset& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write design file: " + path);
  write_design_header(out, g.predictor_names);
  for (const auto& row : g.rows) {
    out << row.cell.lat_index << ',' << row.cell.lon_index << ",,"
        << csv::format(row.gain);
    for (const double v : row.predictors) out << ',' << csv::format(v);
    out << '\n';
  }
}

void write_csv(const LabeledDataset& l, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write design file: " + path);
  write_design_header(out, l.predictor_names);
  for (const auto& row : l.rows) {
    out << row.cell.lat_index << ',' << row.cell.lon_index << ','
        << row.scenario << ',' << row.label;
    for (const double v : row.predictors) out << ',' << csv::format(v);
    out << '\n';
  }
}

GainDataset read_gain_csv(const std::string& path) {
  auto parsed = read_design(path);
  GainDataset out;
  out.predictor_names = std::move(parsed.predictor_names);
  out.rows.reserve(parsed.rows.size());
  for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
    GainRow row;
    row.cell = parsed.rows[i].cell;
    row.pre_mean = 0.0;
    row.post_mean = parsed.values[i];  // serialized designs carry gain only
    row.gain = parsed.values[i];
    row.predictors = std::move(parsed.rows[i].predictors);
    out.rows.push_back(std::move(row));
  }
  return out;
}

LabeledDataset read_labeled_csv(const std::string& path) {
  auto parsed = read_design(path);
  LabeledDataset out;
  out.predictor_names = std::move(parsed.predictor_names);
  out.rows.reserve(parsed.rows.size());
  for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
    const double v = parsed.values[i];
    if (v != 0.0 && v != 1.0) {
      throw SchemaError("label must be 0 or 1 in " + path);
    }
    auto& row = parsed.rows[i];
    row.label = static_cast<int>(v);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace heatwave
