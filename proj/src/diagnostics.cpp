#include "heatwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "heatwave/csv.hpp"
#include "heatwave/rng.hpp"

namespace heatwave {

namespace {

void check_fingerprint(const Forest& forest, const TrainingData& data) {
  if (data_fingerprint(data) != forest.data_fingerprint()) {
    throw FingerprintMismatchError(
        "diagnostics requested for data the forest was not fit on");
  }
}

// OOB accuracy averaged over the two outcome classes, in [0, 1].
double balanced_accuracy(const OobReport& r) {
  const double acc1 = (r.tp + r.fn) > 0 ? double(r.tp) / (r.tp + r.fn) : 0.0;
  const double acc0 = (r.tn + r.fp) > 0 ? double(r.tn) / (r.tn + r.fp) : 0.0;
  return (acc0 + acc1) / 2.0;
}

}  // namespace

ImportanceReport permutation_importance(const Forest& forest,
                                        const TrainingData& data,
                                        std::size_t n_repeats,
                                        std::uint64_t seed) {
  check_fingerprint(forest, data);
  if (n_repeats < 1) throw InvalidArgumentError("n_repeats must be >= 1");

  const bool regression = forest.task() == Task::regression;
  const OobReport base = detail::oob_report_unchecked(forest, data);
  const double base_metric = regression ? base.oob_mse : balanced_accuracy(base);

  ImportanceReport report;
  report.metric = regression ? "pct_inc_mse" : "mean_decrease_accuracy";
  report.n_repeats = n_repeats;
  report.seed = seed;

  const std::size_t p = data.n_predictors();
  std::vector<std::vector<double>> columns = data.columns;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> samples;
    samples.reserve(n_repeats);
    for (std::size_t r = 0; r < n_repeats; ++r) {
      Rng rng = Rng::stream(seed, j * 1000003ULL + r);
      std::vector<double> shuffled = data.columns[j];
      rng.shuffle(shuffled);
      columns[j] = std::move(shuffled);
      double value;
      if (regression) {
        const auto preds = detail::oob_regression_predictions(forest, columns);
        double mse = 0;
        std::size_t scored = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
          if (std::isnan(preds[i])) continue;
          const double e = preds[i] - data.response[i];
          mse += e * e;
          ++scored;
        }
        mse = scored > 0 ? mse / scored : 0.0;
        value = base_metric > 0 ? 100.0 * (mse - base_metric) / base_metric : 0.0;
      } else {
        const auto votes = detail::oob_classification_votes(forest, columns);
        std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
        for (std::size_t i = 0; i < votes.size(); ++i) {
          if (votes[i] < 0) continue;
          const int truth = static_cast<int>(data.response[i]);
          if (truth == 1) (votes[i] == 1 ? tp : fn) += 1;
          else (votes[i] == 1 ? fp : tn) += 1;
        }
        const double acc1 = (tp + fn) > 0 ? double(tp) / (tp + fn) : 0.0;
        const double acc0 = (tn + fp) > 0 ? double(tn) / (tn + fp) : 0.0;
        value = 100.0 * (base_metric - (acc0 + acc1) / 2.0);
      }
      samples.push_back(value);
    }
    columns[j] = data.columns[j];

    double mean = 0;
    for (const double v : samples) mean += v;
    mean /= samples.size();
    double se = 0;
    if (samples.size() > 1) {
      double ss = 0;
      for (const double v : samples) ss += (v - mean) * (v - mean);
      se = std::sqrt(ss / (samples.size() - 1) / samples.size());
    }
    report.entries.push_back({data.predictor_names[j], mean, se});
  }

  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const ImportanceEntry& a, const ImportanceEntry& b) {
                     return a.importance > b.importance;
                   });
  return report;
}

ImportanceReport permutation_importance(const Forest& forest,
                                        const GainDataset& data,
                                        std::size_t n_repeats, std::uint64_t seed) {
  return permutation_importance(forest, TrainingData::from(data), n_repeats, seed);
}

ImportanceReport permutation_importance(const Forest& forest,
                                        const LabeledDataset& data,
                                        std::size_t n_repeats, std::uint64_t seed) {
  return permutation_importance(forest, TrainingData::from(data), n_repeats, seed);
}

namespace {

// Type-7 (linear interpolation) quantile of a sorted column.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

PdpProfile partial_dependence(const Forest& forest, const TrainingData& data,
                              const std::string& predictor, std::size_t n_grid,
                              PdpMode mode) {
  if (n_grid < 2) throw InvalidArgumentError("n_grid must be >= 2");
  const auto& names = forest.predictor_names();
  const auto it = std::find(names.begin(), names.end(), predictor);
  if (it == names.end()) {
    throw UnknownPredictorError("predictor '" + predictor + "' not in the forest");
  }
  const std::size_t j = static_cast<std::size_t>(it - names.begin());
  if (data.n_predictors() != names.size()) {
    throw UnknownPredictorError("data does not match the forest predictors");
  }

  std::vector<double> sorted = data.columns[j];
  std::sort(sorted.begin(), sorted.end());

  PdpProfile profile;
  profile.predictor = predictor;
  profile.mode = mode;
  for (std::size_t g = 0; g < n_grid; ++g) {
    const double q = static_cast<double>(g) / static_cast<double>(n_grid - 1);
    const double v = quantile_sorted(sorted, q);
    if (profile.grid.empty() || v > profile.grid.back()) profile.grid.push_back(v);
  }

  const std::size_t p = data.n_predictors();
  const std::size_t n = data.n_rows();
  const bool classification = forest.task() == Task::classification;

  if (mode == PdpMode::mean_fixed) {
    std::vector<double> x(p);
    for (std::size_t k = 0; k < p; ++k) {
      double mean = 0;
      for (const double v : data.columns[k]) mean += v;
      x[k] = mean / static_cast<double>(n);
    }
    for (const double g : profile.grid) {
      x[j] = g;
      profile.response.push_back(classification ? forest.predict_proba(x)[1]
                                                : forest.predict_value(x));
    }
  } else {
    std::vector<double> x(p);
    for (const double g : profile.grid) {
      double sum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < p; ++k) x[k] = data.columns[k][i];
        x[j] = g;
        sum += classification ? forest.predict_proba(x)[1] : forest.predict_value(x);
      }
      profile.response.push_back(sum / static_cast<double>(n));
    }
  }
  return profile;
}

PdpProfile partial_dependence(const Forest& forest, const GainDataset& data,
                              const std::string& predictor, std::size_t n_grid,
                              PdpMode mode) {
  return partial_dependence(forest, TrainingData::from(data), predictor, n_grid, mode);
}

PdpProfile partial_dependence(const Forest& forest, const LabeledDataset& data,
                              const std::string& predictor, std::size_t n_grid,
                              PdpMode mode) {
  return partial_dependence(forest, TrainingData::from(data), predictor, n_grid, mode);
}

ConfusionReport confusion(const std::vector<int>& predictions,
                          const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    throw LengthMismatchError("predictions and labels differ in length");
  }
  ConfusionReport r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if ((labels[i] != 0 && labels[i] != 1) ||
        (predictions[i] != 0 && predictions[i] != 1)) {
      throw InvalidArgumentError("labels and predictions must be 0 or 1");
    }
    if (labels[i] == 1) {
      (predictions[i] == 1 ? r.tp : r.fn) += 1;
    } else {
      (predictions[i] == 1 ? r.fp : r.tn) += 1;
    }
  }
  const std::size_t n = r.n();
  r.error_rate = n > 0 ? double(r.fp + r.fn) / n : 0.0;
  r.fpr = (r.fp + r.tn) > 0 ? double(r.fp) / (r.fp + r.tn) : 0.0;
  r.fnr = (r.fn + r.tp) > 0 ? double(r.fn) / (r.fn + r.tp) : 0.0;
  if (r.fn > 0) r.cost_ratio_fp_to_fn = double(r.fp) / double(r.fn);
  return r;
}

nlohmann::ordered_json ImportanceReport::to_json() const {
  nlohmann::ordered_json j;
  j["metric"] = metric;
  j["n_repeats"] = n_repeats;
  j["seed"] = seed;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    arr.push_back({{"predictor", e.predictor},
                   {"importance", e.importance},
                   {"mc_standard_error", e.mc_standard_error}});
  }
  j["entries"] = std::move(arr);
  return j;
}

nlohmann::ordered_json PdpProfile::to_json() const {
  nlohmann::ordered_json j;
  j["predictor"] = predictor;
  j["mode"] = mode == PdpMode::mean_fixed ? "mean_fixed" : "average_over_data";
  j["grid"] = grid;
  j["response"] = response;
  return j;
}

void PdpProfile::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write pdp file: " + path);
  out << "value,response\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << csv::format(grid[i]) << ',' << csv::format(response[i]) << '\n';
  }
}

nlohmann::ordered_json ConfusionReport::to_json() const {
  nlohmann::ordered_json j;
  j["tp"] = tp;
  j["fp"] = fp;
  j["fn"] = fn;
  j["tn"] = tn;
  j["error_rate"] = error_rate;
  j["fpr"] = fpr;
  j["fnr"] = fnr;
  if (cost_ratio_fp_to_fn) {
    j["cost_ratio_fp_to_fn"] = *cost_ratio_fp_to_fn;
  } else {
    j["cost_ratio_fp_to_fn"] = nullptr;
  }
  return j;
}

}  // namespace heatwave
