#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatwave/forest.hpp"

#include "json.hpp"

namespace heatwave {

struct ImportanceEntry {
  std::string predictor;
  double importance = 0;
  double mc_standard_error = 0;  // over the shuffle repeats
};

struct ImportanceReport {
  std::vector<ImportanceEntry> entries;  // sorted descending by importance
  // pct_inc_mse: percent increase in OOB MSE (regression).
  // mean_decrease_accuracy: percentage-point drop in OOB accuracy averaged
  // over the two outcome classes (classification).
  std::string metric;
  std::size_t n_repeats = 0;
  std::uint64_t seed = 0;

  nlohmann::ordered_json to_json() const;
};

enum class PdpMode { mean_fixed, average_over_data };

struct PdpProfile {
  std::string predictor;
  std::vector<double> grid;      // strictly increasing quantile grid
  std::vector<double> response;  // probability of class 1, or fitted value
  PdpMode mode = PdpMode::mean_fixed;

  nlohmann::ordered_json to_json() const;
  void write_csv(const std::string& path) const;  // value,response
};

struct ConfusionReport {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double error_rate = 0;
  double fpr = 0;  // fp / (fp + tn)
  double fnr = 0;  // fn / (fn + tp)
  std::optional<double> cost_ratio_fp_to_fn;  // undefined when fn == 0

  std::size_t n() const { return tp + fp + fn + tn; }
  nlohmann::ordered_json to_json() const;
};

// Shuffles one predictor column at a time (others fixed), rescoring the
// out-of-bag metric on the training data; averaged over n_repeats shuffles.
ImportanceReport permutation_importance(const Forest& forest,
                                        const TrainingData& data,
                                        std::size_t n_repeats,
                                        std::uint64_t seed);
ImportanceReport permutation_importance(const Forest& forest,
                                        const GainDataset& data,
                                        std::size_t n_repeats, std::uint64_t seed);
ImportanceReport permutation_importance(const Forest& forest,
                                        const LabeledDataset& data,
                                        std::size_t n_repeats, std::uint64_t seed);

// Fitted response over an n_grid quantile grid of the predictor.
// mean_fixed pins every other predictor at its data mean; average_over_data
// averages predictions over all rows with the predictor set to the grid value.
PdpProfile partial_dependence(const Forest& forest, const TrainingData& data,
                              const std::string& predictor, std::size_t n_grid,
                              PdpMode mode = PdpMode::mean_fixed);
PdpProfile partial_dependence(const Forest& forest, const GainDataset& data,
                              const std::string& predictor, std::size_t n_grid,
                              PdpMode mode = PdpMode::mean_fixed);
PdpProfile partial_dependence(const Forest& forest, const LabeledDataset& data,
                              const std::string& predictor, std::size_t n_grid,
                              PdpMode mode = PdpMode::mean_fixed);

ConfusionReport confusion(const std::vector<int>& predictions,
                          const std::vector<int>& labels);

}  // namespace heatwave
