#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "heatwave/design.hpp"

#include "json.hpp"

namespace heatwave {

enum class Task { regression, classification };

std::string to_string(Task task);
Task task_from_string(const std::string& s);

struct ForestParams {
  std::size_t n_trees = 500;
  // 0 = default: floor(p/3) for regression, floor(sqrt(p)) for
  // classification, never below 1.
  std::size_t mtry = 0;
  // 0 = default: 5 for regression, 1 for classification. A node with at most
  // this many sample rows becomes a leaf.
  std::size_t min_node_size = 0;
  std::uint64_t seed = 0;
  // Per-tree sample of n rows with replacement; when case weights are given,
  // rows are drawn with probability proportional to weight.
  bool bootstrap = true;

  std::size_t resolved_mtry(Task task, std::size_t p) const;
  std::size_t resolved_min_node_size(Task task) const;
};

// Column-major training matrix shared by the fit entry points and the
// diagnostics that rescore permuted copies.
struct TrainingData {
  Task task = Task::regression;
  std::vector<std::string> predictor_names;
  std::vector<std::vector<double>> columns;  // [p][n]
  std::vector<double> response;              // gain, or 0/1 labels

  std::size_t n_rows() const { return response.size(); }
  std::size_t n_predictors() const { return columns.size(); }

  static TrainingData from(const GainDataset& data);
  static TrainingData from(const LabeledDataset& data);
};

// Stable 64-bit content hash of (task, names, response, columns). Case
// weights and fit parameters are folded into the full forest fingerprint
// only, so out-of-bag reports can re-verify the data alone.
std::uint64_t data_fingerprint(const TrainingData& data);

struct TreeNode {
  int split_var = -1;  // leaf iff left < 0
  double threshold = 0;
  int left = -1;
  int right = -1;
  double leaf_value = 0;                     // regression: weighted mean of y
  std::array<double, 2> class_weight{0, 0};  // classification: weighted counts
  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> x) const;
  double predict_value(std::span<const double> x) const;
  int vote(std::span<const double> x) const;  // ties go to class 0
};

struct OobReport {
  Task task = Task::regression;
  std::size_t n_rows = 0;
  std::size_t n_skipped = 0;  // rows in no tree's out-of-bag sample
  // regression
  double oob_mse = 0;
  double variance_explained = 0;  // 1 - oob_mse / population variance of y
  // classification
  double error_rate = 0;
  double false_positive_rate = 0;
  double false_negative_rate = 0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

class Forest {
public:
  Forest() = default;  // empty; fit, load, or from_parts produce usable ones

  static Forest fit(const GainDataset& data, const ForestParams& params,
                    const std::vector<double>& weights = {}, int n_threads = 1);
  static Forest fit(const LabeledDataset& data, const ForestParams& params,
                    const std::vector<double>& weights = {}, int n_threads = 1);
  static Forest fit(const TrainingData& data, const ForestParams& params,
                    const std::vector<double>& weights = {}, int n_threads = 1);

  Task task() const { return task_; }
  const std::vector<std::string>& predictor_names() const { return names_; }
  const std::vector<Tree>& trees() const { return trees_; }
  // Sorted row ids excluded from each tree's bootstrap sample.
  const std::vector<std::vector<std::uint32_t>>& oob_membership() const {
    return oob_;
  }
  const ForestParams& params() const { return params_; }
  std::size_t n_training_rows() const { return n_rows_; }
  std::uint64_t data_fingerprint() const { return data_fingerprint_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  double predict_value(std::span<const double> x) const;
  // {P(class 0), P(class 1)} as tree-vote fractions; sums to 1 exactly.
  std::array<double, 2> predict_proba(std::span<const double> x) const;

  // Named-vector forms; throw MissingPredictorError when a predictor is
  // absent from x. Extra names are ignored.
  double predict_value(const std::map<std::string, double>& x) const;
  std::array<double, 2> predict_proba(const std::map<std::string, double>& x) const;

  nlohmann::ordered_json to_json() const;
  static Forest from_json(const nlohmann::json& j);
  static Forest load(const std::string& path);
  void save(const std::string& path) const;

  // Assembles a forest from parts (deserialization and hand-built test
  // landscapes). Fingerprints default to zero, which matches no data.
  static Forest from_parts(Task task, std::vector<std::string> names,
                           std::vector<Tree> trees,
                           std::vector<std::vector<std::uint32_t>> oob = {},
                           ForestParams params = {}, std::size_t n_rows = 0,
                           std::uint64_t data_fp = 0, std::uint64_t full_fp = 0);

private:
  std::vector<double> order_by_names(const std::map<std::string, double>& x) const;

  Task task_ = Task::regression;
  std::vector<std::string> names_;
  std::vector<Tree> trees_;
  std::vector<std::vector<std::uint32_t>> oob_;
  ForestParams params_;
  std::size_t n_rows_ = 0;
  std::uint64_t data_fingerprint_ = 0;
  std::uint64_t fingerprint_ = 0;
};

// Each row scored only by trees whose bootstrap excluded it; the forest must
// have been fit on exactly this data (fingerprint match, unit weights).
OobReport oob_report(const Forest& forest, const GainDataset& data);
OobReport oob_report(const Forest& forest, const LabeledDataset& data);
OobReport oob_report(const Forest& forest, const TrainingData& data);

// Internals shared with the diagnostics module.
namespace detail {

// Per-row OOB aggregate without any fingerprint check. Regression: mean tree
// prediction; rows with no OOB tree get NaN. Classification: majority vote
// (ties to class 0); rows with no OOB tree get -1.
std::vector<double> oob_regression_predictions(
    const Forest& forest, const std::vector<std::vector<double>>& columns);
std::vector<int> oob_classification_votes(
    const Forest& forest, const std::vector<std::vector<double>>& columns);

OobReport oob_report_unchecked(const Forest& forest, const TrainingData& data);

}  // namespace detail

}  // namespace heatwave
