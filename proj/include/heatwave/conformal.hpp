#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "heatwave/forest.hpp"

#include "json.hpp"

namespace heatwave {

// Split-sample nested conformal predictor for a binary classifier. The
// nonconformity score is 1 - p_hat(true label); prediction sets are the
// sub-level sets of the score at the calibrated threshold, so they are
// nested as alpha decreases.
struct ConformalPredictor {
  double alpha = 0;
  std::vector<double> calibration_scores;  // sorted ascending
  double threshold = 0;  // +infinity when ceil((n+1)(1-alpha)) > n
  std::string score_kind = "one_minus_prob";
  std::uint64_t forest_ref = 0;  // fingerprint of the paired classifier

  nlohmann::ordered_json to_json() const;
  static ConformalPredictor from_json(const nlohmann::json& j);
};

// The ceil((n_cal+1)(1-alpha))-th smallest score, or +infinity when that
// rank exceeds n_cal. Scores need not be pre-sorted.
double conformal_threshold(std::vector<double> scores, double alpha);

struct PredictionSet {
  std::array<bool, 2> members{false, false};
  std::array<double, 2> scores{0, 0};  // per-class nonconformity
  double alpha = 0;

  std::size_t size() const { return (members[0] ? 1u : 0u) + (members[1] ? 1u : 0u); }
  bool empty() const { return size() == 0; }
};

struct SplitOutcome {
  Forest forest;
  ConformalPredictor predictor;
  std::vector<std::size_t> train_rows;        // indices into the input data
  std::vector<std::size_t> calibration_rows;
};

// Random row split (seeded), classifier fit on the training part, scores and
// threshold from the calibration part. Re-draws the split when either part
// misses a class, up to a retry limit.
SplitOutcome split_train_calibrate(const LabeledDataset& data,
                                   double split_fraction,
                                   const ForestParams& params, double alpha,
                                   std::uint64_t seed, int n_threads = 1);

PredictionSet predict_set(const ConformalPredictor& cp, const Forest& forest,
                          std::span<const double> x);

// (coverage fraction, mean set size) over labeled test rows.
std::pair<double, double> empirical_coverage(const ConformalPredictor& cp,
                                             const Forest& forest,
                                             const LabeledDataset& test);

}  // namespace heatwave
