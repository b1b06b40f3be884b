#pragma once

#include <optional>
#include <vector>

#include "heatwave/diagnostics.hpp"
#include "heatwave/forest.hpp"

#include "json.hpp"

namespace heatwave {

// Response prior in the target population versus in the curated (balance-
// forced) crossover data.
struct PriorSpec {
  double population_prior = 0;  // P(label = 1), in (0, 1)
  double sample_prior = 0;      // P*(label = 1), in (0, 1)

  nlohmann::ordered_json to_json() const;
};

struct WeightVector {
  std::vector<double> weights;  // per row; equal labels share a weight
  double class_weight_1 = 1;    // P(1) / P*(1)
  double class_weight_0 = 1;    // P(0) / P*(0)

  nlohmann::ordered_json to_json() const;
};

// Manski-Lerman endogenous-sampling weights restoring the population prior.
WeightVector manski_lerman_weights(const std::vector<int>& labels,
                                   const PriorSpec& prior);

struct PopulationTarget {
  std::size_t days_in_month = 0;
  std::size_t event_days = 0;
};

// population_prior = event_days / days_in_month; sample_prior = fraction of
// label-1 rows in the curated data.
PriorSpec scenario_prior(const LabeledDataset& data, const PopulationTarget& target);

struct WeightedRefitReport {
  ConfusionReport unweighted;  // out-of-bag, unit weights
  ConfusionReport weighted;    // out-of-bag, Manski-Lerman weights
  // Count ratios fp/fn, copied from the confusion reports.
  std::optional<double> cost_ratio_before;
  std::optional<double> cost_ratio_after;
  // Implied relative cost of a false positive, read off the counts the
  // tree-ensemble way: a classifier showing r false negatives per false
  // positive behaves as if a false positive costs r false negatives.
  // Undefined when fp = 0.
  std::optional<double> implied_fp_cost_before;
  std::optional<double> implied_fp_cost_after;

  nlohmann::ordered_json to_json() const;
};

// Fits the classifier twice (unit weights, then Manski-Lerman weights) and
// reports both out-of-bag confusion summaries and the cost-ratio shift.
WeightedRefitReport weighted_refit_report(const LabeledDataset& data,
                                          const PriorSpec& prior,
                                          const ForestParams& params,
                                          int n_threads = 1);

}  // namespace heatwave
