#include "heatwave/sampling.hpp"

namespace heatwave {

namespace {

void validate_prior(const PriorSpec& prior) {
  if (!(prior.population_prior > 0 && prior.population_prior < 1) ||
      !(prior.sample_prior > 0 && prior.sample_prior < 1)) {
    throw DegeneratePriorError("priors must lie in the open interval (0, 1)");
  }
}

std::vector<int> oob_labels(const Forest& forest, const LabeledDataset& data) {
  const auto data_matrix = TrainingData::from(data);
  return detail::oob_classification_votes(forest, data_matrix.columns);
}

ConfusionReport oob_confusion(const Forest& forest, const LabeledDataset& data) {
  const auto preds = oob_labels(forest, data);
  std::vector<int> kept_preds, kept_labels;
  kept_preds.reserve(preds.size());
  kept_labels.reserve(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0) continue;  // never out-of-bag
    kept_preds.push_back(preds[i]);
    kept_labels.push_back(data.rows[i].label);
  }
  return confusion(kept_preds, kept_labels);
}

}  // namespace

WeightVector manski_lerman_weights(const std::vector<int>& labels,
                                   const PriorSpec& prior) {
  validate_prior(prior);
  bool has0 = false, has1 = false;
  for (const int y : labels) {
    if (y == 1) has1 = true;
    else if (y == 0) has0 = true;
    else throw InvalidArgumentError("labels must be 0 or 1");
  }
  if (!has0 || !has1) {
    throw InvalidArgumentError("labels must contain both classes");
  }

  WeightVector w;
  w.class_weight_1 = prior.population_prior / prior.sample_prior;
  w.class_weight_0 = (1.0 - prior.population_prior) / (1.0 - prior.sample_prior);
  w.weights.reserve(labels.size());
  for (const int y : labels) {
    w.weights.push_back(y == 1 ? w.class_weight_1 : w.class_weight_0);
  }
  return w;
}

PriorSpec scenario_prior(const LabeledDataset& data, const PopulationTarget& target) {
  if (target.days_in_month == 0) {
    throw InvalidArgumentError("days_in_month must be positive");
  }
  if (target.event_days > target.days_in_month) {
    throw InvalidArgumentError("event_days cannot exceed days_in_month");
  }
  if (data.rows.empty()) throw EmptyDatasetError("empty dataset");
  std::size_t ones = 0;
  for (const auto& row : data.rows) ones += row.label == 1 ? 1 : 0;
  PriorSpec prior;
  prior.population_prior =
      double(target.event_days) / double(target.days_in_month);
  prior.sample_prior = double(ones) / double(data.rows.size());
  return prior;
}

WeightedRefitReport weighted_refit_report(const LabeledDataset& data,
                                          const PriorSpec& prior,
                                          const ForestParams& params,
                                          int n_threads) {
  validate_prior(prior);
  std::vector<int> labels;
  labels.reserve(data.rows.size());
  for (const auto& row : data.rows) labels.push_back(row.label);
  const WeightVector w = manski_lerman_weights(labels, prior);

  WeightedRefitReport report;
  const Forest unweighted = Forest::fit(data, params, {}, n_threads);
  report.unweighted = oob_confusion(unweighted, data);
  const Forest weighted = Forest::fit(data, params, w.weights, n_threads);
  report.weighted = oob_confusion(weighted, data);
  report.cost_ratio_before = report.unweighted.cost_ratio_fp_to_fn;
  report.cost_ratio_after = report.weighted.cost_ratio_fp_to_fn;
  const auto implied = [](const ConfusionReport& r) -> std::optional<double> {
    if (r.fp == 0) return std::nullopt;
    return double(r.fn) / double(r.fp);
  };
  report.implied_fp_cost_before = implied(report.unweighted);
  report.implied_fp_cost_after = implied(report.weighted);
  return report;
}

nlohmann::ordered_json PriorSpec::to_json() const {
  return {{"population_prior", population_prior}, {"sample_prior", sample_prior}};
}

nlohmann::ordered_json WeightVector::to_json() const {
  nlohmann::ordered_json j;
  j["class_weight_1"] = class_weight_1;
  j["class_weight_0"] = class_weight_0;
  j["weights"] = weights;
  return j;
}

nlohmann::ordered_json WeightedRefitReport::to_json() const {
  nlohmann::ordered_json j;
  j["unweighted"] = unweighted.to_json();
  j["weighted"] = weighted.to_json();
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j["cost_ratio_before"] = opt(cost_ratio_before);
  j["cost_ratio_after"] = opt(cost_ratio_after);
  j["implied_fp_cost_before"] = opt(implied_fp_cost_before);
  j["implied_fp_cost_after"] = opt(implied_fp_cost_after);
  return j;
}

}  // namespace heatwave
