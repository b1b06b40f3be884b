#include "heatwave/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatwave/rng.hpp"

namespace heatwave {

double conformal_threshold(std::vector<double> scores, double alpha) {
  if (!(alpha > 0 && alpha < 1)) {
    throw InvalidArgumentError("alpha must lie in (0, 1)");
  }
  const std::size_t n = scores.size();
  const double rank = std::ceil((double(n) + 1.0) * (1.0 - alpha));
  if (rank > double(n)) return std::numeric_limits<double>::infinity();
  std::sort(scores.begin(), scores.end());
  return scores[static_cast<std::size_t>(rank) - 1];
}

SplitOutcome split_train_calibrate(const LabeledDataset& data,
                                   double split_fraction,
                                   const ForestParams& params, double alpha,
                                   std::uint64_t seed, int n_threads) {
  if (!(alpha > 0 && alpha < 1)) {
    throw InvalidArgumentError("alpha must lie in (0, 1)");
  }
  if (!(split_fraction > 0 && split_fraction < 1)) {
    throw InvalidArgumentError("split_fraction must lie in (0, 1)");
  }
  const std::size_t n = data.rows.size();
  if (n < 4) throw SplitDegenerateError("too few rows to split");
  const std::size_t n_train = std::min<std::size_t>(
      n - 1,
      std::max<std::size_t>(1, static_cast<std::size_t>(split_fraction * double(n))));

  constexpr int kMaxRetries = 100;
  std::vector<std::size_t> order(n);
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(attempt));
    rng.shuffle(order);

    bool train0 = false, train1 = false, cal0 = false, cal1 = false;
    for (std::size_t i = 0; i < n; ++i) {
      const bool is_train = i < n_train;
      const bool is_one = data.rows[order[i]].label == 1;
      (is_train ? (is_one ? train1 : train0) : (is_one ? cal1 : cal0)) = true;
    }
    if (!(train0 && train1 && cal0 && cal1)) continue;

    SplitOutcome out;
    out.train_rows.assign(order.begin(), order.begin() + n_train);
    out.calibration_rows.assign(order.begin() + n_train, order.end());

    LabeledDataset train;
    train.predictor_names = data.predictor_names;
    for (const std::size_t i : out.train_rows) train.rows.push_back(data.rows[i]);
    out.forest = Forest::fit(train, params, {}, n_threads);

    out.predictor.alpha = alpha;
    out.predictor.forest_ref = out.forest.fingerprint();
    for (const std::size_t i : out.calibration_rows) {
      const auto& row = data.rows[i];
      const auto proba = out.forest.predict_proba(row.predictors);
      out.predictor.calibration_scores.push_back(1.0 - proba[row.label]);
    }
    std::sort(out.predictor.calibration_scores.begin(),
              out.predictor.calibration_scores.end());
    out.predictor.threshold =
        conformal_threshold(out.predictor.calibration_scores, alpha);
    return out;
  }
  throw SplitDegenerateError(
      "could not draw a split with both classes on both sides");
}

PredictionSet predict_set(const ConformalPredictor& cp, const Forest& forest,
                          std::span<const double> x) {
  if (forest.fingerprint() != cp.forest_ref) {
    throw FingerprintMismatchError(
        "prediction set requested with a different forest than calibrated");
  }
  const auto proba = forest.predict_proba(x);
  PredictionSet set;
  set.alpha = cp.alpha;
  set.scores = {1.0 - proba[0], 1.0 - proba[1]};
  set.members = {set.scores[0] <= cp.threshold, set.scores[1] <= cp.threshold};
  return set;
}

std::pair<double, double> empirical_coverage(const ConformalPredictor& cp,
                                             const Forest& forest,
                                             const LabeledDataset& test) {
  if (test.rows.empty()) throw EmptyDatasetError("empty test set");
  if (test.predictor_names != forest.predictor_names()) {
    throw MissingPredictorError("test predictors do not match the forest");
  }
  std::size_t covered = 0, total_size = 0;
  for (const auto& row : test.rows) {
    const auto set = predict_set(cp, forest, row.predictors);
    if (set.members[row.label]) ++covered;
    total_size += set.size();
  }
  const double n = double(test.rows.size());
  return {covered / n, total_size / n};
}

nlohmann::ordered_json ConformalPredictor::to_json() const {
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["score_kind"] = score_kind;
  j["calibration_scores"] = calibration_scores;
  if (std::isinf(threshold)) {
    j["threshold"] = "inf";
  } else {
    j["threshold"] = threshold;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(forest_ref));
  j["forest_ref"] = buf;
  return j;
}

ConformalPredictor ConformalPredictor::from_json(const nlohmann::json& j) {
  ConformalPredictor cp;
  cp.alpha = j.at("alpha").get<double>();
  cp.score_kind = j.value("score_kind", std::string("one_minus_prob"));
  cp.calibration_scores = j.at("calibration_scores").get<std::vector<double>>();
  if (j.at("threshold").is_string()) {
    cp.threshold = std::numeric_limits<double>::infinity();
  } else {
    cp.threshold = j.at("threshold").get<double>();
  }
  cp.forest_ref = std::strtoull(j.at("forest_ref").get<std::string>().c_str(),
                                nullptr, 16);
  return cp;
}

}  // namespace heatwave
