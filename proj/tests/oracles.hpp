#pragma once

// Independent reference implementations used as test oracles. These
// deliberately recompute everything from scratch (exhaustive candidate
// enumeration, per-candidate recounting) instead of sharing the library's
// sorted prefix scans.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

namespace oracle {

struct Dataset {
  std::vector<std::vector<double>> columns;  // [p][n]
  std::vector<double> y;
  std::vector<double> weights;  // empty = unit
  bool classification = false;

  double weight(std::size_t row) const {
    return weights.empty() ? 1.0 : weights[row];
  }
};

struct Node {
  int var = -1;
  double threshold = 0;
  std::unique_ptr<Node> left, right;
  double leaf_value = 0;
  std::array<double, 2> class_weight{0, 0};
  bool is_leaf() const { return !left; }
};

// Weighted SSE of a row subset, two-pass.
inline double subset_sse(const Dataset& d, const std::vector<std::size_t>& rows) {
  double w = 0, wy = 0;
  for (const auto r : rows) {
    w += d.weight(r);
    wy += d.weight(r) * d.y[r];
  }
  const double mean = wy / w;
  double sse = 0;
  for (const auto r : rows) {
    sse += d.weight(r) * (d.y[r] - mean) * (d.y[r] - mean);
  }
  return sse;
}

// Weighted Gini mass, the standard W - (W0^2 + W1^2) / W identity.
inline double subset_gini(const Dataset& d, const std::vector<std::size_t>& rows) {
  double w0 = 0, w1 = 0;
  for (const auto r : rows) (d.y[r] == 1.0 ? w1 : w0) += d.weight(r);
  const double w = w0 + w1;
  return w - (w0 * w0 + w1 * w1) / w;
}

struct SplitChoice {
  bool found = false;
  int var = -1;
  double threshold = 0;
  double score = std::numeric_limits<double>::infinity();
};

// Exhaustive search over every predictor and every midpoint between adjacent
// distinct values; ties resolve to the lowest predictor index, then the
// lowest threshold (first candidate wins under strict improvement).
inline SplitChoice best_split(const Dataset& d, const std::vector<std::size_t>& rows) {
  SplitChoice best;
  const std::size_t p = d.columns.size();
  for (std::size_t var = 0; var < p; ++var) {
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto r : rows) values.push_back(d.columns[var][r]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double threshold = (values[i] + values[i + 1]) / 2.0;
      std::vector<std::size_t> left, right;
      for (const auto r : rows) {
        (d.columns[var][r] <= threshold ? left : right).push_back(r);
      }
      const double score = d.classification
                               ? subset_gini(d, left) + subset_gini(d, right)
                               : subset_sse(d, left) + subset_sse(d, right);
      if (score < best.score) {
        best.found = true;
        best.var = static_cast<int>(var);
        best.threshold = threshold;
        best.score = score;
      }
    }
  }
  return best;
}

inline std::unique_ptr<Node> build_tree(const Dataset& d,
                                        const std::vector<std::size_t>& rows,
                                        std::size_t min_node_size) {
  auto node = std::make_unique<Node>();
  double w = 0, wy = 0, w0 = 0, w1 = 0;
  bool pure = true;
  for (const auto r : rows) {
    w += d.weight(r);
    wy += d.weight(r) * d.y[r];
    (d.y[r] == 1.0 ? w1 : w0) += d.weight(r);
    if (d.y[r] != d.y[rows.front()]) pure = false;
  }
  node->leaf_value = wy / w;
  node->class_weight = {w0, w1};
  if (rows.size() <= min_node_size || pure) return node;

  const SplitChoice split = best_split(d, rows);
  if (!split.found) return node;

  std::vector<std::size_t> left, right;
  for (const auto r : rows) {
    (d.columns[split.var][r] <= split.threshold ? left : right).push_back(r);
  }
  node->var = split.var;
  node->threshold = split.threshold;
  node->left = build_tree(d, left, min_node_size);
  node->right = build_tree(d, right, min_node_size);
  return node;
}

inline std::unique_ptr<Node> build_tree(const Dataset& d, std::size_t min_node_size) {
  std::vector<std::size_t> rows(d.y.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return build_tree(d, rows, min_node_size);
}

// Split-conformal threshold by linear scan: the smallest score t such that
// at least ceil((n+1)(1-alpha)) calibration scores are <= t, or +infinity.
inline double conformal_threshold(std::vector<double> scores, double alpha) {
  const double needed = std::ceil((double(scores.size()) + 1.0) * (1.0 - alpha));
  if (needed > double(scores.size())) {
    return std::numeric_limits<double>::infinity();
  }
  std::sort(scores.begin(), scores.end());
  for (const double t : scores) {
    std::size_t covered = 0;
    for (const double s : scores) covered += s <= t ? 1 : 0;
    if (double(covered) >= needed) return t;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace oracle
