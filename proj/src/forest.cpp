#include "heatwave/forest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "heatwave/rng.hpp"

namespace heatwave {

std::string to_string(Task task) {
  return task == Task::regression ? "regression" : "classification";
}

Task task_from_string(const std::string& s) {
  if (s == "regression") return Task::regression;
  if (s == "classification") return Task::classification;
  throw InvalidArgumentError("unknown task '" + s + "'");
}

std::size_t ForestParams::resolved_mtry(Task task, std::size_t p) const {
  if (mtry > 0) {
    if (mtry > p) throw InvalidArgumentError("mtry exceeds predictor count");
    return mtry;
  }
  const std::size_t def = task == Task::regression
                              ? p / 3
                              : static_cast<std::size_t>(std::sqrt(double(p)));
  return std::max<std::size_t>(1, std::min(def, p));
}

std::size_t ForestParams::resolved_min_node_size(Task task) const {
  if (min_node_size > 0) return min_node_size;
  return task == Task::regression ? 5 : 1;
}

TrainingData TrainingData::from(const GainDataset& data) {
  TrainingData out;
  out.task = Task::regression;
  out.predictor_names = data.predictor_names;
  const std::size_t p = data.predictor_names.size();
  out.columns.assign(p, {});
  for (auto& col : out.columns) col.reserve(data.rows.size());
  out.response.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    out.response.push_back(row.gain);
    for (std::size_t j = 0; j < p; ++j) out.columns[j].push_back(row.predictors[j]);
  }
  return out;
}

TrainingData TrainingData::from(const LabeledDataset& data) {
  TrainingData out;
  out.task = Task::classification;
  out.predictor_names = data.predictor_names;
  const std::size_t p = data.predictor_names.size();
  out.columns.assign(p, {});
  for (auto& col : out.columns) col.reserve(data.rows.size());
  out.response.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    out.response.push_back(static_cast<double>(row.label));
    for (std::size_t j = 0; j < p; ++j) out.columns[j].push_back(row.predictors[j]);
  }
  return out;
}

namespace {

// FNV-1a over a canonical byte stream.
class Hasher {
public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    for (const char c : s) byte(static_cast<unsigned char>(c));
  }
  std::uint64_t value() const { return h_; }

private:
  void byte(unsigned char b) {
    h_ ^= b;
    h_ *= 0x100000001B3ULL;
  }
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

}  // namespace

std::uint64_t data_fingerprint(const TrainingData& data) {
  Hasher h;
  h.u64(data.task == Task::regression ? 1 : 2);
  h.u64(data.n_predictors());
  h.u64(data.n_rows());
  for (const auto& name : data.predictor_names) h.str(name);
  for (const double y : data.response) h.f64(y);
  for (const auto& col : data.columns)
    for (const double v : col) h.f64(v);
  return h.value();
}

namespace {

std::uint64_t full_fingerprint(std::uint64_t data_fp, const ForestParams& params,
                               const std::vector<double>& weights) {
  Hasher h;
  h.u64(data_fp);
  h.u64(params.n_trees);
  h.u64(params.mtry);
  h.u64(params.min_node_size);
  h.u64(params.seed);
  h.u64(params.bootstrap ? 1 : 0);
  h.u64(weights.size());
  for (const double w : weights) h.f64(w);
  return h.value();
}

struct NodeStats {
  double w = 0;    // total weight
  double wy = 0;   // weighted response sum (regression)
  double wyy = 0;  // weighted response square sum (regression)
  double w0 = 0;   // weighted class counts (classification)
  double w1 = 0;
};

// Kahan-Babuska-Neumaier compensated sum. The split scan accumulates child
// stats in per-variable sort order, but the same row partition can be reached
// through different variables; compensation makes those sums agree to far
// below one ulp, so mathematically tied candidates compare equal and the
// documented tie rule decides.
struct CompensatedSum {
  double hi = 0, lo = 0;

  void add(double x) {
    const double s = hi + x;
    lo += std::abs(hi) >= std::abs(x) ? (hi - s) + x : (x - s) + hi;
    hi = s;
  }
  double value() const { return hi + lo; }
};

struct ScanStats {
  CompensatedSum w, wy, wyy;  // regression
  CompensatedSum w0, w1;      // classification
};

// Total child impurity: weighted SSE for regression, weighted Gini mass for
// classification, both from exact-input expressions.
double regression_impurity(const ScanStats& s) {
  const double w = s.w.value();
  const double wy = s.wy.value();
  return s.wyy.value() - wy * wy / w;
}

double gini_impurity(const ScanStats& s) {
  const double w0 = s.w0.value();
  const double w1 = s.w1.value();
  return (w0 + w1) - (w0 * w0 + w1 * w1) / (w0 + w1);
}

class TreeGrower {
public:
  TreeGrower(const TrainingData& data, const std::vector<double>& weights,
             std::size_t mtry, std::size_t min_node_size, Rng& rng)
      : data_(data), weights_(weights), mtry_(mtry),
        min_node_size_(min_node_size), rng_(rng) {}

  Tree grow(std::vector<std::uint32_t> sample) {
    sample_ = std::move(sample);
    scratch_.resize(sample_.size());
    nodes_.clear();
    grow_node(0, sample_.size());
    Tree t;
    t.nodes = std::move(nodes_);
    return t;
  }

private:
  double weight(std::uint32_t row) const {
    return weights_.empty() ? 1.0 : weights_[row];
  }

  NodeStats stats_over(std::size_t begin, std::size_t end, bool& pure) const {
    NodeStats s;
    const double first_y = data_.response[sample_[begin]];
    pure = true;
    for (std::size_t k = begin; k < end; ++k) {
      const std::uint32_t row = sample_[k];
      const double w = weight(row);
      const double y = data_.response[row];
      if (y != first_y) pure = false;
      if (data_.task == Task::regression) {
        s.w += w;
        s.wy += w * y;
        s.wyy += w * y * y;
      } else {
        (y == 1.0 ? s.w1 : s.w0) += w;
      }
    }
    return s;
  }

  struct BestSplit {
    bool found = false;
    int var = -1;
    double threshold = 0;
    double score = std::numeric_limits<double>::infinity();
  };

  BestSplit find_split(std::size_t begin, std::size_t end) {
    BestSplit best;
    const auto vars =
        rng_.sample_without_replacement(data_.n_predictors(), mtry_);
    const std::size_t m = end - begin;
    std::vector<std::pair<double, std::uint32_t>> entries;
    entries.reserve(m);
    // Right-child stats come from suffix accumulation rather than totals
    // minus prefix: a pure singleton child then scores an exact zero, so
    // mathematically tied candidates compare equal and the tie rule below
    // (ascending variable order, strict improvement -> lowest predictor
    // index, then lowest threshold) actually applies.
    std::vector<ScanStats> suffix(m + 1);
    const auto accumulate = [this](ScanStats& s, std::uint32_t row) {
      const double w = weight(row);
      const double y = data_.response[row];
      if (data_.task == Task::regression) {
        s.w.add(w);
        s.wy.add(w * y);
        s.wyy.add(w * y * y);
      } else {
        (y == 1.0 ? s.w1 : s.w0).add(w);
      }
    };
    for (const std::size_t j : vars) {
      const auto& col = data_.columns[j];
      entries.clear();
      for (std::size_t k = begin; k < end; ++k) {
        entries.emplace_back(col[sample_[k]], static_cast<std::uint32_t>(k));
      }
      std::sort(entries.begin(), entries.end());

      suffix[m] = ScanStats{};
      for (std::size_t i = m; i-- > 0;) {
        suffix[i] = suffix[i + 1];
        accumulate(suffix[i], sample_[entries[i].second]);
      }

      ScanStats left;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        accumulate(left, sample_[entries[i].second]);
        if (entries[i].first == entries[i + 1].first) continue;
        const double score =
            data_.task == Task::regression
                ? regression_impurity(left) + regression_impurity(suffix[i + 1])
                : gini_impurity(left) + gini_impurity(suffix[i + 1]);
        if (score < best.score) {
          best.found = true;
          best.var = static_cast<int>(j);
          best.threshold = (entries[i].first + entries[i + 1].first) / 2.0;
          best.score = score;
        }
      }
    }
    return best;
  }

  int grow_node(std::size_t begin, std::size_t end) {
    const int idx = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    bool pure = false;
    const NodeStats s = stats_over(begin, end, pure);
    if (data_.task == Task::regression) {
      nodes_[idx].leaf_value = s.wy / s.w;
    } else {
      nodes_[idx].class_weight = {s.w0, s.w1};
    }
    if (end - begin <= min_node_size_ || pure) return idx;

    const BestSplit best = find_split(begin, end);
    if (!best.found) return idx;  // all candidate predictors constant here

    // Stable partition keeps accumulation order deterministic.
    const auto& col = data_.columns[best.var];
    std::size_t n_left = 0;
    std::size_t out = 0;
    for (std::size_t k = begin; k < end; ++k) {
      if (col[sample_[k]] <= best.threshold) scratch_[out++] = sample_[k];
    }
    n_left = out;
    for (std::size_t k = begin; k < end; ++k) {
      if (!(col[sample_[k]] <= best.threshold)) scratch_[out++] = sample_[k];
    }
    std::copy(scratch_.begin(), scratch_.begin() + out, sample_.begin() + begin);

    nodes_[idx].split_var = best.var;
    nodes_[idx].threshold = best.threshold;
    const int left = grow_node(begin, begin + n_left);
    nodes_[idx].left = left;
    const int right = grow_node(begin + n_left, end);
    nodes_[idx].right = right;
    return idx;
  }

  const TrainingData& data_;
  const std::vector<double>& weights_;
  std::size_t mtry_;
  std::size_t min_node_size_;
  Rng& rng_;
  std::vector<TreeNode> nodes_;
  std::vector<std::uint32_t> sample_;
  std::vector<std::uint32_t> scratch_;
};

std::vector<std::uint32_t> draw_bootstrap(std::size_t n,
                                          const std::vector<double>& weights,
                                          Rng& rng) {
  std::vector<std::uint32_t> sample(n);
  if (weights.empty()) {
    for (auto& s : sample) s = static_cast<std::uint32_t>(rng.bounded(n));
    return sample;
  }
  std::vector<double> cumulative(n);
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += weights[i];
    cumulative[i] = total;
  }
  for (auto& s : sample) {
    const double u = rng.uniform01() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    s = static_cast<std::uint32_t>(
        std::min<std::ptrdiff_t>(it - cumulative.begin(), n - 1));
  }
  return sample;
}

}  // namespace

const TreeNode& Tree::leaf_for(std::span<const double> x) const {
  const TreeNode* node = &nodes[0];
  while (!node->is_leaf()) {
    node = x[node->split_var] <= node->threshold ? &nodes[node->left]
                                                 : &nodes[node->right];
  }
  return *node;
}

double Tree::predict_value(std::span<const double> x) const {
  return leaf_for(x).leaf_value;
}

int Tree::vote(std::span<const double> x) const {
  const auto& cw = leaf_for(x).class_weight;
  return cw[1] > cw[0] ? 1 : 0;
}

Forest Forest::fit(const GainDataset& data, const ForestParams& params,
                   const std::vector<double>& weights, int n_threads) {
  return fit(TrainingData::from(data), params, weights, n_threads);
}

Forest Forest::fit(const LabeledDataset& data, const ForestParams& params,
                   const std::vector<double>& weights, int n_threads) {
  return fit(TrainingData::from(data), params, weights, n_threads);
}

Forest Forest::fit(const TrainingData& data, const ForestParams& params,
                   const std::vector<double>& weights, int n_threads) {
  const std::size_t n = data.n_rows();
  const std::size_t p = data.n_predictors();
  if (n < 2) throw InvalidArgumentError("need at least 2 rows");
  if (p < 1) throw InvalidArgumentError("need at least 1 predictor");
  if (params.n_trees < 1) throw InvalidArgumentError("n_trees must be >= 1");
  for (const auto& col : data.columns) {
    if (col.size() != n) throw InvalidArgumentError("ragged training columns");
  }
  if (!weights.empty()) {
    if (weights.size() != n) {
      throw InvalidArgumentError("weights must match the row count");
    }
    for (const double w : weights) {
      if (!(w > 0)) throw InvalidArgumentError("case weights must be positive");
    }
  }
  if (data.task == Task::regression) {
    const double first = data.response[0];
    if (std::all_of(data.response.begin(), data.response.end(),
                    [first](double y) { return y == first; })) {
      throw DegenerateDataError("constant response");
    }
  } else {
    bool has0 = false, has1 = false;
    for (const double y : data.response) {
      if (y == 0.0) has0 = true;
      else if (y == 1.0) has1 = true;
      else throw InvalidArgumentError("classification labels must be 0 or 1");
    }
    if (!has0 || !has1) throw DegenerateDataError("single-class response");
  }

  // Equal weights carry no information; drop them so that the constant-weight
  // fit is bit-identical to the unit-weight fit.
  std::vector<double> effective_weights = weights;
  if (!effective_weights.empty() &&
      std::all_of(effective_weights.begin(), effective_weights.end(),
                  [&](double w) { return w == effective_weights[0]; })) {
    effective_weights.clear();
  }

  Forest f;
  f.task_ = data.task;
  f.names_ = data.predictor_names;
  f.params_ = params;
  f.n_rows_ = n;
  f.data_fingerprint_ = heatwave::data_fingerprint(data);
  f.fingerprint_ = full_fingerprint(f.data_fingerprint_, params, weights);
  f.trees_.resize(params.n_trees);
  f.oob_.resize(params.n_trees);

  const std::size_t mtry = params.resolved_mtry(data.task, p);
  const std::size_t min_node = params.resolved_min_node_size(data.task);

  const auto fit_one = [&](std::size_t t) {
    Rng rng = Rng::stream(params.seed, t);
    std::vector<std::uint32_t> sample;
    if (params.bootstrap) {
      sample = draw_bootstrap(n, effective_weights, rng);
      std::vector<bool> in_bag(n, false);
      for (const auto row : sample) in_bag[row] = true;
      for (std::uint32_t row = 0; row < n; ++row) {
        if (!in_bag[row]) f.oob_[t].push_back(row);
      }
    } else {
      sample.resize(n);
      for (std::uint32_t row = 0; row < n; ++row) sample[row] = row;
    }
    TreeGrower grower(data, effective_weights, mtry, min_node, rng);
    f.trees_[t] = grower.grow(std::move(sample));
  };

  const std::size_t n_workers = std::max(1, n_threads);
  if (n_workers == 1 || params.n_trees == 1) {
    for (std::size_t t = 0; t < params.n_trees; ++t) fit_one(t);
  } else {
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t t = w; t < params.n_trees; t += n_workers) fit_one(t);
      });
    }
    for (auto& th : workers) th.join();
  }
  return f;
}

double Forest::predict_value(std::span<const double> x) const {
  double sum = 0;
  for (const auto& tree : trees_) sum += tree.predict_value(x);
  return sum / static_cast<double>(trees_.size());
}

std::array<double, 2> Forest::predict_proba(std::span<const double> x) const {
  std::size_t votes1 = 0;
  for (const auto& tree : trees_) votes1 += tree.vote(x);
  const double p1 =
      static_cast<double>(votes1) / static_cast<double>(trees_.size());
  return {1.0 - p1, p1};
}

std::vector<double> Forest::order_by_names(
    const std::map<std::string, double>& x) const {
  std::vector<double> out;
  out.reserve(names_.size());
  for (const auto& name : names_) {
    const auto it = x.find(name);
    if (it == x.end()) throw MissingPredictorError("missing predictor '" + name + "'");
    out.push_back(it->second);
  }
  return out;
}

double Forest::predict_value(const std::map<std::string, double>& x) const {
  return predict_value(std::span<const double>(order_by_names(x)));
}

std::array<double, 2> Forest::predict_proba(
    const std::map<std::string, double>& x) const {
  return predict_proba(std::span<const double>(order_by_names(x)));
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  return std::strtoull(s.c_str(), nullptr, 16);
}

}  // namespace

nlohmann::ordered_json Forest::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "heatwave-forest";
  j["version"] = 1;
  j["task"] = to_string(task_);
  j["predictors"] = names_;
  j["params"] = {{"n_trees", params_.n_trees},
                 {"mtry", params_.mtry},
                 {"min_node_size", params_.min_node_size},
                 {"seed", params_.seed},
                 {"bootstrap", params_.bootstrap}};
  j["n_rows"] = n_rows_;
  j["data_fingerprint"] = hex64(data_fingerprint_);
  j["fingerprint"] = hex64(fingerprint_);
  auto trees = nlohmann::ordered_json::array();
  for (const auto& tree : trees_) {
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({n.split_var, n.threshold, n.left, n.right, n.leaf_value,
                       n.class_weight[0], n.class_weight[1]});
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  auto oob = nlohmann::ordered_json::array();
  for (const auto& rows : oob_) oob.push_back(rows);
  j["oob"] = std::move(oob);
  return j;
}

Forest Forest::from_json(const nlohmann::json& j) {
  if (!j.contains("format") || j["format"] != "heatwave-forest") {
    throw SchemaError("not a forest document");
  }
  if (j.value("version", 0) != 1) throw SchemaError("unsupported forest version");
  Forest f;
  f.task_ = task_from_string(j.at("task").get<std::string>());
  f.names_ = j.at("predictors").get<std::vector<std::string>>();
  const auto& p = j.at("params");
  f.params_.n_trees = p.at("n_trees").get<std::size_t>();
  f.params_.mtry = p.at("mtry").get<std::size_t>();
  f.params_.min_node_size = p.at("min_node_size").get<std::size_t>();
  f.params_.seed = p.at("seed").get<std::uint64_t>();
  f.params_.bootstrap = p.at("bootstrap").get<bool>();
  f.n_rows_ = j.at("n_rows").get<std::size_t>();
  f.data_fingerprint_ = parse_hex64(j.at("data_fingerprint").get<std::string>());
  f.fingerprint_ = parse_hex64(j.at("fingerprint").get<std::string>());
  for (const auto& tj : j.at("trees")) {
    Tree tree;
    for (const auto& nj : tj) {
      TreeNode n;
      n.split_var = nj.at(0).get<int>();
      n.threshold = nj.at(1).get<double>();
      n.left = nj.at(2).get<int>();
      n.right = nj.at(3).get<int>();
      n.leaf_value = nj.at(4).get<double>();
      n.class_weight = {nj.at(5).get<double>(), nj.at(6).get<double>()};
      tree.nodes.push_back(n);
    }
    f.trees_.push_back(std::move(tree));
  }
  for (const auto& rows : j.at("oob")) {
    f.oob_.push_back(rows.get<std::vector<std::uint32_t>>());
  }
  return f;
}

Forest Forest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open forest file: " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

void Forest::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write forest file: " + path);
  out << to_json().dump(2) << '\n';
}

Forest Forest::from_parts(Task task, std::vector<std::string> names,
                          std::vector<Tree> trees,
                          std::vector<std::vector<std::uint32_t>> oob,
                          ForestParams params, std::size_t n_rows,
                          std::uint64_t data_fp, std::uint64_t full_fp) {
  Forest f;
  f.task_ = task;
  f.names_ = std::move(names);
  f.trees_ = std::move(trees);
  f.oob_ = std::move(oob);
  f.oob_.resize(f.trees_.size());
  f.params_ = params;
  f.n_rows_ = n_rows;
  f.data_fingerprint_ = data_fp;
  f.fingerprint_ = full_fp;
  return f;
}

namespace detail {

namespace {

// Row-major copy so per-row predictions can take a contiguous span.
std::vector<double> row_major(const std::vector<std::vector<double>>& columns,
                              std::size_t n) {
  const std::size_t p = columns.size();
  std::vector<double> rows(n * p);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) rows[i * p + j] = columns[j][i];
  }
  return rows;
}

}  // namespace

std::vector<double> oob_regression_predictions(
    const Forest& forest, const std::vector<std::vector<double>>& columns) {
  const std::size_t n = forest.n_training_rows();
  const std::size_t p = columns.size();
  const auto rows = row_major(columns, n);
  std::vector<double> sums(n, 0.0);
  std::vector<std::uint32_t> counts(n, 0);
  for (std::size_t t = 0; t < forest.trees().size(); ++t) {
    const auto& tree = forest.trees()[t];
    for (const auto row : forest.oob_membership()[t]) {
      sums[row] += tree.predict_value({&rows[row * p], p});
      ++counts[row];
    }
  }
  std::vector<double> preds(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] > 0) preds[i] = sums[i] / counts[i];
  }
  return preds;
}

std::vector<int> oob_classification_votes(
    const Forest& forest, const std::vector<std::vector<double>>& columns) {
  const std::size_t n = forest.n_training_rows();
  const std::size_t p = columns.size();
  const auto rows = row_major(columns, n);
  std::vector<std::uint32_t> votes1(n, 0), total(n, 0);
  for (std::size_t t = 0; t < forest.trees().size(); ++t) {
    const auto& tree = forest.trees()[t];
    for (const auto row : forest.oob_membership()[t]) {
      votes1[row] += tree.vote({&rows[row * p], p});
      ++total[row];
    }
  }
  std::vector<int> preds(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (total[i] > 0) preds[i] = 2 * votes1[i] > total[i] ? 1 : 0;  // tie -> 0
  }
  return preds;
}

OobReport oob_report_unchecked(const Forest& forest, const TrainingData& data) {
  OobReport r;
  r.task = forest.task();
  r.n_rows = data.n_rows();
  if (forest.task() == Task::regression) {
    const auto preds = oob_regression_predictions(forest, data.columns);
    double mse = 0;
    std::size_t scored = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (std::isnan(preds[i])) {
        ++r.n_skipped;
        continue;
      }
      const double e = preds[i] - data.response[i];
      mse += e * e;
      ++scored;
    }
    r.oob_mse = scored > 0 ? mse / scored : 0.0;
    double mean = 0;
    for (const double y : data.response) mean += y;
    mean /= data.n_rows();
    double var = 0;
    for (const double y : data.response) var += (y - mean) * (y - mean);
    var /= data.n_rows();  // population variance
    r.variance_explained =
        scored > 0 && var > 0 ? 1.0 - r.oob_mse / var : 0.0;
  } else {
    const auto preds = oob_classification_votes(forest, data.columns);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (preds[i] < 0) {
        ++r.n_skipped;
        continue;
      }
      const int truth = static_cast<int>(data.response[i]);
      if (truth == 1) {
        (preds[i] == 1 ? r.tp : r.fn) += 1;
      } else {
        (preds[i] == 1 ? r.fp : r.tn) += 1;
      }
    }
    const std::size_t scored = r.tp + r.fp + r.fn + r.tn;
    r.error_rate = scored > 0 ? double(r.fp + r.fn) / scored : 0.0;
    r.false_positive_rate = (r.fp + r.tn) > 0 ? double(r.fp) / (r.fp + r.tn) : 0.0;
    r.false_negative_rate = (r.fn + r.tp) > 0 ? double(r.fn) / (r.fn + r.tp) : 0.0;
  }
  return r;
}

}  // namespace detail

OobReport oob_report(const Forest& forest, const GainDataset& data) {
  return oob_report(forest, TrainingData::from(data));
}

OobReport oob_report(const Forest& forest, const LabeledDataset& data) {
  return oob_report(forest, TrainingData::from(data));
}

OobReport oob_report(const Forest& forest, const TrainingData& data) {
  if (data_fingerprint(data) != forest.data_fingerprint()) {
    throw FingerprintMismatchError(
        "out-of-bag report requested for data the forest was not fit on");
  }
  return detail::oob_report_unchecked(forest, data);
}

}  // namespace heatwave
