#include "heatwave/forest.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "heatwave/rng.hpp"
#include "oracles.hpp"

using namespace heatwave;

namespace {

TrainingData make_data(Task task, std::vector<std::vector<double>> columns,
                       std::vector<double> y) {
  TrainingData d;
  d.task = task;
  d.columns = std::move(columns);
  d.response = std::move(y);
  for (std::size_t j = 0; j < d.columns.size(); ++j) {
    d.predictor_names.push_back("x" + std::to_string(j + 1));
  }
  return d;
}

// Flattens a tree into (var, threshold) pairs in preorder; leaves as (-1, 0).
void flatten(const Tree& tree, int idx, std::vector<std::pair<int, double>>& out) {
  const auto& node = tree.nodes[static_cast<std::size_t>(idx)];
  out.emplace_back(node.split_var, node.is_leaf() ? 0.0 : node.threshold);
  if (!node.is_leaf()) {
    flatten(tree, node.left, out);
    flatten(tree, node.right, out);
  }
}

void flatten(const oracle::Node& node, std::vector<std::pair<int, double>>& out) {
  out.emplace_back(node.var, node.is_leaf() ? 0.0 : node.threshold);
  if (!node.is_leaf()) {
    flatten(*node.left, out);
    flatten(*node.right, out);
  }
}

bool tree_matches_oracle(const TrainingData& data,
                         const std::vector<double>& weights,
                         std::size_t min_node_size) {
  ForestParams params;
  params.n_trees = 1;
  params.mtry = data.n_predictors();
  params.min_node_size = min_node_size;
  params.bootstrap = false;
  const Forest f = Forest::fit(data, params, weights);

  oracle::Dataset od;
  od.columns = data.columns;
  od.y = data.response;
  od.weights = weights;
  od.classification = data.task == Task::classification;
  const auto root = oracle::build_tree(od, min_node_size);

  std::vector<std::pair<int, double>> ours, theirs;
  flatten(f.trees()[0], 0, ours);
  flatten(*root, theirs);
  return ours == theirs;
}

}  // namespace

TEST_CASE("a perfectly separating predictor yields a zero-error single tree") {
  const auto data = make_data(Task::classification,
                              {{0, 0, 1, 1}, {3.0, 1.0, 2.0, 4.0}},
                              {0, 0, 1, 1});
  ForestParams params;
  params.n_trees = 1;
  params.mtry = 2;
  params.bootstrap = false;
  const Forest f = Forest::fit(data, params);

  REQUIRE(!f.trees().empty());
  CHECK(f.trees()[0].nodes[0].split_var == 0);
  CHECK(f.trees()[0].nodes[0].threshold == 0.5);

  CHECK(f.predict_proba(std::vector<double>{0.0, 2.0})[1] == 0.0);
  CHECK(f.predict_proba(std::vector<double>{1.0, 2.0})[1] == 1.0);

  // with a bootstrap and many trees the separable problem stays at zero
  // out-of-bag error
  params.n_trees = 100;
  params.bootstrap = true;
  params.seed = 5;
  const Forest bagged = Forest::fit(data, params);
  const OobReport r = oob_report(bagged, data);
  CHECK(r.error_rate == 0.0);
}

TEST_CASE("fit rejects degenerate inputs") {
  CHECK_THROWS_AS(
      Forest::fit(make_data(Task::regression, {{1, 2, 3}}, {5, 5, 5}), {}),
      DegenerateDataError);
  CHECK_THROWS_AS(
      Forest::fit(make_data(Task::classification, {{1, 2, 3}}, {1, 1, 1}), {}),
      DegenerateDataError);
  CHECK_THROWS_AS(
      Forest::fit(make_data(Task::classification, {{1, 2, 3}}, {0, 1, 2}), {}),
      InvalidArgumentError);
  CHECK_THROWS_AS(Forest::fit(make_data(Task::regression, {{1}}, {1}), {}),
                  InvalidArgumentError);
  CHECK_THROWS_AS(Forest::fit(make_data(Task::regression, {{1, 2, 3}}, {1, 2, 3}),
                              {}, {1.0, -1.0, 1.0}),
                  InvalidArgumentError);
}

TEST_CASE("seed determinism across repeated fits and thread counts") {
  Rng rng(99);
  std::vector<std::vector<double>> cols(4, std::vector<double>(200));
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    for (auto& col : cols) col[i] = rng.uniform(-1, 1);
    y[i] = 2.0 * cols[0][i] + rng.normal();
  }
  const auto data = make_data(Task::regression, cols, y);
  ForestParams params;
  params.n_trees = 60;
  params.seed = 4242;

  const Forest a = Forest::fit(data, params, {}, 1);
  const Forest b = Forest::fit(data, params, {}, 1);
  const Forest c = Forest::fit(data, params, {}, 4);
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_json() == c.to_json());

  ForestParams other = params;
  other.seed = 4243;
  const Forest d = Forest::fit(data, other, {}, 1);
  CHECK(a.to_json() != d.to_json());
}

TEST_CASE("single tree with mtry = p matches the brute-force CART oracle") {
  Rng rng(123);
  int checked = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 4 + rng.bounded(9);  // 4..12
    const std::size_t p = 1 + rng.bounded(3);  // 1..3
    const bool classify = rep % 2 == 1;
    std::vector<std::vector<double>> cols(p, std::vector<double>(n));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& col : cols) col[i] = rng.uniform(0, 10);
      y[i] = classify ? double(rng.bounded(2)) : rng.uniform(-5, 5);
    }
    if (classify) {
      bool has0 = false, has1 = false;
      for (const double v : y) (v == 1.0 ? has1 : has0) = true;
      if (!has0 || !has1) continue;
    }
    const std::size_t min_node = 1 + rng.bounded(3);
    const auto data =
        make_data(classify ? Task::classification : Task::regression, cols, y);
    CHECK(tree_matches_oracle(data, {}, min_node));
    ++checked;
  }
  CHECK(checked > 40);
}

TEST_CASE("duplicating a row equals doubling its weight for split selection") {
  Rng rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 5 + rng.bounded(5);
    const bool classify = rep % 2 == 0;
    std::vector<std::vector<double>> cols(2, std::vector<double>(n));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      cols[0][i] = rng.uniform(0, 10);
      cols[1][i] = rng.uniform(0, 10);
      y[i] = classify ? double(rng.bounded(2)) : rng.uniform(0, 4);
    }
    if (classify) {
      y[0] = 0.0;
      y[1] = 1.0;
    }

    // duplicate row 0
    auto dup_cols = cols;
    dup_cols[0].push_back(cols[0][0]);
    dup_cols[1].push_back(cols[1][0]);
    auto dup_y = y;
    dup_y.push_back(y[0]);

    // versus weighting row 0 by 2
    std::vector<double> weights(n, 1.0);
    weights[0] = 2.0;

    ForestParams params;
    params.n_trees = 1;
    params.mtry = 2;
    params.min_node_size = 2;
    params.bootstrap = false;
    const Task task = classify ? Task::classification : Task::regression;
    const Forest dup = Forest::fit(make_data(task, dup_cols, dup_y), params);
    const Forest weighted = Forest::fit(make_data(task, cols, y), params, weights);

    // identical root split; deeper nodes can differ because the duplicate
    // changes the unweighted node-size stopping counts
    CHECK(dup.trees()[0].nodes[0].split_var ==
          weighted.trees()[0].nodes[0].split_var);
    CHECK(dup.trees()[0].nodes[0].threshold ==
          weighted.trees()[0].nodes[0].threshold);
  }
}

TEST_CASE("constant case weights change nothing") {
  Rng rng(31);
  std::vector<std::vector<double>> cols(3, std::vector<double>(60));
  std::vector<double> y(60);
  for (std::size_t i = 0; i < 60; ++i) {
    for (auto& col : cols) col[i] = rng.uniform(0, 1);
    y[i] = double(rng.bounded(2));
  }
  y[0] = 0.0;
  y[1] = 1.0;
  const auto data = make_data(Task::classification, cols, y);
  ForestParams params;
  params.n_trees = 25;
  params.seed = 9;

  const Forest unit = Forest::fit(data, params);
  const Forest scaled = Forest::fit(data, params, std::vector<double>(60, 2.5));
  CHECK(unit.to_json().at("trees") == scaled.to_json().at("trees"));
  CHECK(oob_report(unit, data).error_rate == oob_report(scaled, data).error_rate);
}

TEST_CASE("weight scale invariance against the oracle on small instances") {
  Rng rng(55);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 6 + rng.bounded(6);
    std::vector<std::vector<double>> cols(2, std::vector<double>(n));
    std::vector<double> y(n), weights(n);
    for (std::size_t i = 0; i < n; ++i) {
      cols[0][i] = rng.uniform(0, 10);
      cols[1][i] = rng.uniform(0, 10);
      y[i] = rng.uniform(-2, 6);
      weights[i] = 1.0 + double(rng.bounded(4));  // small integer weights
    }
    const auto data = make_data(Task::regression, cols, y);
    CHECK(tree_matches_oracle(data, weights, 2));
    for (const double c : {0.5, 2.0, 4.0}) {  // exact scalings
      auto scaled = weights;
      for (auto& w : scaled) w *= c;
      ForestParams params;
      params.n_trees = 1;
      params.mtry = 2;
      params.min_node_size = 2;
      params.bootstrap = false;
      const Forest a = Forest::fit(data, params, weights);
      const Forest b = Forest::fit(data, params, scaled);
      CHECK(a.to_json().at("trees") == b.to_json().at("trees"));
    }
  }
}

TEST_CASE("prediction aggregates votes and values") {
  // two stumps that disagree at x = 0.5
  Tree left_tree;
  left_tree.nodes.resize(3);
  left_tree.nodes[0] = {0, 0.6, 1, 2, 0.0, {0, 0}};
  left_tree.nodes[1] = {-1, 0, -1, -1, 1.0, {0, 5}};  // class 1 leaf
  left_tree.nodes[2] = {-1, 0, -1, -1, 3.0, {5, 0}};  // class 0 leaf
  Tree right_tree;
  right_tree.nodes.resize(3);
  right_tree.nodes[0] = {0, 0.4, 1, 2, 0.0, {0, 0}};
  right_tree.nodes[1] = {-1, 0, -1, -1, 2.0, {0, 5}};  // class 1 leaf
  right_tree.nodes[2] = {-1, 0, -1, -1, 4.0, {5, 0}};  // class 0 leaf

  const Forest two = Forest::from_parts(Task::classification, {"x1"},
                                        {left_tree, right_tree});
  const auto proba = two.predict_proba(std::vector<double>{0.5});
  CHECK(proba[1] == 0.5);
  CHECK(proba[0] + proba[1] == 1.0);

  const Forest one = Forest::from_parts(Task::classification, {"x1"}, {left_tree});
  CHECK(one.predict_proba(std::vector<double>{0.5})[1] == 1.0);

  const Forest reg = Forest::from_parts(Task::regression, {"x1"},
                                        {left_tree, right_tree});
  // 0.5 reaches the value-1.0 leaf in one tree and the value-4.0 leaf in the other
  CHECK(reg.predict_value(std::vector<double>{0.5}) == doctest::Approx(2.5));

  // named-vector form
  CHECK(two.predict_proba({{"x1", 0.5}})[1] == 0.5);
  CHECK_THROWS_AS(two.predict_proba({{"x2", 0.5}}), MissingPredictorError);
}

TEST_CASE("probabilities are in [0,1] and sum to exactly 1") {
  Rng rng(3);
  std::vector<std::vector<double>> cols(2, std::vector<double>(80));
  std::vector<double> y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    cols[0][i] = rng.normal();
    cols[1][i] = rng.normal();
    y[i] = cols[0][i] + 0.5 * rng.normal() > 0 ? 1.0 : 0.0;
  }
  y[0] = 0.0;
  y[1] = 1.0;
  const auto data = make_data(Task::classification, cols, y);
  ForestParams params;
  params.n_trees = 37;
  params.seed = 11;
  const Forest f = Forest::fit(data, params);
  for (int rep = 0; rep < 200; ++rep) {
    const std::vector<double> x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const auto p = f.predict_proba(x);
    CHECK(p[0] >= 0.0);
    CHECK(p[1] >= 0.0);
    CHECK(p[0] + p[1] == 1.0);
  }
}

TEST_CASE("out-of-bag bookkeeping") {
  Rng rng(8);
  const std::size_t n = 50;
  std::vector<std::vector<double>> cols(2, std::vector<double>(n));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    cols[0][i] = rng.uniform(0, 1);
    cols[1][i] = rng.uniform(0, 1);
    y[i] = 3.0 * cols[0][i] + 0.1 * rng.normal();
  }
  const auto data = make_data(Task::regression, cols, y);
  ForestParams params;
  params.n_trees = 500;
  params.seed = 21;
  const Forest f = Forest::fit(data, params);

  // every row lands out of bag for roughly n_trees / e trees
  double mean_oob = 0;
  for (const auto& rows : f.oob_membership()) mean_oob += double(rows.size());
  mean_oob /= double(params.n_trees);
  CHECK(mean_oob / double(n) == doctest::Approx(std::exp(-1.0)).epsilon(0.05));

  const OobReport r = oob_report(f, data);
  CHECK(r.n_skipped == 0);  // P(never OOB) ~ (1 - e^-1)^500 per row
  CHECK(r.variance_explained > 0.5);

  // mismatched data is rejected
  auto other = data;
  other.response[0] += 1.0;
  CHECK_THROWS_AS(oob_report(f, other), FingerprintMismatchError);
}

TEST_CASE("oob error tracks holdout error on fresh data") {
  // Monte Carlo version of the spec property, averaged over replications.
  Rng rng(2024);
  double oob_sum = 0, holdout_sum = 0;
  const int reps = 20;
  for (int rep = 0; rep < reps; ++rep) {
    const std::size_t n = 200;
    const auto draw = [&](std::size_t rows) {
      std::vector<std::vector<double>> cols(3, std::vector<double>(rows));
      std::vector<double> y(rows);
      for (std::size_t i = 0; i < rows; ++i) {
        for (auto& col : cols) col[i] = rng.normal();
        y[i] = cols[0][i] + 0.7 * cols[1][i] + 0.8 * rng.normal() > 0 ? 1.0 : 0.0;
      }
      y[0] = 0.0;
      y[1] = 1.0;
      return make_data(Task::classification, cols, y);
    };
    const auto train = draw(n);
    const auto fresh = draw(n);
    ForestParams params;
    params.n_trees = 300;
    params.seed = 1000 + std::uint64_t(rep);
    const Forest f = Forest::fit(train, params);
    oob_sum += oob_report(f, train).error_rate;

    std::size_t wrong = 0;
    std::vector<double> x(3);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < 3; ++j) x[j] = fresh.columns[j][i];
      const int pred = f.predict_proba(x)[1] > 0.5 ? 1 : 0;
      wrong += pred != int(fresh.response[i]) ? 1 : 0;
    }
    holdout_sum += double(wrong) / double(n);
  }
  CHECK(std::abs(oob_sum / reps - holdout_sum / reps) < 0.03);
}

TEST_CASE("forest json round-trip") {
  Rng rng(14);
  std::vector<std::vector<double>> cols(2, std::vector<double>(30));
  std::vector<double> y(30);
  for (std::size_t i = 0; i < 30; ++i) {
    cols[0][i] = rng.uniform(0, 1);
    cols[1][i] = rng.uniform(0, 1);
    y[i] = double(rng.bounded(2));
  }
  y[0] = 0.0;
  y[1] = 1.0;
  const auto data = make_data(Task::classification, cols, y);
  ForestParams params;
  params.n_trees = 12;
  params.seed = 2;
  const Forest f = Forest::fit(data, params);

  const Forest back = Forest::from_json(f.to_json());
  CHECK(back.to_json() == f.to_json());
  CHECK(back.fingerprint() == f.fingerprint());
  const std::vector<double> x{0.3, 0.7};
  CHECK(back.predict_proba(x) == f.predict_proba(x));
}

TEST_CASE("rows deep inside the class-1 region score near-certain") {
  // strongly separated classes; a test point far beyond the class-1 mean
  // must collect nearly every vote
  Rng rng(61);
  std::vector<std::vector<double>> cols(2, std::vector<double>(200));
  std::vector<double> y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    const bool one = i % 2 == 0;
    cols[0][i] = rng.normal(one ? 3.0 : -3.0, 1.0);
    cols[1][i] = rng.normal();
    y[i] = one ? 1.0 : 0.0;
  }
  const auto data = make_data(Task::classification, cols, y);
  ForestParams params;
  params.n_trees = 500;
  params.seed = 13;
  const Forest f = Forest::fit(data, params);
  for (const double x1 : {3.0, 4.0, 5.0}) {
    CHECK(f.predict_proba(std::vector<double>{x1, 0.0})[1] >= 0.9);
    CHECK(f.predict_proba(std::vector<double>{-x1, 0.0})[1] <= 0.1);
  }
}
