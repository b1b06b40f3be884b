#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "heatwave/forest.hpp"

#include "json.hpp"

namespace heatwave {

struct GaParams {
  std::size_t population_size = 100;
  std::size_t n_iterations = 5000;
  std::size_t elitism = 5;  // members carried unchanged each generation
  double crossover_prob = 0.8;
  double mutation_prob = 0.1;  // per gene
  std::vector<std::pair<double, double>> bounds;  // per predictor [lo, hi]
  std::uint64_t seed = 0;

  // Observed min/max of each training column, the default search box.
  static std::vector<std::pair<double, double>> bounds_from(const TrainingData& data);
};

struct SyntheticPopulation {
  std::vector<std::string> predictor_names;
  std::vector<std::pair<double, double>> bounds;
  std::vector<std::vector<double>> members;  // population_size x p
  std::vector<double> fitness;               // survival-forest fitted values
  // (best, mean) fitness per iteration; entry 0 is the initial population.
  std::vector<std::pair<double, double>> history;

  nlohmann::ordered_json to_json() const;
  void write_history_csv(const std::string& path) const;  // iteration,best,mean
};

struct SolutionVector {
  std::vector<std::string> predictor_names;
  std::vector<double> values;       // fitness-weighted mean of the population
  std::vector<double> best_member;  // single fittest member, for transparency
  double mean_fitness = 0;          // unweighted mean fitness
  // Optional per-predictor spread (IQR of the training data) used by
  // compare_solutions to scale deltas; empty when unknown.
  std::map<std::string, double> scale;

  nlohmann::ordered_json to_json() const;
  static SolutionVector from_json(const nlohmann::json& j);
};

// Evolves a synthetic population against a regression forest's fitted values:
// elitism keeps the best members unchanged, parents are drawn
// fitness-proportionally, crossover averages the two parents' predictor
// values, and mutation redraws a gene uniformly within its bounds.
SyntheticPopulation evolve(const Forest& survival, const GaParams& params,
                           int n_threads = 1);

SolutionVector solution_vector(const SyntheticPopulation& pop);

struct ComparisonEntry {
  std::string predictor;
  double delta = 0;           // a - b
  double relative_delta = 0;  // |delta| / pooled scale
  bool selected = false;      // among the top k with a nonzero delta
};

// Ranked by |relative delta|, descending; ties keep predictor order.
std::vector<ComparisonEntry> compare_solutions(const SolutionVector& a,
                                               const SolutionVector& b,
                                               std::size_t k);

// Pearson correlations between predictors in the final population.
std::vector<std::vector<double>> predictor_correlation(const SyntheticPopulation& pop);

nlohmann::ordered_json comparison_to_json(const std::vector<ComparisonEntry>& entries);

}  // namespace heatwave
