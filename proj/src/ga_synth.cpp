#include "heatwave/ga_synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include "heatwave/csv.hpp"
#include "heatwave/rng.hpp"

namespace heatwave {

std::vector<std::pair<double, double>> GaParams::bounds_from(
    const TrainingData& data) {
  std::vector<std::pair<double, double>> bounds;
  bounds.reserve(data.n_predictors());
  for (const auto& col : data.columns) {
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    bounds.emplace_back(*lo, *hi);
  }
  return bounds;
}

namespace {

void validate_params(const GaParams& p, std::size_t n_predictors) {
  if (p.population_size < 2) throw InvalidArgumentError("population_size must be >= 2");
  if (p.elitism >= p.population_size) {
    throw InvalidArgumentError("elitism must be below population_size");
  }
  if (!(p.crossover_prob >= 0 && p.crossover_prob <= 1) ||
      !(p.mutation_prob >= 0 && p.mutation_prob <= 1)) {
    throw InvalidArgumentError("probabilities must lie in [0, 1]");
  }
  if (p.bounds.size() != n_predictors) {
    throw InvalidArgumentError("bounds must cover every predictor");
  }
  for (const auto& [lo, hi] : p.bounds) {
    if (!(lo <= hi)) throw InvalidArgumentError("empty predictor bounds");
  }
}

void evaluate_fitness(const Forest& survival,
                      const std::vector<std::vector<double>>& members,
                      std::vector<double>& fitness, int n_threads) {
  fitness.resize(members.size());
  const auto eval_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      fitness[i] = survival.predict_value(members[i]);
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(std::max(1, n_threads), members.size());
  if (n_workers <= 1) {
    eval_range(0, members.size());
    return;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (members.size() + n_workers - 1) / n_workers;
  for (std::size_t w = 0; w < n_workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(members.size(), lo + chunk);
    if (lo < hi) workers.emplace_back(eval_range, lo, hi);
  }
  for (auto& t : workers) t.join();
}

// Fitness-proportional index draw over weights shifted to be nonnegative;
// a flat landscape degrades to a uniform draw.
std::size_t roulette(const std::vector<double>& shifted, double total, Rng& rng) {
  if (!(total > 0)) return rng.bounded(shifted.size());
  const double u = rng.uniform01() * total;
  double acc = 0;
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    acc += shifted[i];
    if (u < acc) return i;
  }
  return shifted.size() - 1;
}

std::vector<std::size_t> rank_by_fitness(const std::vector<double>& fitness) {
  std::vector<std::size_t> order(fitness.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return fitness[a] > fitness[b];
  });
  return order;
}

}  // namespace

SyntheticPopulation evolve(const Forest& survival, const GaParams& params,
                           int n_threads) {
  if (survival.task() != Task::regression) {
    throw TaskMismatchError("the survival function must be a regression forest");
  }
  const std::size_t p = survival.predictor_names().size();
  validate_params(params, p);

  SyntheticPopulation pop;
  pop.predictor_names = survival.predictor_names();
  pop.bounds = params.bounds;
  pop.members.assign(params.population_size, std::vector<double>(p));

  {
    Rng rng = Rng::stream(params.seed, 0);
    for (auto& member : pop.members) {
      for (std::size_t j = 0; j < p; ++j) {
        member[j] = rng.uniform(params.bounds[j].first, params.bounds[j].second);
      }
    }
  }
  evaluate_fitness(survival, pop.members, pop.fitness, n_threads);

  const auto record = [&pop] {
    double best = pop.fitness[0], sum = 0;
    for (const double f : pop.fitness) {
      best = std::max(best, f);
      sum += f;
    }
    pop.history.emplace_back(best, sum / pop.fitness.size());
  };
  record();

  std::vector<std::vector<double>> next(params.population_size,
                                        std::vector<double>(p));
  std::vector<double> shifted(params.population_size);
  for (std::size_t gen = 1; gen <= params.n_iterations; ++gen) {
    Rng rng = Rng::stream(params.seed, gen);

    const auto order = rank_by_fitness(pop.fitness);
    for (std::size_t e = 0; e < params.elitism; ++e) {
      next[e] = pop.members[order[e]];  // carried unchanged
    }

    double fmin = pop.fitness[0];
    for (const double f : pop.fitness) fmin = std::min(fmin, f);
    double total = 0;
    for (std::size_t i = 0; i < pop.fitness.size(); ++i) {
      shifted[i] = pop.fitness[i] - fmin;
      total += shifted[i];
    }

    for (std::size_t slot = params.elitism; slot < params.population_size; ++slot) {
      const std::size_t a = roulette(shifted, total, rng);
      const std::size_t b = roulette(shifted, total, rng);
      auto& child = next[slot];
      if (rng.uniform01() < params.crossover_prob) {
        for (std::size_t j = 0; j < p; ++j) {
          child[j] = (pop.members[a][j] + pop.members[b][j]) / 2.0;
        }
      } else {
        child = pop.members[a];
      }
      for (std::size_t j = 0; j < p; ++j) {
        if (rng.uniform01() < params.mutation_prob) {
          child[j] = rng.uniform(params.bounds[j].first, params.bounds[j].second);
        }
      }
    }

    pop.members.swap(next);
    evaluate_fitness(survival, pop.members, pop.fitness, n_threads);
    record();
  }
  return pop;
}

SolutionVector solution_vector(const SyntheticPopulation& pop) {
  if (pop.members.empty()) throw EmptyDatasetError("empty population");
  const std::size_t p = pop.predictor_names.size();

  SolutionVector s;
  s.predictor_names = pop.predictor_names;
  s.values.assign(p, 0.0);

  // Negative fitness carries no weight; an all-nonpositive population falls
  // back to the unweighted mean.
  double total = 0;
  for (const double f : pop.fitness) total += std::max(f, 0.0);
  std::size_t best = 0;
  double fitness_sum = 0;
  for (std::size_t i = 0; i < pop.members.size(); ++i) {
    const double w = total > 0 ? std::max(pop.fitness[i], 0.0)
                               : 1.0;
    for (std::size_t j = 0; j < p; ++j) s.values[j] += w * pop.members[i][j];
    if (pop.fitness[i] > pop.fitness[best]) best = i;
    fitness_sum += pop.fitness[i];
  }
  const double denom = total > 0 ? total : double(pop.members.size());
  for (auto& v : s.values) v /= denom;
  s.best_member = pop.members[best];
  s.mean_fitness = fitness_sum / pop.members.size();
  return s;
}

std::vector<ComparisonEntry> compare_solutions(const SolutionVector& a,
                                               const SolutionVector& b,
                                               std::size_t k) {
  if (a.predictor_names != b.predictor_names) {
    throw PredictorSetMismatchError("solutions cover different predictor sets");
  }
  std::vector<ComparisonEntry> entries(a.predictor_names.size());
  for (std::size_t j = 0; j < entries.size(); ++j) {
    const auto& name = a.predictor_names[j];
    entries[j].predictor = name;
    entries[j].delta = a.values[j] - b.values[j];
    double scale = 0;
    int n_scales = 0;
    if (const auto it = a.scale.find(name); it != a.scale.end() && it->second > 0) {
      scale += it->second;
      ++n_scales;
    }
    if (const auto it = b.scale.find(name); it != b.scale.end() && it->second > 0) {
      scale += it->second;
      ++n_scales;
    }
    const double pooled = n_scales > 0 ? scale / n_scales : 1.0;
    entries[j].relative_delta = std::abs(entries[j].delta) / pooled;
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ComparisonEntry& x, const ComparisonEntry& y) {
                     return x.relative_delta > y.relative_delta;
                   });
  for (std::size_t j = 0; j < entries.size() && j < k; ++j) {
    entries[j].selected = entries[j].relative_delta > 0;
  }
  return entries;
}

std::vector<std::vector<double>> predictor_correlation(
    const SyntheticPopulation& pop) {
  const std::size_t p = pop.predictor_names.size();
  const std::size_t n = pop.members.size();
  std::vector<double> mean(p, 0.0), sd(p, 0.0);
  for (const auto& m : pop.members)
    for (std::size_t j = 0; j < p; ++j) mean[j] += m[j];
  for (auto& v : mean) v /= double(n);
  for (const auto& m : pop.members)
    for (std::size_t j = 0; j < p; ++j) sd[j] += (m[j] - mean[j]) * (m[j] - mean[j]);
  for (auto& v : sd) v = std::sqrt(v / double(n));

  std::vector<std::vector<double>> corr(p, std::vector<double>(p, 0.0));
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      double cov = 0;
      for (const auto& m : pop.members) cov += (m[a] - mean[a]) * (m[b] - mean[b]);
      cov /= double(n);
      const double denom = sd[a] * sd[b];
      corr[a][b] = corr[b][a] = denom > 0 ? cov / denom : (a == b ? 1.0 : 0.0);
    }
  }
  return corr;
}

nlohmann::ordered_json SyntheticPopulation::to_json() const {
  nlohmann::ordered_json j;
  j["predictors"] = predictor_names;
  auto bounds_arr = nlohmann::ordered_json::array();
  for (const auto& [lo, hi] : bounds) bounds_arr.push_back({lo, hi});
  j["bounds"] = std::move(bounds_arr);
  j["members"] = members;
  j["fitness"] = fitness;
  auto hist = nlohmann::ordered_json::array();
  for (const auto& [best, mean] : history) hist.push_back({best, mean});
  j["history"] = std::move(hist);
  return j;
}

void SyntheticPopulation::write_history_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write history file: " + path);
  out << "iteration,best,mean\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << i << ',' << csv::format(history[i].first) << ','
        << csv::format(history[i].second) << '\n';
  }
}

nlohmann::ordered_json SolutionVector::to_json() const {
  nlohmann::ordered_json j;
  j["predictors"] = predictor_names;
  j["values"] = values;
  j["best_member"] = best_member;
  j["mean_fitness"] = mean_fitness;
  j["scale"] = scale;
  return j;
}

SolutionVector SolutionVector::from_json(const nlohmann::json& j) {
  SolutionVector s;
  s.predictor_names = j.at("predictors").get<std::vector<std::string>>();
  s.values = j.at("values").get<std::vector<double>>();
  if (j.contains("best_member")) {
    s.best_member = j["best_member"].get<std::vector<double>>();
  }
  s.mean_fitness = j.value("mean_fitness", 0.0);
  if (j.contains("scale")) {
    s.scale = j["scale"].get<std::map<std::string, double>>();
  }
  return s;
}

nlohmann::ordered_json comparison_to_json(const std::vector<ComparisonEntry>& entries) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    arr.push_back({{"predictor", e.predictor},
                   {"delta", e.delta},
                   {"relative_delta", e.relative_delta},
                   {"selected", e.selected}});
  }
  return arr;
}

}  // namespace heatwave
