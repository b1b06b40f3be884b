#include "heatwave/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "heatwave/conformal.hpp"
#include "heatwave/csv.hpp"
#include "heatwave/design.hpp"
#include "heatwave/diagnostics.hpp"
#include "heatwave/errors.hpp"
#include "heatwave/forest.hpp"
#include "heatwave/ga_synth.hpp"
#include "heatwave/grid_data.hpp"
#include "heatwave/sampling.hpp"
#include "heatwave/synthgen.hpp"
#include "heatwave/version.hpp"

namespace heatwave::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::uint64_t file_fnv64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file: " + path);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One manifest per invocation, written next to the outputs.
struct Manifest {
  std::string subcommand;
  std::vector<std::string> argv;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  ordered_json parameters = ordered_json::object();
  ordered_json results = ordered_json::object();

  void write(const fs::path& out_dir) const {
    ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["argv"] = argv;
    j["seed"] = seed;
    j["threads"] = threads;
    auto ins = ordered_json::array();
    for (const auto& path : inputs) {
      ins.push_back({{"path", path}, {"fnv64", hex64(file_fnv64(path))}});
    }
    j["inputs"] = std::move(ins);
    j["outputs"] = outputs;
    j["parameters"] = parameters;
    j["results"] = results;
    j["timestamp"] = iso_timestamp();
    std::string name = subcommand;
    for (auto& c : name) {
      if (c == ' ') c = '-';
    }
    std::ofstream out(out_dir / (name + ".manifest.json"));
    if (!out) throw Error("cannot write manifest in " + out_dir.string());
    out << j.dump(2) << '\n';
  }
};

void dump_json(const ordered_json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json slurp_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

Date parse_date(const std::string& s) { return Date::from_iso(s); }

DateRange parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw InvalidArgumentError("date range must be FIRST:LAST, got '" + s + "'");
  }
  return {parse_date(s.substr(0, colon)), parse_date(s.substr(colon + 1))};
}

// TAG:LABEL:POST_FIRST:POST_LAST:LAG
Scenario parse_scenario(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t colon = s.find(':', start);
    if (colon == std::string::npos) colon = s.size();
    parts.push_back(s.substr(start, colon - start));
    start = colon + 1;
  }
  if (parts.size() != 5) {
    throw InvalidArgumentError(
        "scenario must be TAG:LABEL:POST_FIRST:POST_LAST:LAG, got '" + s + "'");
  }
  Scenario sc;
  sc.tag = parts[0];
  if (parts[1] == "1") sc.label = 1;
  else if (parts[1] == "0") sc.label = 0;
  else throw InvalidArgumentError("scenario label must be 0 or 1");
  sc.spec.post = {parse_date(parts[2]), parse_date(parts[3])};
  sc.spec.predictor_lag = parse_date(parts[4]);
  return sc;
}

ordered_json oob_json(const OobReport& r) {
  ordered_json j;
  j["n_rows"] = r.n_rows;
  j["n_skipped"] = r.n_skipped;
  if (r.task == Task::regression) {
    j["oob_mse"] = r.oob_mse;
    j["variance_explained"] = r.variance_explained;
  } else {
    j["error_rate"] = r.error_rate;
    j["false_positive_rate"] = r.false_positive_rate;
    j["false_negative_rate"] = r.false_negative_rate;
    j["tp"] = r.tp;
    j["fp"] = r.fp;
    j["fn"] = r.fn;
    j["tn"] = r.tn;
  }
  return j;
}

struct ForestFlags {
  std::size_t trees = 500;
  std::size_t mtry = 0;
  std::size_t min_node = 0;
  bool no_bootstrap = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--trees", trees, "Number of trees")->check(CLI::PositiveNumber);
    cmd->add_option("--mtry", mtry, "Predictors sampled per split (0 = default)");
    cmd->add_option("--min-node", min_node, "Minimum node size (0 = default)");
    cmd->add_flag("--no-bootstrap", no_bootstrap, "Grow every tree on the full data");
  }

  ForestParams params(std::uint64_t seed) const {
    ForestParams p;
    p.n_trees = trees;
    p.mtry = mtry;
    p.min_node_size = min_node;
    p.seed = seed;
    p.bootstrap = !no_bootstrap;
    return p;
  }

  ordered_json to_json() const {
    return {{"trees", trees},
            {"mtry", mtry},
            {"min_node", min_node},
            {"bootstrap", !no_bootstrap}};
  }
};

// Interquartile range of each design column, the comparison scale for GA
// solution vectors.
std::map<std::string, double> column_iqr(const TrainingData& data) {
  std::map<std::string, double> out;
  for (std::size_t j = 0; j < data.n_predictors(); ++j) {
    std::vector<double> sorted = data.columns[j];
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
      const double h = q * double(sorted.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(h);
      if (lo + 1 >= sorted.size()) return sorted.back();
      return sorted[lo] + (h - double(lo)) * (sorted[lo + 1] - sorted[lo]);
    };
    out[data.predictor_names[j]] = quantile(0.75) - quantile(0.25);
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Rare-event heat-wave forecasting pipeline"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
  app.add_option("--seed", seed, "Seed governing all randomness")->capture_default_str();
  app.add_option("--threads", threads, "Worker cap; never changes results")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out-dir", out_dir, "Directory for outputs and the manifest")
      ->capture_default_str();

  // ---- synth ----------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "Generate a synthetic panel");
  std::string synth_config;
  std::string synth_out = "panel.csv";
  synth->add_option("--config", synth_config, "SynthConfig JSON file")->required();
  synth->add_option("--out", synth_out, "Panel CSV name")->capture_default_str();

  // ---- ingest ---------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "Validate and canonicalize a panel CSV");
  std::string ingest_in;
  std::string ingest_out = "panel.csv";
  std::string ingest_bbox;
  ingest->add_option("--input", ingest_in, "Raw panel CSV")->required();
  ingest->add_option("--out", ingest_out, "Canonical panel CSV name")->capture_default_str();
  ingest->add_option("--bbox", ingest_bbox,
                     "Region LATMIN,LATMAX,LONMIN,LONMAX (degrees)");

  // ---- design ---------------------------------------------------------
  auto* design = app.add_subcommand("design", "Build crossover designs");
  design->require_subcommand(1);
  auto* design_gain = design->add_subcommand("gain", "Pre/post gain-score design");
  std::string dg_panel, dg_post, dg_pre, dg_lag, dg_predictors;
  std::string dg_out = "gain.csv";
  design_gain->add_option("--panel", dg_panel, "Panel CSV")->required();
  design_gain->add_option("--post", dg_post, "Post window FIRST:LAST")->required();
  design_gain->add_option("--pre", dg_pre, "Pre window FIRST:LAST")->required();
  design_gain->add_option("--lag", dg_lag, "Predictor lag date")->required();
  design_gain->add_option("--predictors", dg_predictors, "Comma-separated variables")
      ->required();
  design_gain->add_option("--out", dg_out, "Design CSV name")->capture_default_str();

  auto* design_stack = design->add_subcommand("stack", "Stacked binary-label design");
  std::string ds_panel, ds_predictors;
  std::string ds_out = "stack.csv";
  std::vector<std::string> ds_scenarios;
  design_stack->add_option("--panel", ds_panel, "Panel CSV")->required();
  design_stack
      ->add_option("--scenario", ds_scenarios,
                   "TAG:LABEL:POST_FIRST:POST_LAST:LAG (repeatable)")
      ->required();
  design_stack->add_option("--predictors", ds_predictors, "Comma-separated variables")
      ->required();
  design_stack->add_option("--out", ds_out, "Design CSV name")->capture_default_str();

  // ---- summary --------------------------------------------------------
  auto* summary = app.add_subcommand("summary", "Gain-score distribution summary");
  std::string su_design;
  double su_bin_width = 1.0;
  std::string su_out = "summary.json";
  summary->add_option("--design", su_design, "Gain design CSV")->required();
  summary->add_option("--bin-width", su_bin_width, "Histogram bin width, Kelvin")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  summary->add_option("--out", su_out, "Summary JSON name")->capture_default_str();

  // ---- fit ------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "Train a bagged tree ensemble");
  std::string fit_design, fit_task, fit_weights;
  std::string fit_out = "forest.json";
  ForestFlags fit_flags;
  fit->add_option("--design", fit_design, "Design CSV")->required();
  fit->add_option("--task", fit_task, "regression or classification")
      ->required()
      ->check(CLI::IsMember({"regression", "classification"}));
  fit->add_option("--weights", fit_weights, "Weights JSON (from the weights subcommand)");
  fit_flags.attach(fit);
  fit->add_option("--out", fit_out, "Forest JSON name")->capture_default_str();

  // ---- importance -----------------------------------------------------
  auto* importance = app.add_subcommand("importance", "Permutation variable importance");
  std::string imp_forest, imp_design;
  std::size_t imp_repeats = 5;
  std::string imp_out = "importance.json";
  importance->add_option("--forest", imp_forest, "Forest JSON")->required();
  importance->add_option("--design", imp_design, "Training design CSV")->required();
  importance->add_option("--repeats", imp_repeats, "Shuffle repeats")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  importance->add_option("--out", imp_out, "Report JSON name")->capture_default_str();

  // ---- pdp -------------------------------------------------------------
  auto* pdp = app.add_subcommand("pdp", "Partial dependence profile");
  std::string pdp_forest, pdp_design, pdp_predictor;
  std::string pdp_mode = "mean_fixed";
  std::size_t pdp_grid = 20;
  std::string pdp_prefix = "pdp";
  pdp->add_option("--forest", pdp_forest, "Forest JSON")->required();
  pdp->add_option("--design", pdp_design, "Training design CSV")->required();
  pdp->add_option("--predictor", pdp_predictor, "Predictor name")->required();
  pdp->add_option("--grid", pdp_grid, "Grid size")->check(CLI::PositiveNumber)->capture_default_str();
  pdp->add_option("--mode", pdp_mode, "mean_fixed or average_over_data")
      ->check(CLI::IsMember({"mean_fixed", "average_over_data"}))
      ->capture_default_str();
  pdp->add_option("--out-prefix", pdp_prefix, "Output prefix")->capture_default_str();

  // ---- ga ---------------------------------------------------------------
  auto* ga = app.add_subcommand("ga", "Evolve an ideal-type synthetic population");
  std::string ga_forest, ga_design;
  std::string ga_prefix = "ga";
  GaParams ga_defaults;
  std::size_t ga_population = ga_defaults.population_size;
  std::size_t ga_iterations = ga_defaults.n_iterations;
  std::size_t ga_elitism = ga_defaults.elitism;
  double ga_crossover = ga_defaults.crossover_prob;
  double ga_mutation = ga_defaults.mutation_prob;
  ga->add_option("--forest", ga_forest, "Regression forest JSON (survival function)")
      ->required();
  ga->add_option("--design", ga_design, "Training design CSV (bounds and scales)")
      ->required();
  ga->add_option("--population", ga_population, "Population size")->capture_default_str();
  ga->add_option("--iterations", ga_iterations, "Generations")->capture_default_str();
  ga->add_option("--elitism", ga_elitism, "Members carried unchanged")->capture_default_str();
  ga->add_option("--crossover", ga_crossover, "Crossover probability")->capture_default_str();
  ga->add_option("--mutation", ga_mutation, "Per-gene mutation probability")->capture_default_str();
  ga->add_option("--out-prefix", ga_prefix, "Output prefix")->capture_default_str();

  // ---- compare -----------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "Compare two GA solution vectors");
  std::string cmp_a, cmp_b;
  std::size_t cmp_k = 3;
  std::string cmp_out = "compare.json";
  compare->add_option("--a", cmp_a, "Solution JSON")->required();
  compare->add_option("--b", cmp_b, "Solution JSON")->required();
  compare->add_option("--top-k", cmp_k, "Selection size")->capture_default_str();
  compare->add_option("--out", cmp_out, "Comparison JSON name")->capture_default_str();

  // ---- forecast -----------------------------------------------------------
  auto* forecast = app.add_subcommand(
      "forecast", "Split-sample calibration and conformal prediction sets");
  std::string fc_design, fc_eval;
  double fc_alpha = 0.25;
  double fc_split = 0.5;
  std::string fc_prefix = "forecast";
  ForestFlags fc_flags;
  forecast->add_option("--design", fc_design, "Labeled design CSV")->required();
  forecast->add_option("--alpha", fc_alpha, "Miscoverage level in (0,1)")
      ->capture_default_str();
  forecast->add_option("--split", fc_split, "Training fraction")->capture_default_str();
  forecast->add_option("--eval", fc_eval,
                       "Rows to forecast (defaults to the design itself)");
  fc_flags.attach(forecast);
  forecast->add_option("--out-prefix", fc_prefix, "Output prefix")->capture_default_str();

  // ---- coverage ------------------------------------------------------------
  auto* coverage = app.add_subcommand("coverage", "Empirical conformal coverage");
  std::string cov_conformal, cov_forest, cov_test;
  std::string cov_out = "coverage.json";
  coverage->add_option("--conformal", cov_conformal, "Conformal JSON")->required();
  coverage->add_option("--forest", cov_forest, "Forest JSON")->required();
  coverage->add_option("--test", cov_test, "Labeled test CSV")->required();
  coverage->add_option("--out", cov_out, "Coverage JSON name")->capture_default_str();

  // ---- weights ---------------------------------------------------------------
  auto* weights = app.add_subcommand("weights", "Manski-Lerman endogenous-sampling weights");
  std::string w_design;
  double w_population_prior = -1;
  std::size_t w_days = 0, w_event_days = 0;
  std::string w_out = "weights.json";
  weights->add_option("--design", w_design, "Labeled design CSV")->required();
  weights->add_option("--population-prior", w_population_prior,
                      "P(event) in the target population");
  weights->add_option("--days-in-month", w_days, "Population days (with --event-days)");
  weights->add_option("--event-days", w_event_days, "Event days in the population");
  weights->add_option("--out", w_out, "Weights JSON name")->capture_default_str();

  // ---- reweigh-report ----------------------------------------------------------
  auto* reweigh = app.add_subcommand(
      "reweigh-report", "Unweighted versus Manski-Lerman-weighted refit comparison");
  std::string rw_design;
  double rw_population_prior = -1;
  std::size_t rw_days = 0, rw_event_days = 0;
  std::string rw_out = "reweigh_report.json";
  ForestFlags rw_flags;
  reweigh->add_option("--design", rw_design, "Labeled design CSV")->required();
  reweigh->add_option("--population-prior", rw_population_prior,
                      "P(event) in the target population");
  reweigh->add_option("--days-in-month", rw_days, "Population days (with --event-days)");
  reweigh->add_option("--event-days", rw_event_days, "Event days in the population");
  rw_flags.attach(reweigh);
  reweigh->add_option("--out", rw_out, "Report JSON name")->capture_default_str();

  // Global flags are accepted before or after the subcommand.
  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands([](CLI::App*) { return true; })) {
      nested->fallthrough();
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    Manifest manifest;
    manifest.argv = args;
    manifest.seed = seed;
    manifest.threads = threads;

    const auto resolve_prior = [](const LabeledDataset& data, double direct,
                                  std::size_t days, std::size_t event_days) {
      if (direct >= 0) {
        PriorSpec prior;
        prior.population_prior = direct;
        std::size_t ones = 0;
        for (const auto& row : data.rows) ones += row.label == 1 ? 1 : 0;
        prior.sample_prior = double(ones) / double(data.rows.size());
        return prior;
      }
      if (days == 0) {
        throw InvalidArgumentError(
            "need --population-prior or --days-in-month/--event-days");
      }
      return scenario_prior(data, {days, event_days});
    };

    if (*synth) {
      manifest.subcommand = "synth";
      manifest.inputs = {synth_config};
      SynthConfig config = SynthConfig::from_json(slurp_json(synth_config));
      if (app.count("--seed") > 0) config.seed = seed;
      const auto [panel, truth] = generate(config);
      const auto panel_path = dir / synth_out;
      write_panel(panel, panel_path.string());
      dump_json(truth.to_json(), dir / "ground_truth.json");
      manifest.outputs = {panel_path.string(), (dir / "ground_truth.json").string()};
      manifest.parameters = config.to_json();
      manifest.results = {{"n_observations", panel.size()},
                          {"n_missing", truth.missing_keys.size()}};
      manifest.write(dir);
    } else if (*ingest) {
      manifest.subcommand = "ingest";
      manifest.inputs = {ingest_in};
      Panel panel = load_panel(ingest_in);
      if (!ingest_bbox.empty()) {
        const auto parts = csv::split(ingest_bbox);
        if (parts.size() != 4) {
          throw InvalidArgumentError("--bbox needs LATMIN,LATMAX,LONMIN,LONMAX");
        }
        const BoundingBox bbox{
            csv::parse_double(parts[0], "bbox"), csv::parse_double(parts[1], "bbox"),
            csv::parse_double(parts[2], "bbox"), csv::parse_double(parts[3], "bbox")};
        panel = select_region(panel, bbox);
        manifest.parameters["bbox"] = {bbox.lat_min, bbox.lat_max, bbox.lon_min,
                                       bbox.lon_max};
      }
      const auto out_path = dir / ingest_out;
      write_panel(panel, out_path.string());
      manifest.outputs = {out_path.string()};
      manifest.results = {{"n_observations", panel.size()},
                          {"n_cells", panel.cells().size()}};
      manifest.write(dir);
    } else if (*design_gain) {
      manifest.subcommand = "design gain";
      manifest.inputs = {dg_panel};
      const Panel panel = load_panel(dg_panel);
      WindowSpec spec;
      spec.post = parse_range(dg_post);
      spec.pre = parse_range(dg_pre);
      spec.predictor_lag = parse_date(dg_lag);
      const auto vars = Variable::parse_list(dg_predictors);
      const GainDataset g = build_gain_design(panel, spec, vars);
      const auto out_path = dir / dg_out;
      write_csv(g, out_path.string());
      manifest.outputs = {out_path.string()};
      manifest.parameters = {{"post", dg_post}, {"pre", dg_pre}, {"lag", dg_lag},
                             {"predictors", dg_predictors}};
      manifest.results = {{"n_rows", g.rows.size()},
                          {"n_cells_dropped", g.n_cells_dropped}};
      manifest.write(dir);
    } else if (*design_stack) {
      manifest.subcommand = "design stack";
      manifest.inputs = {ds_panel};
      const Panel panel = load_panel(ds_panel);
      std::vector<Scenario> scenarios;
      for (const auto& s : ds_scenarios) {
        Scenario sc = parse_scenario(s);
        sc.panel = &panel;
        scenarios.push_back(std::move(sc));
      }
      const auto vars = Variable::parse_list(ds_predictors);
      const LabeledDataset stack = build_crossover_classification(scenarios, vars);
      const auto out_path = dir / ds_out;
      write_csv(stack, out_path.string());
      manifest.outputs = {out_path.string()};
      manifest.parameters = {{"scenarios", ds_scenarios}, {"predictors", ds_predictors}};
      manifest.results = {{"n_rows", stack.rows.size()},
                          {"n_cells_dropped", stack.n_cells_dropped}};
      manifest.write(dir);
    } else if (*summary) {
      manifest.subcommand = "summary";
      manifest.inputs = {su_design};
      const GainDataset g = read_gain_csv(su_design);
      const GainSummary s = gain_summary(g, su_bin_width);
      ordered_json j;
      j["n"] = s.n;
      j["mean"] = s.mean;
      j["n_negative"] = s.n_negative;
      j["bin_width"] = s.bin_width;
      auto bins = ordered_json::array();
      for (const auto& b : s.histogram) bins.push_back({b.lower, b.upper, b.count});
      j["histogram"] = std::move(bins);
      const auto out_path = dir / su_out;
      dump_json(j, out_path);
      manifest.outputs = {out_path.string()};
      manifest.parameters = {{"bin_width", su_bin_width}};
      manifest.results = {{"n", s.n}, {"mean", s.mean}, {"n_negative", s.n_negative}};
      manifest.write(dir);
    } else if (*fit) {
      manifest.subcommand = "fit";
      manifest.inputs = {fit_design};
      std::vector<double> case_weights;
      if (!fit_weights.empty()) {
        manifest.inputs.push_back(fit_weights);
        case_weights = slurp_json(fit_weights).at("weights").get<std::vector<double>>();
      }
      const ForestParams params = fit_flags.params(seed);
      Forest forest;
      OobReport oob;
      if (fit_task == "regression") {
        const GainDataset g = read_gain_csv(fit_design);
        forest = Forest::fit(g, params, case_weights, threads);
        oob = oob_report(forest, g);
      } else {
        const LabeledDataset l = read_labeled_csv(fit_design);
        forest = Forest::fit(l, params, case_weights, threads);
        oob = oob_report(forest, l);
      }
      const auto out_path = dir / fit_out;
      forest.save(out_path.string());
      manifest.outputs = {out_path.string()};
      manifest.parameters = fit_flags.to_json();
      manifest.parameters["task"] = fit_task;
      manifest.results = oob_json(oob);
      manifest.results["fingerprint"] = hex64(forest.fingerprint());
      manifest.write(dir);
    } else if (*importance) {
      manifest.subcommand = "importance";
      manifest.inputs = {imp_forest, imp_design};
      const Forest forest = Forest::load(imp_forest);
      const TrainingData data =
          forest.task() == Task::regression
              ? TrainingData::from(read_gain_csv(imp_design))
              : TrainingData::from(read_labeled_csv(imp_design));
      const ImportanceReport report =
          permutation_importance(forest, data, imp_repeats, seed);
      const auto out_path = dir / imp_out;
      dump_json(report.to_json(), out_path);
      manifest.outputs = {out_path.string()};
      manifest.parameters = {{"repeats", imp_repeats}};
      manifest.results = {{"top_predictor", report.entries.front().predictor}};
      manifest.write(dir);
    } else if (*pdp) {
      manifest.subcommand = "pdp";
      manifest.inputs = {pdp_forest, pdp_design};
      const Forest forest = Forest::load(pdp_forest);
      const TrainingData data =
          forest.task() == Task::regression
              ? TrainingData::from(read_gain_csv(pdp_design))
              : TrainingData::from(read_labeled_csv(pdp_design));
      const PdpMode mode = pdp_mode == "mean_fixed" ? PdpMode::mean_fixed
                                                    : PdpMode::average_over_data;
      const PdpProfile profile =
          partial_dependence(forest, data, pdp_predictor, pdp_grid, mode);
      const auto json_path = dir / (pdp_prefix + ".json");
      const auto csv_path = dir / (pdp_prefix + ".csv");
      dump_json(profile.to_json(), json_path);
      profile.write_csv(csv_path.string());
      manifest.outputs = {json_path.string(), csv_path.string()};
      manifest.parameters = {{"predictor", pdp_predictor},
                             {"grid", pdp_grid},
                             {"mode", pdp_mode}};
      manifest.write(dir);
    } else if (*ga) {
      manifest.subcommand = "ga";
      manifest.inputs = {ga_forest, ga_design};
      const Forest survival = Forest::load(ga_forest);
      const TrainingData data = TrainingData::from(read_gain_csv(ga_design));
      if (data.predictor_names != survival.predictor_names()) {
        throw PredictorSetMismatchError("design predictors do not match the forest");
      }
      GaParams params;
      params.population_size = ga_population;
      params.n_iterations = ga_iterations;
      params.elitism = ga_elitism;
      params.crossover_prob = ga_crossover;
      params.mutation_prob = ga_mutation;
      params.bounds = GaParams::bounds_from(data);
      params.seed = seed;
      const SyntheticPopulation pop = evolve(survival, params, threads);
      SolutionVector solution = solution_vector(pop);
      solution.scale = column_iqr(data);

      const auto pop_path = dir / (ga_prefix + "_population.json");
      const auto sol_path = dir / (ga_prefix + "_solution.json");
      const auto hist_path = dir / (ga_prefix + "_history.csv");
      auto pop_json = pop.to_json();
      pop_json["predictor_correlation"] = predictor_correlation(pop);
      dump_json(pop_json, pop_path);
      dump_json(solution.to_json(), sol_path);
      pop.write_history_csv(hist_path.string());
      manifest.outputs = {pop_path.string(), sol_path.string(), hist_path.string()};
      manifest.parameters = {{"population", ga_population},
                             {"iterations", ga_iterations},
                             {"elitism", ga_elitism},
                             {"crossover", ga_crossover},
                             {"mutation", ga_mutation}};
      manifest.results = {{"mean_fitness", solution.mean_fitness},
                          {"best_fitness", pop.history.back().first}};
      manifest.write(dir);
    } else if (*compare) {
      manifest.subcommand = "compare";
      manifest.inputs = {cmp_a, cmp_b};
      const SolutionVector a = SolutionVector::from_json(slurp_json(cmp_a));
      const SolutionVector b = SolutionVector::from_json(slurp_json(cmp_b));
      const auto entries = compare_solutions(a, b, cmp_k);
      ordered_json j;
      j["top_k"] = cmp_k;
      j["entries"] = comparison_to_json(entries);
      const auto out_path = dir / cmp_out;
      dump_json(j, out_path);
      manifest.outputs = {out_path.string()};
      manifest.parameters = {{"top_k", cmp_k}};
      manifest.write(dir);
    } else if (*forecast) {
      manifest.subcommand = "forecast";
      manifest.inputs = {fc_design};
      const LabeledDataset data = read_labeled_csv(fc_design);
      const SplitOutcome out = split_train_calibrate(
          data, fc_split, fc_flags.params(seed), fc_alpha, seed, threads);

      const LabeledDataset* eval = &data;
      LabeledDataset eval_store;
      if (!fc_eval.empty()) {
        manifest.inputs.push_back(fc_eval);
        eval_store = read_labeled_csv(fc_eval);
        if (eval_store.predictor_names != data.predictor_names) {
          throw MissingPredictorError(
              "--eval predictors do not match the design");
        }
        eval = &eval_store;
      }
      auto sets = ordered_json::array();
      std::size_t singleton_count = 0;
      for (const auto& row : eval->rows) {
        const PredictionSet set = predict_set(out.predictor, out.forest, row.predictors);
        ordered_json record;
        record["cell"] = {row.cell.lat_index, row.cell.lon_index};
        record["scenario"] = row.scenario;
        auto members = ordered_json::array();
        if (set.members[0]) members.push_back(0);
        if (set.members[1]) members.push_back(1);
        record["set"] = std::move(members);
        record["scores"] = {{"0", set.scores[0]}, {"1", set.scores[1]}};
        sets.push_back(std::move(record));
        singleton_count += set.size() == 1 ? 1 : 0;
      }

      const auto forest_path = dir / (fc_prefix + "_forest.json");
      const auto conf_path = dir / (fc_prefix + "_conformal.json");
      const auto sets_path = dir / (fc_prefix + "_sets.json");
      out.forest.save(forest_path.string());
      dump_json(out.predictor.to_json(), conf_path);
      dump_json(sets, sets_path);
      manifest.outputs = {forest_path.string(), conf_path.string(), sets_path.string()};
      manifest.parameters = fc_flags.to_json();
      manifest.parameters["alpha"] = fc_alpha;
      manifest.parameters["split"] = fc_split;
      manifest.results = {{"n_train", out.train_rows.size()},
                          {"n_calibration", out.calibration_rows.size()},
                          {"threshold", std::isinf(out.predictor.threshold)
                                            ? ordered_json("inf")
                                            : ordered_json(out.predictor.threshold)},
                          {"n_forecast", eval->rows.size()},
                          {"n_singleton", singleton_count}};
      manifest.write(dir);
    } else if (*coverage) {
      manifest.subcommand = "coverage";
      manifest.inputs = {cov_conformal, cov_forest, cov_test};
      const ConformalPredictor cp = ConformalPredictor::from_json(slurp_json(cov_conformal));
      const Forest forest = Forest::load(cov_forest);
      const LabeledDataset test = read_labeled_csv(cov_test);
      const auto [cov, mean_size] = empirical_coverage(cp, forest, test);
      ordered_json j;
      j["coverage"] = cov;
      j["mean_set_size"] = mean_size;
      j["n"] = test.rows.size();
      j["alpha"] = cp.alpha;
      const auto out_path = dir / cov_out;
      dump_json(j, out_path);
      manifest.outputs = {out_path.string()};
      manifest.results = {{"coverage", cov}, {"mean_set_size", mean_size}};
      manifest.write(dir);
    } else if (*weights) {
      manifest.subcommand = "weights";
      manifest.inputs = {w_design};
      const LabeledDataset data = read_labeled_csv(w_design);
      const PriorSpec prior = resolve_prior(data, w_population_prior, w_days, w_event_days);
      std::vector<int> labels;
      for (const auto& row : data.rows) labels.push_back(row.label);
      const WeightVector wv = manski_lerman_weights(labels, prior);
      ordered_json j;
      j["prior"] = prior.to_json();
      j["class_weight_1"] = wv.class_weight_1;
      j["class_weight_0"] = wv.class_weight_0;
      j["weights"] = wv.weights;
      const auto out_path = dir / w_out;
      dump_json(j, out_path);
      manifest.outputs = {out_path.string()};
      manifest.results = {{"class_weight_1", wv.class_weight_1},
                          {"class_weight_0", wv.class_weight_0}};
      manifest.write(dir);
    } else if (*reweigh) {
      manifest.subcommand = "reweigh-report";
      manifest.inputs = {rw_design};
      const LabeledDataset data = read_labeled_csv(rw_design);
      const PriorSpec prior =
          resolve_prior(data, rw_population_prior, rw_days, rw_event_days);
      const WeightedRefitReport report =
          weighted_refit_report(data, prior, rw_flags.params(seed), threads);
      ordered_json j = report.to_json();
      j["prior"] = prior.to_json();
      const auto out_path = dir / rw_out;
      dump_json(j, out_path);
      manifest.outputs = {out_path.string()};
      manifest.parameters = rw_flags.to_json();
      manifest.results = {{"unweighted_error", report.unweighted.error_rate},
                          {"weighted_error", report.weighted.error_rate}};
      manifest.write(dir);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace heatwave::cli
