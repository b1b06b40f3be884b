#include "heatwave/cli.hpp"

#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

namespace {

using heatwave::cli::run;

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

// Small dome panel; the effects entry decides what signal gets planted.
std::string synth_config_json(unsigned seed, const std::string& effects) {
  return std::string(R"({
    "n_lat": 6, "n_lon": 6,
    "date_span": {"first": "2021-06-01", "last": "2021-07-31"},
    "dome_window": {"first": "2021-06-27", "last": "2021-06-30"},
    "dome_amplitude": 6.0,
    "noise_sigma": 1.0,
    "predictor_effects": )") +
         effects + ", \"seed\": " + std::to_string(seed) + "}";
}

const char* kLinearEffect =
    R"([{"variable": "temp_8", "link": "linear", "coefficient": 2.0}])";
const char* kSigmoidEffect =
    R"([{"variable": "temp_8", "link": "sigmoid", "coefficient": 16.0,
         "center": 233.5, "scale": 0.5}])";

}  // namespace

TEST_CASE("unknown subcommands and bad usage exit with code 1") {
  CHECK(run({"frobnicate"}) == 1);
  CHECK(run({}) == 1);
  CHECK(run({"fit"}) == 1);                      // missing required options
  CHECK(run({"fit", "--design", "x", "--task", "nope"}) == 1);
}

TEST_CASE("data errors exit with code 2") {
  test_util::TempDir dir;
  CHECK(run({"--out-dir", dir.file("out"), "ingest", "--input",
             dir.file("missing.csv")}) == 2);
  test_util::write_file(dir.file("bad.json"), "{}");
  CHECK(run({"--out-dir", dir.file("out"), "synth", "--config",
             dir.file("bad.json")}) == 2);
}

TEST_CASE("regression pipeline: synth, design, fit, importance, pdp, ga, compare") {
  test_util::TempDir dir;
  const std::string out = dir.file("run");
  test_util::write_file(dir.file("config.json"), synth_config_json(3, kLinearEffect));

  REQUIRE(run({"--out-dir", out, "synth", "--config", dir.file("config.json")}) == 0);
  const std::string panel = out + "/panel.csv";

  REQUIRE(run({"--out-dir", out, "design", "gain", "--panel", panel,
               "--post", "2021-06-27:2021-06-30", "--pre", "2021-06-23:2021-06-26",
               "--lag", "2021-06-13",
               "--predictors", "temp_8,trop_height,mmr_8"}) == 0);
  const std::string gain = out + "/gain.csv";

  REQUIRE(run({"--out-dir", out, "--seed", "7", "fit", "--design", gain,
               "--task", "regression", "--trees", "60"}) == 0);
  const auto fit_manifest = read_json(out + "/fit.manifest.json");
  CHECK(fit_manifest["results"].contains("variance_explained"));
  CHECK(fit_manifest["subcommand"] == "fit");

  REQUIRE(run({"--out-dir", out, "--seed", "7", "summary", "--design", gain,
               "--bin-width", "1.0"}) == 0);
  const auto summary = read_json(out + "/summary.json");
  std::size_t total = 0;
  for (const auto& bin : summary["histogram"]) total += bin[2].get<std::size_t>();
  CHECK(total == summary["n"].get<std::size_t>());

  REQUIRE(run({"--out-dir", out, "--seed", "9", "importance", "--forest",
               out + "/forest.json", "--design", gain, "--repeats", "3"}) == 0);
  const auto imp = read_json(out + "/importance.json");
  CHECK(imp["metric"] == "pct_inc_mse");
  CHECK(imp["entries"].size() == 3);

  REQUIRE(run({"--out-dir", out, "pdp", "--forest", out + "/forest.json",
               "--design", gain, "--predictor", "temp_8", "--grid", "10"}) == 0);
  const auto pdp = read_json(out + "/pdp.json");
  CHECK(pdp["grid"].size() == pdp["response"].size());

  REQUIRE(run({"--out-dir", out, "--seed", "5", "ga", "--forest",
               out + "/forest.json", "--design", gain, "--population", "20",
               "--iterations", "30"}) == 0);
  const auto solution = read_json(out + "/ga_solution.json");
  CHECK(solution["values"].size() == 3);
  CHECK(solution["scale"].size() == 3);

  REQUIRE(run({"--out-dir", out, "compare", "--a", out + "/ga_solution.json",
               "--b", out + "/ga_solution.json", "--top-k", "2"}) == 0);
  const auto cmp = read_json(out + "/compare.json");
  for (const auto& e : cmp["entries"]) CHECK(e["selected"] == false);
}

TEST_CASE("classification pipeline: stack, fit, forecast, coverage, weights") {
  test_util::TempDir dir;
  const std::string out = dir.file("run");
  // strong separation so the conformal illustration gives singletons
  test_util::write_file(dir.file("config.json"),
                        synth_config_json(11, kSigmoidEffect));
  REQUIRE(run({"--out-dir", out, "synth", "--config", dir.file("config.json")}) == 0);
  const std::string panel = out + "/panel.csv";

  REQUIRE(run({"--out-dir", out, "design", "stack", "--panel", panel,
               "--scenario", "june:1:2021-06-27:2021-06-30:2021-06-13",
               "--scenario", "july:0:2021-07-27:2021-07-30:2021-07-13",
               "--predictors", "temp_8,trop_height,mmr_8"}) == 0);
  const std::string stack = out + "/stack.csv";
  const auto stack_manifest = read_json(out + "/design-stack.manifest.json");
  CHECK(stack_manifest["results"]["n_rows"] == 72);

  REQUIRE(run({"--out-dir", out, "--seed", "2", "fit", "--design", stack,
               "--task", "classification", "--trees", "80"}) == 0);
  const auto fit_manifest = read_json(out + "/fit.manifest.json");
  CHECK(fit_manifest["results"]["error_rate"].get<double>() < 0.25);

  REQUIRE(run({"--out-dir", out, "--seed", "3", "forecast", "--design", stack,
               "--alpha", "0.25", "--trees", "100", "--mtry", "3"}) == 0);
  const auto sets = read_json(out + "/forecast_sets.json");
  CHECK(sets.size() == 72);
  std::size_t singletons = 0;
  for (const auto& record : sets) singletons += record["set"].size() == 1 ? 1 : 0;
  CHECK(double(singletons) / 72.0 > 0.9);

  REQUIRE(run({"--out-dir", out, "coverage", "--conformal",
               out + "/forecast_conformal.json", "--forest",
               out + "/forecast_forest.json", "--test", stack}) == 0);
  const auto coverage = read_json(out + "/coverage.json");
  CHECK(coverage["coverage"].get<double>() >= 0.75);

  REQUIRE(run({"--out-dir", out, "weights", "--design", stack,
               "--days-in-month", "30", "--event-days", "4"}) == 0);
  const auto weights = read_json(out + "/weights.json");
  CHECK(weights["prior"]["sample_prior"] == 0.5);
  CHECK(weights["weights"].size() == 72);

  REQUIRE(run({"--out-dir", out, "--seed", "6", "reweigh-report", "--design",
               stack, "--population-prior", "0.133", "--trees", "60"}) == 0);
  const auto report = read_json(out + "/reweigh_report.json");
  CHECK(report.contains("unweighted"));
  CHECK(report.contains("implied_fp_cost_after"));
}

TEST_CASE("fixed seeds give byte-identical primary outputs") {
  test_util::TempDir dir;
  test_util::write_file(dir.file("config.json"), synth_config_json(21, kLinearEffect));

  const auto chain = [&](const std::string& out, const char* threads) {
    REQUIRE(run({"--out-dir", out, "synth", "--config", dir.file("config.json")}) == 0);
    REQUIRE(run({"--out-dir", out, "design", "gain", "--panel", out + "/panel.csv",
                 "--post", "2021-06-27:2021-06-30", "--pre", "2021-06-23:2021-06-26",
                 "--lag", "2021-06-13", "--predictors", "temp_8,trop_height"}) == 0);
    REQUIRE(run({"--out-dir", out, "--seed", "4", "--threads", threads, "fit",
                 "--design", out + "/gain.csv", "--task", "regression",
                 "--trees", "50"}) == 0);
  };
  chain(dir.file("a"), "1");
  chain(dir.file("b"), "4");

  CHECK(test_util::read_file(dir.file("a") + "/panel.csv") ==
        test_util::read_file(dir.file("b") + "/panel.csv"));
  CHECK(test_util::read_file(dir.file("a") + "/gain.csv") ==
        test_util::read_file(dir.file("b") + "/gain.csv"));
  CHECK(test_util::read_file(dir.file("a") + "/forest.json") ==
        test_util::read_file(dir.file("b") + "/forest.json"));
}
