#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "svkit/pipeline.hpp"

using namespace svkit;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/svkit_" + name;
  std::ofstream f(path);
  f << body;
  return path;
}

}  // namespace

TEST_CASE("relative counts resolve against the player count") {
  CHECK(parse_relative_count("12", 8) == 12);
  CHECK(parse_relative_count("0.5n", 8) == 4);
  CHECK(parse_relative_count("0.5n", 7) == 4);  // rounds up
  CHECK(parse_relative_count("0.01n", 8) == 1);
  CHECK(parse_relative_count("2n", 3) == 6);

  CHECK_THROWS_AS(parse_relative_count("", 8), std::invalid_argument);
  CHECK_THROWS_AS(parse_relative_count("abc", 8), std::invalid_argument);
  CHECK_THROWS_AS(parse_relative_count("0", 8), std::invalid_argument);
  CHECK_THROWS_AS(parse_relative_count("-3", 8), std::invalid_argument);
  CHECK_THROWS_AS(parse_relative_count("1.5", 8), std::invalid_argument);
  CHECK_THROWS_AS(parse_relative_count("-0.5n", 8), std::invalid_argument);
}

TEST_CASE("config values coerce across json types") {
  RunConfig cfg;
  apply_config_value(cfg, "tau", json("0.1"));
  CHECK(cfg.tau == doctest::Approx(0.1));
  apply_config_value(cfg, "use_knn", json("yes"));
  CHECK(cfg.use_knn);
  apply_config_value(cfg, "use_knn", json(0));
  CHECK_FALSE(cfg.use_knn);
  apply_config_value(cfg, "seed", json(7));
  CHECK(cfg.seed == 7);
  apply_config_value(cfg, "optimization_strategy", json("TC+GA"));
  CHECK(cfg.optimization == "TC+GA");
  apply_config_value(cfg, "privacy_protection_measure", json("DP"));
  CHECK(cfg.privacy == "DP");

  CHECK_THROWS_AS(apply_config_value(cfg, "no_such_key", json(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_config_value(cfg, "rows", json(1.5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_config_value(cfg, "max_evals", json(-1)),
                  std::invalid_argument);
}

TEST_CASE("config files load and validate") {
  const auto path =
      write_temp("cfg.json", R"({"task":"DSV","rows":64,"tau":0.02})");
  RunConfig cfg;
  apply_config_file(cfg, path);
  CHECK(cfg.task == "DSV");
  CHECK(cfg.rows == 64);
  CHECK(cfg.tau == doctest::Approx(0.02));
  CHECK(cfg.features == 8);  // untouched default
  std::remove(path.c_str());

  CHECK_THROWS_AS(apply_config_file(cfg, "/tmp/svkit_missing_cfg.json"),
                  std::invalid_argument);
  const auto arr = write_temp("cfg_arr.json", "[1,2]");
  CHECK_THROWS_AS(apply_config_file(cfg, arr), std::invalid_argument);
  std::remove(arr.c_str());
}

TEST_CASE("flags override the config file which overrides defaults") {
  const auto path = write_temp("cfg_prec.json", R"({"rows":64,"seed":9})");
  const RunConfig cfg = resolve_config(path, {{"rows", json(32)}});
  CHECK(cfg.rows == 32);   // flag wins
  CHECK(cfg.seed == 9);    // file wins over default
  CHECK(cfg.task == "DV"); // default
  std::remove(path.c_str());
}

TEST_CASE("settings builders map the run config onto module options") {
  RunConfig cfg;
  cfg.sampling = "antithetic";
  cfg.optimization = "TC+GA";
  cfg.tau = 0.01;
  cfg.tc_ratio = 0.8;
  const EstimatorSettings s = estimator_settings_from(cfg);
  CHECK(s.sampler.strategy == SampleStrategy::antithetic);
  CHECK(s.optimization.tc.enabled);
  CHECK(s.optimization.ga.enabled);
  CHECK_FALSE(s.optimization.tss.enabled);
  CHECK(s.optimization.tc.ratio == doctest::Approx(0.8));
  CHECK(s.convergence.tau == doctest::Approx(0.01));

  cfg.privacy = "QT";
  const PrivacyConfig p = privacy_config_from(cfg, 7);
  CHECK(p.kind == PrivacyKind::qt);
  CHECK(p.qt_levels == 4);
  CHECK(p.dr_keep == 4);

  cfg.rows = 40;
  cfg.train_fraction = 0.7;
  const SplitTable data = load_run_data(cfg);
  CHECK(data.train.n_rows() == 28);
  CHECK(data.test.n_rows() == 12);
}

TEST_CASE("the pipeline runs a tuple-valuation task end to end") {
  RunConfig cfg;
  cfg.task = "DV";
  cfg.use_knn = true;
  cfg.estimator = "exact";
  cfg.rows = 40;
  cfg.features = 3;
  cfg.players = 6;
  const RunOutput out = run_pipeline(cfg);
  CHECK(out.n_players == 6);
  CHECK(out.game_label == "DV(n=6)");
  CHECK(out.player_kind == "tuple");
  REQUIRE(out.result.values.size() == 6);
  CHECK(out.released.values == out.result.values);  // no masking configured
  CHECK(out.released.suppressed.empty());
  CHECK(out.result.n_uc == 63);
  CHECK(out.utility_calls == out.result.n_uc);
  CHECK(out.pipeline_warnings.empty());
}

TEST_CASE("inapplicable optimizations surface as warnings") {
  RunConfig cfg;
  cfg.task = "RI";
  cfg.estimator = "MC";
  cfg.rows = 40;
  cfg.features = 4;
  cfg.mc_marginals = 40;
  cfg.optimization = "TC+GA+TSS";
  const RunOutput out = run_pipeline(cfg);
  REQUIRE(out.pipeline_warnings.size() == 2);
  CHECK(out.pipeline_warnings[0].find("GA inapplicable") != std::string::npos);
  CHECK(out.pipeline_warnings[1].find("TSS inapplicable") != std::string::npos);
}

TEST_CASE("applicable optimizations run silently") {
  RunConfig cfg;
  cfg.task = "DV";
  cfg.estimator = "MC";
  cfg.rows = 40;
  cfg.features = 3;
  cfg.players = 5;
  cfg.epochs = 5;
  cfg.mc_marginals = 40;
  cfg.optimization = "GA";
  const RunOutput out = run_pipeline(cfg);
  CHECK(out.pipeline_warnings.empty());
}

TEST_CASE("the json report is structured and timing can be zeroed") {
  RunConfig cfg;
  cfg.task = "DV";
  cfg.use_knn = true;
  cfg.estimator = "exact";
  cfg.rows = 40;
  cfg.features = 3;
  cfg.players = 5;
  cfg.omit_timing = true;

  const auto doc_a = output_json(run_pipeline(cfg));
  const auto doc_b = output_json(run_pipeline(cfg));
  CHECK(doc_a.dump() == doc_b.dump());  // repeat runs byte-identical

  CHECK(doc_a["run"]["task"] == "DV");
  CHECK(doc_a["run"]["estimator"] == "exact");
  CHECK(doc_a["run"]["players"] == 5);
  CHECK(doc_a["values"].size() == 5);
  CHECK(doc_a["raw_values"].size() == 5);
  CHECK(doc_a["diagnostics"]["n_uc"] == 31);
  CHECK(doc_a["diagnostics"]["wall_seconds"] == 0.0);
  CHECK(doc_a["diagnostics"]["train_seconds"] == 0.0);
  CHECK(doc_a.contains("trace"));
}

TEST_CASE("report files are written where the config points") {
  RunConfig cfg;
  cfg.task = "DV";
  cfg.use_knn = true;
  cfg.estimator = "MC";  // DR ranks by marginal variance, a sampling statistic
  cfg.mc_marginals = 200;
  cfg.rows = 40;
  cfg.features = 3;
  cfg.players = 4;
  cfg.privacy = "DR";
  cfg.dr_keep = "2";
  cfg.output = "/tmp/svkit_out.json";
  cfg.output_csv = "/tmp/svkit_out.csv";

  const RunOutput out = run_pipeline(cfg);
  write_output(out);

  std::ifstream jf(cfg.output);
  REQUIRE(jf.good());
  json doc;
  jf >> doc;
  CHECK(doc["values"].size() == 4);
  CHECK(doc["suppressed"].size() == 4);
  int kept = 0;
  for (bool b : doc["suppressed"]) kept += b ? 0 : 1;
  CHECK(kept == 2);

  std::ifstream cf(cfg.output_csv);
  REQUIRE(cf.good());
  std::string header;
  std::getline(cf, header);
  CHECK(header == "player,value,raw_value,suppressed");
  int rows = 0;
  for (std::string line; std::getline(cf, line) && !line.empty();) ++rows;
  CHECK(rows == 4);
  std::remove(cfg.output.c_str());
  std::remove(cfg.output_csv.c_str());
}

TEST_CASE("csv rows carry suppression flags") {
  RunOutput out;
  out.result.values = {1.0, 2.0};
  out.released.values = {0.0, 2.0};
  out.released.suppressed = {true, false};
  const std::string csv = values_csv(out);
  CHECK(csv.find("0,0.0,1.0,1\n") != std::string::npos);
  CHECK(csv.find("1,2.0,2.0,0\n") != std::string::npos);
}
