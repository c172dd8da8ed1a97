#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"

namespace svkit {

// One flat bag of run settings. Resolution order: built-in defaults, then a
// JSON config file, then explicit flag overrides.
struct RunConfig {
  // game
  std::string task = "DV";
  std::string dataset = "blobs2";  // csv path or synthetic "blobs2"/"blobs4"
  std::string label_column;
  int rows = 120;      // synthetic datasets
  int features = 8;    // synthetic datasets
  double train_fraction = 0.7;
  int players = 0;     // 0 = task default
  bool use_knn = false;
  int knn_k = 5;
  int explicand = 0;
  double learning_rate = 0.1;
  int epochs = 30;
  int max_batch = 256;

  // pipeline selections
  std::string estimator = "MC";
  std::string sampling = "random";
  std::string optimization = "None";
  std::string privacy = "None";

  // optimizer knobs
  double tc_ratio = 0.9;
  int ga_epochs = 1;
  double tss_quantile = 0.2;

  // privacy knobs; counts accept "12" or "0.5n" (fraction of players,
  // rounded up)
  double dp_sigma = 0.1;
  std::string qt_levels = "0.5n";
  std::string dr_keep = "0.5n";

  // convergence
  double tau = 0.05;
  std::uint64_t max_evals = 1000000;
  int convergence_window = 5;

  // estimator budgets
  std::uint64_t mc_marginals = 0;
  std::uint64_t re_samples = 4000;
  double re_ridge = 1e-9;
  int mle_grid = 20;
  int mle_samples_per_q = 2;
  std::uint64_t gt_tests = 4000;
  double gt_epsilon = 0.05;
  std::uint64_t cp_permutations = 2000;
  double cp_sparsity_weight = 1e-3;
  int cp_measurements = 0;
  int cp_sparsity_guess = 0;
  bool exhaustive = false;
  bool force_exact = false;

  // run
  std::uint64_t seed = 42;
  std::string output;      // json report path; empty = skip
  std::string output_csv;  // csv values path; empty = skip
  bool omit_timing = false;
};

// All recognized keys, in declaration order; unknown keys throw.
void apply_config_value(RunConfig& cfg, const std::string& key,
                        const nlohmann::json& value);

// JSON object of settings; unknown keys throw std::invalid_argument.
void apply_config_file(RunConfig& cfg, const std::string& path);

// flag > file > default
RunConfig resolve_config(const std::string& config_path,
                         const std::map<std::string, nlohmann::json>& flag_overrides);

// "12" or "0.5n"; fractions resolve against n rounded up, minimum 1
int parse_relative_count(const std::string& text, int n);

}  // namespace svkit
