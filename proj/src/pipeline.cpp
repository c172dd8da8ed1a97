#include "svkit/pipeline.hpp"

#include <fstream>
#include <stdexcept>

#include "svkit/optimizers.hpp"

namespace svkit {

namespace {

std::vector<TracePoint> thin_trace(const std::vector<TracePoint>& trace,
                                   std::size_t cap = 512) {
  if (trace.size() <= cap) return trace;
  std::vector<TracePoint> out;
  out.reserve(cap);
  // evenly spaced, always keeping the final point
  for (std::size_t k = 0; k < cap; ++k) {
    const std::size_t idx = k * (trace.size() - 1) / (cap - 1);
    out.push_back(trace[idx]);
  }
  return out;
}

}  // namespace

SplitTable load_run_data(const RunConfig& cfg) {
  Table full;
  if (cfg.dataset == "blobs2" || cfg.dataset == "blobs4") {
    full = make_blobs(cfg.dataset, cfg.rows, cfg.features, hash_combine(cfg.seed, 0xb10b));
  } else {
    full = load_table(cfg.dataset, cfg.label_column);
  }
  return split(full, cfg.train_fraction, hash_combine(cfg.seed, 0x5b11));
}

GameOptions game_options_from(const RunConfig& cfg) {
  GameOptions opt;
  opt.budget.epochs = cfg.epochs;
  opt.budget.max_batch = cfg.max_batch;
  opt.learning_rate = cfg.learning_rate;
  opt.n_players = cfg.players;
  opt.use_knn = cfg.use_knn;
  opt.knn_k = cfg.knn_k;
  opt.explicand_index = cfg.explicand;
  return opt;
}

EstimatorSettings estimator_settings_from(const RunConfig& cfg) {
  EstimatorSettings s;
  s.sampler.strategy = strategy_from_string(cfg.sampling);
  OptimizerConfig oc = OptimizerConfig::from_string(cfg.optimization);
  oc.tc.ratio = cfg.tc_ratio;
  oc.ga.budget.epochs = cfg.ga_epochs;
  oc.ga.budget.max_batch = cfg.max_batch;
  oc.tss.quantile = cfg.tss_quantile;
  s.optimization = oc;
  s.convergence.tau = cfg.tau;
  s.convergence.max_evals = cfg.max_evals;
  s.convergence.window = cfg.convergence_window;
  s.exhaustive = cfg.exhaustive;
  s.force_exact = cfg.force_exact;
  s.mc_max_marginals = cfg.mc_marginals;
  s.re_n_samples = cfg.re_samples;
  s.re_ridge = cfg.re_ridge;
  s.mle_grid_size = cfg.mle_grid;
  s.mle_samples_per_q = cfg.mle_samples_per_q;
  s.gt_n_tests = cfg.gt_tests;
  s.gt_epsilon_target = cfg.gt_epsilon;
  s.cp_n_permutations = cfg.cp_permutations;
  s.cp_sparsity_weight = cfg.cp_sparsity_weight;
  s.cp_n_measurements = cfg.cp_measurements;
  s.cp_sparsity_guess = cfg.cp_sparsity_guess;
  return s;
}

PrivacyConfig privacy_config_from(const RunConfig& cfg, int n_players) {
  PrivacyConfig p;
  p.kind = privacy_from_string(cfg.privacy);
  p.dp_sigma = cfg.dp_sigma;
  p.qt_levels = parse_relative_count(cfg.qt_levels, n_players);
  p.dr_keep = parse_relative_count(cfg.dr_keep, n_players);
  return p;
}

RunOutput run_pipeline(const RunConfig& cfg) {
  RunOutput out;
  out.config = cfg;

  const Task task = task_from_string(cfg.task);
  const SplitTable data = load_run_data(cfg);
  GameSpec game = make_game(task, data, game_options_from(cfg), cfg.seed);
  out.game_label = game.label;
  out.player_kind = player_kind_to_string(task_player_kind(task));
  out.n_players = game.players.n;

  const EstimatorSettings settings = estimator_settings_from(cfg);
  const OptimizerConfig& oc = settings.optimization;

  if (oc.ga.enabled) {
    GaResult ga = apply_ga(oc.ga.budget, game.utility);
    if (!ga.warning.empty()) out.pipeline_warnings.push_back(ga.warning);
    game.utility = std::move(ga.utility);
  }
  if (oc.tss.enabled) {
    if (game.test_data && game.train_probe_models && game.utility.rebuild_with_test_rows) {
      const auto models =
          game.train_probe_models(oc.tss.probe_models, hash_combine(cfg.seed, 0x755));
      const TssSelection sel = tss_select(models, *game.test_data, oc.tss.quantile);
      game.utility = *game.utility.rebuild_with_test_rows(sel.indices);
      game.test_data = std::make_shared<const Table>(sel.rows);
    } else {
      out.pipeline_warnings.push_back(
          "TSS inapplicable: game exposes no test split to subsample");
    }
  }

  const EstimatorKind kind = estimator_from_string(cfg.estimator);
  out.result = run_estimator(game, kind, settings, cfg.seed);
  out.released = apply_privacy(out.result, privacy_config_from(cfg, out.n_players),
                               hash_combine(cfg.seed, 0x9a5c));

  if (game.timers) {
    out.train_seconds = game.timers->train_seconds.load();
    out.infer_seconds = game.timers->infer_seconds.load();
    out.utility_calls = game.timers->calls.load();
  }
  return out;
}

nlohmann::ordered_json output_json(const RunOutput& out) {
  using nlohmann::ordered_json;
  const RunConfig& cfg = out.config;
  const bool timing = !cfg.omit_timing;

  ordered_json run;
  run["task"] = cfg.task;
  run["dataset"] = cfg.dataset;
  run["game"] = out.game_label;
  run["player_kind"] = out.player_kind;
  run["players"] = out.n_players;
  run["estimator"] = cfg.estimator;
  run["sampling"] = cfg.sampling;
  run["optimization_strategy"] = cfg.optimization;
  run["privacy_protection_measure"] = cfg.privacy;
  run["seed"] = cfg.seed;

  ordered_json diag;
  diag["n_uc"] = out.result.n_uc;
  diag["cache_hits"] = out.result.cache_hits;
  diag["used_convergence"] = out.result.used_convergence;
  diag["converged"] = out.result.converged;
  diag["final_delta"] = out.result.final_delta;
  diag["convergence_skipped"] = out.result.convergence_skipped;
  diag["wall_seconds"] = timing ? out.result.wall_seconds : 0.0;
  diag["utility_seconds"] = timing ? out.result.utility_seconds : 0.0;
  diag["train_seconds"] = timing ? out.train_seconds : 0.0;
  diag["infer_seconds"] = timing ? out.infer_seconds : 0.0;
  diag["utility_calls"] = out.utility_calls;
  ordered_json warns = ordered_json::array();
  for (const auto& w : out.pipeline_warnings) warns.push_back(w);
  for (const auto& w : out.result.warnings) warns.push_back(w);
  diag["warnings"] = warns;

  ordered_json doc;
  doc["run"] = run;
  doc["values"] = out.released.values;
  doc["raw_values"] = out.result.values;
  if (!out.released.suppressed.empty()) {
    ordered_json sup = ordered_json::array();
    for (bool b : out.released.suppressed) sup.push_back(b);
    doc["suppressed"] = sup;
  }
  doc["diagnostics"] = diag;

  ordered_json trace = ordered_json::array();
  for (const auto& tp : thin_trace(out.result.trace)) {
    ordered_json point;
    point["evals"] = tp.evals;
    point["values"] = tp.values;
    trace.push_back(point);
  }
  doc["trace"] = trace;
  return doc;
}

std::string values_csv(const RunOutput& out) {
  std::string s = "player,value,raw_value,suppressed\n";
  for (std::size_t i = 0; i < out.released.values.size(); ++i) {
    const bool sup = !out.released.suppressed.empty() && out.released.suppressed[i];
    s += std::to_string(i) + "," +
         nlohmann::json(out.released.values[i]).dump() + "," +
         nlohmann::json(out.result.values[i]).dump() + "," + (sup ? "1" : "0") + "\n";
  }
  return s;
}

void write_output(const RunOutput& out) {
  if (!out.config.output.empty()) {
    std::ofstream f(out.config.output);
    if (!f) throw std::runtime_error("cannot write '" + out.config.output + "'");
    f << output_json(out).dump(2) << "\n";
  }
  if (!out.config.output_csv.empty()) {
    std::ofstream f(out.config.output_csv);
    if (!f) throw std::runtime_error("cannot write '" + out.config.output_csv + "'");
    f << values_csv(out);
  }
}

}  // namespace svkit
