#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "svkit/attacks.hpp"
#include "svkit/pipeline.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// numbers and booleans pass through typed; everything else stays a string
json flag_to_json(const std::string& v) {
  try {
    const json parsed = json::parse(v);
    if (parsed.is_number() || parsed.is_boolean()) return parsed;
  } catch (const json::exception&) {
  }
  return json(v);
}

struct FlagBag {
  std::map<std::string, json> overrides;
  std::string config_path;

  void add_value_options(CLI::App* cmd) {
    static const std::vector<std::pair<const char*, const char*>> kOptions = {
        {"task", "game family: RI, DV, DSV or FL"},
        {"dataset", "csv path, or synthetic blobs2/blobs4"},
        {"label_column", "csv class column name (default: last column)"},
        {"rows", "synthetic dataset rows"},
        {"features", "synthetic dataset features"},
        {"train_fraction", "train split fraction in (0,1)"},
        {"players", "player count (0 = task default)"},
        {"knn_k", "neighbor count for the KNN utility"},
        {"explicand", "RI: test row index to explain"},
        {"learning_rate", "logistic training learning rate"},
        {"epochs", "logistic training epochs"},
        {"max_batch", "full-batch threshold / mini-batch size"},
        {"estimator", "exact, MC, RE, MLE, GT, CP, LOO or uniform"},
        {"sampling", "random, stratified or antithetic"},
        {"optimization_strategy", "None, TC, GA, TC+GA, GA+TSS or TC+GA+TSS"},
        {"privacy_protection_measure", "None, DP, QT or DR"},
        {"tc_ratio", "truncation threshold ratio"},
        {"ga_epochs", "reduced training epochs under GA"},
        {"tss_quantile", "kept fraction of test rows under TSS"},
        {"dp_sigma", "gaussian noise level"},
        {"qt_levels", "quantization levels, e.g. 4 or 0.5n"},
        {"dr_keep", "players kept by DR, e.g. 4 or 0.5n"},
        {"tau", "convergence threshold"},
        {"max_evals", "utility evaluation budget"},
        {"convergence_window", "snapshots compared by the convergence test"},
        {"mc_marginals", "MC: hard marginal budget (0 = by convergence)"},
        {"re_samples", "RE: coalition sample budget"},
        {"re_ridge", "RE: ridge fallback strength"},
        {"mle_grid", "MLE: quadrature grid size"},
        {"mle_samples_per_q", "MLE: draws per grid point per pass"},
        {"gt_tests", "GT: test sample budget"},
        {"gt_epsilon", "GT: feasibility band target"},
        {"cp_permutations", "CP: permutation budget"},
        {"cp_sparsity_weight", "CP: l1 weight (0 = least squares)"},
        {"cp_measurements", "CP: measurement count (0 = auto)"},
        {"cp_sparsity_guess", "CP: sparsity guess (0 = auto)"},
        {"seed", "run seed"},
        {"output", "json report path"},
        {"output_csv", "csv values path"},
    };
    for (const auto& [name, help] : kOptions) {
      const std::string key = name;
      cmd->add_option_function<std::string>(
          "--" + key,
          [this, key](const std::string& v) { overrides[key] = flag_to_json(v); }, help);
    }
    static const std::vector<std::pair<const char*, const char*>> kFlags = {
        {"use_knn", "use the KNN utility instead of logistic training"},
        {"exhaustive", "run the estimator's exhaustive mode"},
        {"force_exact", "allow exact enumeration past 25 players"},
        {"omit_timing", "zero timing fields for byte-stable reports"},
    };
    for (const auto& [name, help] : kFlags) {
      const std::string key = name;
      cmd->add_flag_callback(
          "--" + key, [this, key]() { overrides[key] = json(true); }, help);
    }
    cmd->add_option("--config", config_path, "JSON config file (flags win)");
  }

  svkit::RunConfig resolve() const {
    return svkit::resolve_config(config_path, overrides);
  }
};

void print_run_summary(const svkit::RunOutput& out) {
  std::printf("%s estimator=%s sampling=%s optimization=%s privacy=%s seed=%llu\n",
              out.game_label.c_str(), out.config.estimator.c_str(),
              out.config.sampling.c_str(), out.config.optimization.c_str(),
              out.config.privacy.c_str(),
              static_cast<unsigned long long>(out.config.seed));
  std::printf("values:");
  for (double v : out.released.values) std::printf(" %.6g", v);
  std::printf("\n");
  std::printf("n_uc=%llu cache_hits=%llu converged=%s",
              static_cast<unsigned long long>(out.result.n_uc),
              static_cast<unsigned long long>(out.result.cache_hits),
              out.result.converged ? "yes" : "no");
  if (out.result.used_convergence)
    std::printf(" final_delta=%.6g", out.result.final_delta);
  std::printf("\n");
  for (const auto& w : out.pipeline_warnings) std::printf("warning: %s\n", w.c_str());
  for (const auto& w : out.result.warnings) std::printf("warning: %s\n", w.c_str());
}

int cmd_run(const FlagBag& flags) {
  const svkit::RunConfig cfg = flags.resolve();
  const svkit::RunOutput out = svkit::run_pipeline(cfg);
  svkit::write_output(out);
  print_run_summary(out);
  if (out.result.used_convergence && !out.result.converged) return 3;
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_sweep(const FlagBag& flags, const std::string& estimators,
              const std::string& samplings, const std::string& optimizations,
              const std::string& sweep_output) {
  const svkit::RunConfig base = flags.resolve();
  ordered_json all = ordered_json::array();
  int failures = 0;
  for (const auto& est : split_list(estimators)) {
    for (const auto& samp : split_list(samplings)) {
      for (const auto& optim : split_list(optimizations)) {
        svkit::RunConfig cfg = base;
        cfg.estimator = est;
        cfg.sampling = samp;
        cfg.optimization = optim;
        cfg.output.clear();
        cfg.output_csv.clear();
        try {
          const svkit::RunOutput out = svkit::run_pipeline(cfg);
          std::printf("%-7s %-11s %-9s n_uc=%-8llu converged=%s\n", est.c_str(),
                      samp.c_str(), optim.c_str(),
                      static_cast<unsigned long long>(out.result.n_uc),
                      out.result.converged ? "yes" : "no");
          all.push_back(svkit::output_json(out));
        } catch (const std::exception& e) {
          ++failures;
          std::printf("%-7s %-11s %-9s FAILED: %s\n", est.c_str(), samp.c_str(),
                      optim.c_str(), e.what());
        }
      }
    }
  }
  if (!sweep_output.empty()) {
    std::ofstream f(sweep_output);
    if (!f) throw std::runtime_error("cannot write '" + sweep_output + "'");
    f << all.dump(2) << "\n";
  }
  return failures == 0 ? 0 : 1;
}

int cmd_attack(const std::string& attack, const FlagBag& flags, int targets,
               int aux_rows, int candidates, int shadow_rounds, int trials,
               double label_noise, const std::string& defense,
               const std::string& strength, const std::string& attack_output) {
  svkit::RunConfig cfg = flags.resolve();
  if (!defense.empty()) cfg.privacy = defense;
  if (!strength.empty()) {
    if (strength == "low") {
      cfg.dp_sigma = 0.1;
      cfg.qt_levels = "8";
      cfg.dr_keep = "0.75n";
    } else if (strength == "mid") {
      cfg.dp_sigma = 0.5;
      cfg.qt_levels = "4";
      cfg.dr_keep = "0.5n";
    } else if (strength == "high") {
      cfg.dp_sigma = 0.9;
      cfg.qt_levels = "2";
      cfg.dr_keep = "0.25n";
    } else {
      throw std::invalid_argument("unknown strength '" + strength +
                                  "' (choose low, mid or high)");
    }
  }
  if (trials < 1) throw std::invalid_argument("need at least one trial");

  ordered_json doc;
  doc["attack"] = attack;
  std::string knob;
  const auto describe_defense = [&](const svkit::PrivacyConfig& pc) {
    ordered_json d;
    d["measure"] = svkit::privacy_to_string(pc.kind);
    d["strength"] = strength.empty() ? "custom" : strength;
    char buf[32];
    switch (pc.kind) {
      case svkit::PrivacyKind::dp:
        std::snprintf(buf, sizeof buf, "%g", pc.dp_sigma);
        d["sigma"] = pc.dp_sigma;
        knob = buf;
        break;
      case svkit::PrivacyKind::qt:
        d["levels"] = pc.qt_levels;
        knob = std::to_string(pc.qt_levels);
        break;
      case svkit::PrivacyKind::dr:
        d["keep"] = pc.dr_keep;
        knob = std::to_string(pc.dr_keep);
        break;
      case svkit::PrivacyKind::none:
        break;
    }
    doc["defense"] = d;
  };

  std::vector<double> per_trial;
  if (attack == "fia_aux" || attack == "fia_gen") {
    svkit::FiaExperimentConfig fc;
    fc.features = cfg.features;
    fc.n_targets = targets;
    fc.aux_rows = aux_rows;
    fc.trials = trials;
    fc.use_aux = attack == "fia_aux";
    fc.gen.n_candidates = candidates;
    fc.seed = cfg.seed;
    fc.service.estimator = svkit::estimator_from_string(cfg.estimator);
    fc.service.settings = svkit::estimator_settings_from(cfg);
    fc.service.privacy = svkit::privacy_config_from(cfg, cfg.features);
    const bool keep_probability = fc.service.game.ri_probability;
    const int keep_class = fc.service.game.ri_class;
    fc.service.game = svkit::game_options_from(cfg);
    fc.service.game.ri_probability = keep_probability;
    fc.service.game.ri_class = keep_class;
    describe_defense(fc.service.privacy);
    const svkit::FiaReport rep = svkit::run_fia_experiment(fc);
    doc["score_kind"] = "mae";
    doc["score"] = rep.mean_mae;
    doc["n_trials"] = rep.n_trials;
    doc["per_trial"] = rep.per_trial_mae;
    doc["ranking_variance"] = rep.ranking_variance;
    doc["per_target_mae"] = rep.per_target_mae;
    per_trial = rep.per_trial_mae;
    std::printf("%s mean_mae=%.6g over %d targets, %d trial(s), rank_var=%.4g\n",
                attack.c_str(), rep.mean_mae, targets, rep.n_trials,
                rep.ranking_variance);
  } else if (attack == "mia") {
    svkit::MiaExperimentConfig mc;
    mc.features = cfg.features;
    mc.trials = trials;
    mc.label_noise = label_noise;
    if (flags.overrides.count("knn_k")) mc.service.knn_k = cfg.knn_k;
    if (cfg.mc_marginals > 0) mc.service.mc_marginals = cfg.mc_marginals;
    mc.service.privacy = svkit::privacy_config_from(cfg, mc.owned_rows + 1);
    mc.mia.shadow_rounds = shadow_rounds;
    mc.mia.seed = svkit::hash_combine(cfg.seed, 0x317);
    mc.seed = cfg.seed;
    describe_defense(mc.service.privacy);
    const svkit::MiaReport rep = svkit::run_mia_experiment(mc);
    doc["score_kind"] = "auroc";
    doc["score"] = rep.auroc_value;
    doc["n_trials"] = rep.n_trials;
    doc["per_trial"] = rep.per_trial_auroc;
    doc["ranking_variance"] = rep.ranking_variance;
    doc["scores"] = rep.scores;
    doc["labels"] = rep.labels;
    per_trial = rep.per_trial_auroc;
    std::printf("mia auroc=%.4f over %zu targets, %d trial(s), rank_var=%.4g\n",
                rep.auroc_value, rep.scores.size(), rep.n_trials,
                rep.ranking_variance);
  } else {
    throw std::invalid_argument("unknown attack '" + attack +
                                "' (choose fia_aux, fia_gen or mia)");
  }

  if (!attack_output.empty()) {
    std::ofstream f(attack_output);
    if (!f) throw std::runtime_error("cannot write '" + attack_output + "'");
    f << doc.dump(2) << "\n";
  }
  if (!cfg.output_csv.empty()) {
    std::ofstream f(cfg.output_csv);
    if (!f) throw std::runtime_error("cannot write '" + cfg.output_csv + "'");
    f << "trial,attack,defense,strength,score\n";
    for (std::size_t t = 0; t < per_trial.size(); ++t)
      f << t << ',' << attack << ',' << cfg.privacy << ',' << knob << ','
        << per_trial[t] << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"svkit: modular Shapley-value computation for data analytics"};
  app.require_subcommand(1);

  FlagBag run_flags;
  auto* run = app.add_subcommand("run", "compute Shapley values for one configuration");
  run_flags.add_value_options(run);

  FlagBag sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "cross estimators x sampling x optimization");
  sweep_flags.add_value_options(sweep);
  std::string estimators = "MC,RE,MLE,GT,CP";
  std::string samplings = "random";
  std::string optimizations = "None,TC,GA,TC+GA,GA+TSS,TC+GA+TSS";
  std::string sweep_output;
  sweep->add_option("--estimators", estimators, "comma list of estimators");
  sweep->add_option("--samplings", samplings, "comma list of sampling strategies");
  sweep->add_option("--optimizations", optimizations, "comma list of optimization strategies");
  sweep->add_option("--sweep_output", sweep_output, "json array report path");

  FlagBag attack_flags;
  auto* attack = app.add_subcommand("attack", "run an inference attack experiment");
  attack_flags.add_value_options(attack);
  std::string attack_name = "mia";
  int targets = 8;
  int aux_rows = 24;
  int candidates = 48;
  int shadow_rounds = 30;
  int attack_trials = 1;
  double attack_label_noise = 0.45;
  std::string attack_defense;
  std::string attack_strength;
  std::string attack_output;
  attack->add_option("--attack", attack_name, "fia_aux, fia_gen or mia");
  attack->add_option("--targets", targets, "FIA: explicands to reconstruct");
  attack->add_option("--aux_rows", aux_rows, "fia_aux: auxiliary rows");
  attack->add_option("--candidates", candidates, "fia_gen: probe candidates");
  attack->add_option("--shadow_rounds", shadow_rounds, "mia: shadow rounds");
  attack->add_option("--label_noise", attack_label_noise,
                     "mia: flipped-label fraction in held and candidate rows");
  attack->add_option("--trials", attack_trials,
                     "independent trials, each seeded by (seed, trial index)");
  attack->add_option("--defense", attack_defense,
                     "masking applied before release: None, DP, QT or DR");
  attack->add_option("--strength", attack_strength,
                     "defense strength preset: low, mid or high");
  attack->add_option("--attack_output", attack_output, "json report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (sweep->parsed())
      return cmd_sweep(sweep_flags, estimators, samplings, optimizations, sweep_output);
    if (attack->parsed())
      return cmd_attack(attack_name, attack_flags, targets, aux_rows, candidates,
                        shadow_rounds, attack_trials, attack_label_noise,
                        attack_defense, attack_strength, attack_output);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
