#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "svkit/attacks.hpp"
#include "svkit/config.hpp"
#include "svkit/estimators.hpp"
#include "svkit/games.hpp"
#include "svkit/metrics.hpp"
#include "svkit/pipeline.hpp"
#include "svkit/privacy.hpp"
#include "svkit/registry.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

int table_players(std::size_t table_size) {
  int n = 0;
  while ((std::size_t{1} << n) < table_size) ++n;
  if ((std::size_t{1} << n) != table_size || n < 1)
    throw std::invalid_argument("by_mask length must be 2^n for n >= 1");
  return n;
}

json result_json(const svkit::ShapleyResult& r) {
  json doc;
  doc["values"] = r.values;
  doc["n_uc"] = r.n_uc;
  doc["cache_hits"] = r.cache_hits;
  doc["used_convergence"] = r.used_convergence;
  doc["converged"] = r.converged;
  doc["final_delta"] = r.final_delta;
  doc["warnings"] = r.warnings;
  if (!r.marginal_variance.empty()) {
    doc["marginal_variance"] = r.marginal_variance;
    doc["marginal_count"] = r.marginal_count;
  }
  return doc;
}

svkit::PrivacyConfig privacy_config(const std::string& defense, double dp_sigma,
                                    int qt_levels, int dr_keep) {
  svkit::PrivacyConfig p;
  p.kind = svkit::privacy_from_string(defense);
  p.dp_sigma = dp_sigma;
  p.qt_levels = qt_levels;
  p.dr_keep = dr_keep;
  return p;
}

std::string run_json(const std::string& options_json, const std::string& config_path) {
  const auto opts = nlohmann::ordered_json::parse(options_json);
  if (!opts.is_object()) throw std::invalid_argument("options must be an object");
  std::map<std::string, json> overrides;
  for (const auto& [key, value] : opts.items()) overrides[key] = value;
  const svkit::RunConfig cfg = svkit::resolve_config(config_path, overrides);
  const svkit::RunOutput out = svkit::run_pipeline(cfg);
  return svkit::output_json(out).dump();
}

std::string estimate_table_json(const std::vector<double>& by_mask,
                                const std::string& estimator,
                                const std::string& sampling, std::uint64_t seed,
                                double tau, std::uint64_t mc_marginals,
                                bool exhaustive) {
  const int n = table_players(by_mask.size());
  const svkit::GameSpec game = svkit::table_game_from_values(n, by_mask);
  svkit::EstimatorSettings settings;
  settings.sampler.strategy = svkit::strategy_from_string(sampling);
  settings.convergence.tau = tau;
  settings.mc_max_marginals = mc_marginals;
  settings.exhaustive = exhaustive;
  if (exhaustive) settings.use_convergence = false;
  const auto result = svkit::run_estimator(
      game, svkit::estimator_from_string(estimator), settings, seed);
  return result_json(result).dump();
}

std::vector<double> exact_table_values(const std::vector<double>& by_mask) {
  const int n = table_players(by_mask.size());
  return svkit::exact_shapley(svkit::table_game_from_values(n, by_mask)).values;
}

std::string fia_experiment_json(int features, int train_rows, int aux_rows,
                                int targets, int trials, bool use_aux,
                                const std::string& estimator,
                                const std::string& defense, double dp_sigma,
                                int qt_levels, int dr_keep, std::uint64_t seed) {
  svkit::FiaExperimentConfig cfg;
  cfg.features = features;
  cfg.train_rows = train_rows;
  cfg.aux_rows = aux_rows;
  cfg.n_targets = targets;
  cfg.trials = trials;
  cfg.use_aux = use_aux;
  cfg.service.estimator = svkit::estimator_from_string(estimator);
  cfg.service.privacy = privacy_config(defense, dp_sigma, qt_levels, dr_keep);
  cfg.seed = seed;
  const svkit::FiaReport report = svkit::run_fia_experiment(cfg);
  json doc;
  doc["mean_mae"] = report.mean_mae;
  doc["per_target_mae"] = report.per_target_mae;
  doc["per_trial_mae"] = report.per_trial_mae;
  doc["ranking_variance"] = report.ranking_variance;
  doc["n_trials"] = report.n_trials;
  return doc.dump();
}

std::string mia_experiment_json(int features, int owned_rows, int test_rows,
                                int pool_rows, int member_targets,
                                int nonmember_targets, int trials,
                                double label_noise, std::uint64_t mc_marginals,
                                int shadow_rounds, int real_queries,
                                const std::string& defense, double dp_sigma,
                                int qt_levels, int dr_keep, std::uint64_t seed) {
  svkit::MiaExperimentConfig cfg;
  cfg.features = features;
  cfg.owned_rows = owned_rows;
  cfg.test_rows = test_rows;
  cfg.pool_rows = pool_rows;
  cfg.member_targets = member_targets;
  cfg.nonmember_targets = nonmember_targets;
  cfg.trials = trials;
  cfg.label_noise = label_noise;
  cfg.service.mc_marginals = mc_marginals;
  cfg.service.privacy = privacy_config(defense, dp_sigma, qt_levels, dr_keep);
  cfg.mia.shadow_rounds = shadow_rounds;
  cfg.mia.real_queries = real_queries;
  cfg.seed = seed;
  const svkit::MiaReport report = svkit::run_mia_experiment(cfg);
  json doc;
  doc["auroc"] = report.auroc_value;
  doc["scores"] = report.scores;
  doc["labels"] = report.labels;
  doc["per_trial_auroc"] = report.per_trial_auroc;
  doc["ranking_variance"] = report.ranking_variance;
  doc["n_trials"] = report.n_trials;
  return doc.dump();
}

}  // namespace

PYBIND11_MODULE(_svkit, m) {
  m.doc() = "Shapley-value toolkit: cooperative games, estimators, privacy masks, attacks";
  m.attr("__version__") = "0.1.0";

  m.def("run_json", &run_json, py::arg("options_json"), py::arg("config_path") = "",
        "Run the full pipeline; options are the CLI/config keys as a JSON object. "
        "Returns the result record as JSON text.");

  m.def("exact_values", &exact_table_values, py::arg("by_mask"),
        "Exact Shapley values of an explicit utility table indexed by coalition "
        "bit mask (by_mask[0] is the empty coalition and must be 0).");

  m.def("estimate_table_json", &estimate_table_json, py::arg("by_mask"),
        py::arg("estimator") = "MC", py::arg("sampling") = "random",
        py::arg("seed") = 42, py::arg("tau") = 0.05, py::arg("mc_marginals") = 0,
        py::arg("exhaustive") = false,
        "Run one estimator on an explicit utility table; returns a JSON record "
        "with values and diagnostics.");

  m.def("dp_mask", &svkit::dp_mask, py::arg("values"), py::arg("sigma"),
        py::arg("seed"),
        "Additive gaussian release noise with common random numbers per seed.");
  m.def("qt_mask", &svkit::qt_mask, py::arg("values"), py::arg("levels"),
        "Uniform-width binning to at most `levels` midpoints.");
  m.def(
      "dr_mask",
      [](const std::vector<double>& values, const std::vector<double>& variance,
         int keep) {
        const svkit::MaskedValues masked = svkit::dr_mask(values, variance, keep);
        return py::make_tuple(masked.values, masked.suppressed);
      },
      py::arg("values"), py::arg("marginal_variance"), py::arg("keep"),
      "Keep the `keep` players with the highest marginal variance, suppress "
      "the rest to zero. Returns (values, suppressed).");

  m.def("spearman_correlation", &svkit::spearman_correlation, py::arg("a"),
        py::arg("b"));
  m.def(
      "ranking_variance",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return svkit::ranking_variance(a, b);
      },
      py::arg("a"), py::arg("b"),
      "Mean absolute rank displacement between two value vectors.");
  m.def("auroc", &svkit::auroc, py::arg("scores"), py::arg("labels"),
        "Rank-based AUROC of membership scores against 0/1 labels.");

  m.def("fia_experiment_json", &fia_experiment_json, py::arg("features") = 6,
        py::arg("train_rows") = 80, py::arg("aux_rows") = 24,
        py::arg("targets") = 8, py::arg("trials") = 1, py::arg("use_aux") = true,
        py::arg("estimator") = "MC", py::arg("defense") = "None",
        py::arg("dp_sigma") = 0.1, py::arg("qt_levels") = 0,
        py::arg("dr_keep") = 0, py::arg("seed") = 5,
        "Feature-inference attack experiment; returns a JSON report.");

  m.def("mia_experiment_json", &mia_experiment_json, py::arg("features") = 6,
        py::arg("owned_rows") = 20, py::arg("test_rows") = 40,
        py::arg("pool_rows") = 60, py::arg("member_targets") = 20,
        py::arg("nonmember_targets") = 20, py::arg("trials") = 1,
        py::arg("label_noise") = 0.45, py::arg("mc_marginals") = 2048,
        py::arg("shadow_rounds") = 30, py::arg("real_queries") = 5,
        py::arg("defense") = "None", py::arg("dp_sigma") = 0.1,
        py::arg("qt_levels") = 0, py::arg("dr_keep") = 0, py::arg("seed") = 5,
        "Membership-inference attack experiment; returns a JSON report.");
}
