#include "svkit/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <vector>

namespace svkit {

namespace {

using nlohmann::json;

double as_double(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return std::stod(v.get<std::string>());
  throw std::invalid_argument("expected a number");
}

std::uint64_t as_u64(const json& v) {
  const double d = as_double(v);
  if (d < 0 || d != std::floor(d))
    throw std::invalid_argument("expected a non-negative integer");
  return static_cast<std::uint64_t>(d);
}

int as_int(const json& v) {
  const double d = as_double(v);
  if (d != std::floor(d)) throw std::invalid_argument("expected an integer");
  return static_cast<int>(d);
}

bool as_bool(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>() != 0.0;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
  }
  throw std::invalid_argument("expected a boolean");
}

std::string as_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

struct Field {
  const char* name;
  std::function<void(RunConfig&, const json&)> set;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      {"task", [](RunConfig& c, const json& v) { c.task = as_string(v); }},
      {"dataset", [](RunConfig& c, const json& v) { c.dataset = as_string(v); }},
      {"label_column", [](RunConfig& c, const json& v) { c.label_column = as_string(v); }},
      {"rows", [](RunConfig& c, const json& v) { c.rows = as_int(v); }},
      {"features", [](RunConfig& c, const json& v) { c.features = as_int(v); }},
      {"train_fraction", [](RunConfig& c, const json& v) { c.train_fraction = as_double(v); }},
      {"players", [](RunConfig& c, const json& v) { c.players = as_int(v); }},
      {"use_knn", [](RunConfig& c, const json& v) { c.use_knn = as_bool(v); }},
      {"knn_k", [](RunConfig& c, const json& v) { c.knn_k = as_int(v); }},
      {"explicand", [](RunConfig& c, const json& v) { c.explicand = as_int(v); }},
      {"learning_rate", [](RunConfig& c, const json& v) { c.learning_rate = as_double(v); }},
      {"epochs", [](RunConfig& c, const json& v) { c.epochs = as_int(v); }},
      {"max_batch", [](RunConfig& c, const json& v) { c.max_batch = as_int(v); }},
      {"estimator", [](RunConfig& c, const json& v) { c.estimator = as_string(v); }},
      {"sampling", [](RunConfig& c, const json& v) { c.sampling = as_string(v); }},
      {"optimization_strategy",
       [](RunConfig& c, const json& v) { c.optimization = as_string(v); }},
      {"privacy_protection_measure",
       [](RunConfig& c, const json& v) { c.privacy = as_string(v); }},
      {"tc_ratio", [](RunConfig& c, const json& v) { c.tc_ratio = as_double(v); }},
      {"ga_epochs", [](RunConfig& c, const json& v) { c.ga_epochs = as_int(v); }},
      {"tss_quantile", [](RunConfig& c, const json& v) { c.tss_quantile = as_double(v); }},
      {"dp_sigma", [](RunConfig& c, const json& v) { c.dp_sigma = as_double(v); }},
      {"qt_levels", [](RunConfig& c, const json& v) { c.qt_levels = as_string(v); }},
      {"dr_keep", [](RunConfig& c, const json& v) { c.dr_keep = as_string(v); }},
      {"tau", [](RunConfig& c, const json& v) { c.tau = as_double(v); }},
      {"max_evals", [](RunConfig& c, const json& v) { c.max_evals = as_u64(v); }},
      {"convergence_window",
       [](RunConfig& c, const json& v) { c.convergence_window = as_int(v); }},
      {"mc_marginals", [](RunConfig& c, const json& v) { c.mc_marginals = as_u64(v); }},
      {"re_samples", [](RunConfig& c, const json& v) { c.re_samples = as_u64(v); }},
      {"re_ridge", [](RunConfig& c, const json& v) { c.re_ridge = as_double(v); }},
      {"mle_grid", [](RunConfig& c, const json& v) { c.mle_grid = as_int(v); }},
      {"mle_samples_per_q",
       [](RunConfig& c, const json& v) { c.mle_samples_per_q = as_int(v); }},
      {"gt_tests", [](RunConfig& c, const json& v) { c.gt_tests = as_u64(v); }},
      {"gt_epsilon", [](RunConfig& c, const json& v) { c.gt_epsilon = as_double(v); }},
      {"cp_permutations",
       [](RunConfig& c, const json& v) { c.cp_permutations = as_u64(v); }},
      {"cp_sparsity_weight",
       [](RunConfig& c, const json& v) { c.cp_sparsity_weight = as_double(v); }},
      {"cp_measurements",
       [](RunConfig& c, const json& v) { c.cp_measurements = as_int(v); }},
      {"cp_sparsity_guess",
       [](RunConfig& c, const json& v) { c.cp_sparsity_guess = as_int(v); }},
      {"exhaustive", [](RunConfig& c, const json& v) { c.exhaustive = as_bool(v); }},
      {"force_exact", [](RunConfig& c, const json& v) { c.force_exact = as_bool(v); }},
      {"seed", [](RunConfig& c, const json& v) { c.seed = as_u64(v); }},
      {"output", [](RunConfig& c, const json& v) { c.output = as_string(v); }},
      {"output_csv", [](RunConfig& c, const json& v) { c.output_csv = as_string(v); }},
      {"omit_timing", [](RunConfig& c, const json& v) { c.omit_timing = as_bool(v); }},
  };
  return kFields;
}

}  // namespace

void apply_config_value(RunConfig& cfg, const std::string& key, const json& value) {
  for (const auto& f : fields()) {
    if (key == f.name) {
      try {
        f.set(cfg, value);
      } catch (const std::exception& e) {
        throw std::invalid_argument("config key '" + key + "': " + e.what());
      }
      return;
    }
  }
  throw std::invalid_argument("unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::invalid_argument("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object())
    throw std::invalid_argument("config file '" + path + "': expected a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    apply_config_value(cfg, it.key(), it.value());
}

RunConfig resolve_config(const std::string& config_path,
                         const std::map<std::string, nlohmann::json>& flag_overrides) {
  RunConfig cfg;
  if (!config_path.empty()) apply_config_file(cfg, config_path);
  for (const auto& [key, value] : flag_overrides) apply_config_value(cfg, key, value);
  return cfg;
}

int parse_relative_count(const std::string& text, int n) {
  if (text.empty()) throw std::invalid_argument("empty count");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad count '" + text + "'");
  }
  if (used == text.size()) {
    if (v < 1 || v != std::floor(v))
      throw std::invalid_argument("count '" + text + "' must be a positive integer");
    return static_cast<int>(v);
  }
  if (used == text.size() - 1 && text.back() == 'n') {
    if (v <= 0) throw std::invalid_argument("fraction '" + text + "' must be positive");
    return std::max(1, static_cast<int>(std::ceil(v * n)));
  }
  throw std::invalid_argument("bad count '" + text + "' (use e.g. \"4\" or \"0.5n\")");
}

}  // namespace svkit
