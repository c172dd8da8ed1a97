#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "svkit/attacks.hpp"
#include "svkit/config.hpp"
#include "svkit/games.hpp"
#include "svkit/metrics.hpp"
#include "svkit/privacy.hpp"
#include "svkit/registry.hpp"

namespace svkit {

struct RunOutput {
  RunConfig config;
  std::string game_label;
  std::string player_kind;
  int n_players = 0;
  ShapleyResult result;
  MaskedValues released;
  std::vector<std::string> pipeline_warnings;  // GA/TSS applicability notes
  double train_seconds = 0.0;
  double infer_seconds = 0.0;
  std::uint64_t utility_calls = 0;
};

SplitTable load_run_data(const RunConfig& cfg);
GameOptions game_options_from(const RunConfig& cfg);
EstimatorSettings estimator_settings_from(const RunConfig& cfg);
PrivacyConfig privacy_config_from(const RunConfig& cfg, int n_players);

// Builds the game, applies GA/TSS to the utility, runs the estimator (TC is
// applied inside the walk-based estimators), then masks the values.
RunOutput run_pipeline(const RunConfig& cfg);

// Deterministic report. Timing fields are zeroed when omit_timing is set so
// identical runs produce identical bytes. The trace is thinned to at most
// 512 evenly spaced points.
nlohmann::ordered_json output_json(const RunOutput& out);

// Writes cfg.output (json) and/or cfg.output_csv when set.
void write_output(const RunOutput& out);

std::string values_csv(const RunOutput& out);

}  // namespace svkit
