#pragma once

#include <string>
#include <vector>

#include "svkit/data.hpp"
#include "svkit/game.hpp"
#include "svkit/model.hpp"

namespace svkit {

struct TcConfig {
  bool enabled = false;
  double ratio = 0.9;
};

struct GaConfig {
  bool enabled = false;
  TrainBudget budget{1, 256};
};

struct TssConfig {
  bool enabled = false;
  double quantile = 0.2;
  int probe_models = 3;
};

struct OptimizerConfig {
  TcConfig tc;
  GaConfig ga;
  TssConfig tss;

  // "None" | "TC" | "GA" | "TC+GA" | "GA+TSS" | "TC+GA+TSS"
  static OptimizerConfig from_string(const std::string& s);
  std::string to_string() const;
};

// Truncation predicate: the rest of a marginal-contribution walk is skipped
// (marginals recorded as 0, no evaluations) once |u_partial| > ratio *
// |u_grand|. ratio outside [0,1] is rejected.
bool should_truncate(double u_partial, double u_grand, double ratio);

struct GaResult {
  Utility utility;
  bool applied = false;
  std::string warning;  // set when the utility has no training budget
};

// Swap the utility's internal training budget. Cheap utilities pass through
// unchanged with a warning.
GaResult apply_ga(const TrainBudget& budget, const Utility& utility);

struct TssSelection {
  Table rows;
  std::vector<int> indices;  // ascending positions into the input table
};

// Keep the top-quantile test rows by cross-model disagreement (variance of
// the predicted class distributions). Ties keep earlier rows; quantile in
// (0,1], 1.0 = full set. Needs >= 2 models.
TssSelection tss_select(const std::vector<LinearModel>& models, const Table& test,
                        double quantile);

}  // namespace svkit
