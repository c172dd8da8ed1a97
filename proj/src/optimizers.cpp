#include "svkit/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace svkit {

OptimizerConfig OptimizerConfig::from_string(const std::string& s) {
  OptimizerConfig c;
  if (s == "None" || s.empty()) return c;
  if (s == "TC") {
    c.tc.enabled = true;
    return c;
  }
  if (s == "GA") {
    c.ga.enabled = true;
    return c;
  }
  if (s == "TC+GA") {
    c.tc.enabled = c.ga.enabled = true;
    return c;
  }
  if (s == "GA+TSS") {
    c.ga.enabled = c.tss.enabled = true;
    return c;
  }
  if (s == "TC+GA+TSS") {
    c.tc.enabled = c.ga.enabled = c.tss.enabled = true;
    return c;
  }
  throw std::invalid_argument(
      "unknown optimization strategy '" + s +
      "' (expected None|TC|GA|TC+GA|GA+TSS|TC+GA+TSS)");
}

std::string OptimizerConfig::to_string() const {
  std::string s;
  if (tc.enabled) s = "TC";
  if (ga.enabled) s += (s.empty() ? "GA" : "+GA");
  if (tss.enabled) s += (s.empty() ? "TSS" : "+TSS");
  return s.empty() ? "None" : s;
}

bool should_truncate(double u_partial, double u_grand, double ratio) {
  if (ratio < 0.0 || ratio > 1.0)
    throw std::invalid_argument("should_truncate: ratio outside [0,1]");
  return std::abs(u_partial) > ratio * std::abs(u_grand);
}

GaResult apply_ga(const TrainBudget& budget, const Utility& utility) {
  GaResult r;
  if (utility.cost != CostClass::model_training || !utility.rebuild_with_budget) {
    r.utility = utility;
    r.applied = false;
    r.warning = "GA inapplicable: utility '" + utility.name + "' has no training budget";
    return r;
  }
  if (budget.epochs < 0) throw std::invalid_argument("apply_ga: negative epoch budget");
  r.utility = *utility.rebuild_with_budget(budget);
  r.applied = true;
  return r;
}

TssSelection tss_select(const std::vector<LinearModel>& models, const Table& test,
                        double quantile) {
  if (models.size() < 2)
    throw std::invalid_argument("tss_select: need at least 2 probe models");
  if (!(quantile > 0.0 && quantile <= 1.0))
    throw std::invalid_argument("tss_select: quantile must be in (0,1]");
  if (test.n_rows() == 0) throw std::invalid_argument("tss_select: empty test set");

  const int rows = test.n_rows();
  std::vector<double> disagreement(static_cast<std::size_t>(rows), 0.0);
  const double inv_m = 1.0 / static_cast<double>(models.size());
  for (int i = 0; i < rows; ++i) {
    std::vector<std::vector<double>> probs;
    probs.reserve(models.size());
    for (const auto& m : models)
      probs.push_back(m.probabilities(test.x[static_cast<std::size_t>(i)]));
    const std::size_t n_classes = probs[0].size();
    double acc = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      double mean = 0.0;
      for (const auto& p : probs) mean += p[c];
      mean *= inv_m;
      double var = 0.0;
      for (const auto& p : probs) var += (p[c] - mean) * (p[c] - mean);
      acc += var * inv_m;
    }
    disagreement[static_cast<std::size_t>(i)] = acc;
  }

  std::vector<int> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = disagreement[static_cast<std::size_t>(a)];
    const double db = disagreement[static_cast<std::size_t>(b)];
    if (da != db) return da > db;
    return a < b;
  });
  const int keep = static_cast<int>(std::ceil(quantile * rows));
  TssSelection sel;
  sel.indices.assign(order.begin(), order.begin() + keep);
  std::sort(sel.indices.begin(), sel.indices.end());
  sel.rows = test.take(sel.indices);
  return sel;
}

}  // namespace svkit
