#pragma once

#include <vector>

#include "svkit/game.hpp"

namespace svkit {

// 1 - cosine similarity; zero vectors compare equal to each other only.
double approximation_error(const std::vector<double>& estimate,
                           const std::vector<double>& reference);

// Mean signed drop in approximation error once a protection is applied.
double protection_effectiveness(const std::vector<double>& error_protected,
                                const std::vector<double>& error_plain);
double protection_effectiveness_abs(const std::vector<double>& error_protected,
                                    const std::vector<double>& error_plain);

// Mean squared displacement between the two descending-value rankings.
// Ties break toward the lower player id; suppressed players rank last.
double ranking_variance(const std::vector<double>& a, const std::vector<double>& b,
                        const std::vector<bool>& suppressed_a = {},
                        const std::vector<bool>& suppressed_b = {});

std::vector<int> rank_positions(const std::vector<double>& values,
                                const std::vector<bool>& suppressed = {});

struct UtilityDelta {
  double removal = 0.0;   // U(N \ {p}) - U(N)
  double addition = 0.0;  // U({p}) - U(empty)
};

UtilityDelta utility_delta(const GameSpec& game, int player, UtilityCache* cache,
                           EvalCounters& counters);

// Unbiased sample variance per player.
std::vector<double> mc_variance_profile(const std::vector<std::vector<double>>& runs);

double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b);

double mean_absolute_error(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace svkit
