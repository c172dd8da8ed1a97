#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svkit/estimators.hpp"

namespace svkit {

enum class PrivacyKind { none, dp, qt, dr };

PrivacyKind privacy_from_string(const std::string& s);
std::string privacy_to_string(PrivacyKind k);

struct PrivacyConfig {
  PrivacyKind kind = PrivacyKind::none;
  double dp_sigma = 0.1;
  int qt_levels = 0;    // 0: half the player count, rounded up
  int dr_keep = 0;      // 0: half the player count, rounded up
};

struct MaskedValues {
  std::vector<double> values;
  std::vector<bool> suppressed;  // dr only; empty otherwise
};

// Additive gaussian noise with per-seed common random numbers: the same seed
// reuses the same unit normals across sigma settings.
std::vector<double> dp_mask(const std::vector<double>& values, double sigma,
                            std::uint64_t seed);

// Uniform-width binning to at most `levels` midpoints. Inputs with no more
// distinct values than levels pass through unchanged.
std::vector<double> qt_mask(const std::vector<double>& values, int levels);

// Keep the k players with the highest marginal variance, suppress the rest
// to zero. Ties prefer the lower player id.
MaskedValues dr_mask(const std::vector<double>& values,
                     const std::vector<double>& marginal_variance, int keep);

MaskedValues apply_privacy(const ShapleyResult& result, const PrivacyConfig& cfg,
                           std::uint64_t seed);

}  // namespace svkit
