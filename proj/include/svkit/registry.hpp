#pragma once

#include <cstdint>
#include <string>

#include "svkit/estimators.hpp"

namespace svkit {

enum class EstimatorKind { exact, mc, re, mle, gt, cp, loo, uniform };

EstimatorKind estimator_from_string(const std::string& s);
std::string estimator_to_string(EstimatorKind k);
bool estimator_is_sampling(EstimatorKind k);

// One knob bundle covering every estimator family; each family reads the
// fields it understands.
struct EstimatorSettings {
  SamplerConfig sampler;
  OptimizerConfig optimization;
  ConvergenceConfig convergence;
  bool use_convergence = true;
  bool exhaustive = false;
  bool force_exact = false;

  std::uint64_t mc_max_marginals = 0;
  std::uint64_t re_n_samples = 4000;
  double re_ridge = 1e-9;
  int mle_grid_size = 20;
  int mle_samples_per_q = 2;
  std::uint64_t gt_n_tests = 4000;
  double gt_epsilon_target = 0.05;
  std::uint64_t cp_n_permutations = 2000;
  double cp_sparsity_weight = 1e-3;
  int cp_n_measurements = 0;
  int cp_sparsity_guess = 0;
  int cp_ist_iterations = 200;
};

ShapleyResult run_estimator(const GameSpec& game, EstimatorKind kind,
                            const EstimatorSettings& settings, std::uint64_t seed);

}  // namespace svkit
