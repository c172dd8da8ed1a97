#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svkit/convergence.hpp"
#include "svkit/game.hpp"
#include "svkit/model.hpp"
#include "svkit/optimizers.hpp"
#include "svkit/samplers.hpp"

namespace svkit {

struct TracePoint {
  std::uint64_t evals = 0;
  std::vector<double> values;
};

struct ShapleyResult {
  std::vector<double> values;
  std::uint64_t n_uc = 0;
  std::uint64_t cache_hits = 0;
  double wall_seconds = 0.0;
  double utility_seconds = 0.0;
  bool used_convergence = false;
  bool converged = false;  // non-sampling estimators report true
  double final_delta = 0.0;
  std::uint64_t convergence_skipped = 0;
  std::vector<TracePoint> trace;  // snapshots every n utility computations
  std::vector<std::string> warnings;
  // per-player marginal records (walk/pair estimators); empty when the
  // estimator has none
  std::vector<double> marginal_variance;  // unbiased; NaN where count < 2
  std::vector<std::uint64_t> marginal_count;
};

// Running per-player marginal statistics (Welford) plus run-level counters.
struct EstimateState {
  explicit EstimateState(int n_players);

  int n = 0;
  std::vector<double> mean;
  std::vector<double> m2;
  std::vector<std::uint64_t> count;
  std::uint64_t sample_index = 0;
  EvalCounters counters;

  void add_marginal(int player, double marginal);
  std::vector<double> means() const;
  // unbiased; NaN where count < 2
  std::vector<double> variances() const;
};

// Full enumeration; refuses n > 25 unless force. N_uc is exactly 2^n - 1
// (empty coalition short-circuited).
std::vector<double> exact_values(const GameSpec& game, UtilityCache* cache,
                                 EvalCounters& counters, bool force = false);
ShapleyResult exact_shapley(const GameSpec& game, bool force = false);

struct McOptions {
  SamplerConfig sampler;
  OptimizerConfig optimization;
  ConvergenceConfig convergence;
  std::uint64_t max_marginals = 0;  // 0 = bounded by convergence.max_evals only
  bool exhaustive = false;          // one pass over all n! permutations
};
ShapleyResult mc_shapley(const GameSpec& game, const McOptions& opt, std::uint64_t seed);

struct ReOptions {
  std::uint64_t n_samples = 4000;  // sampling budget cap
  SamplerConfig sampler;
  ConvergenceConfig convergence;
  bool use_convergence = true;
  bool exhaustive = false;  // kernel-weighted system over every coalition
  double ridge = 1e-9;
  OptimizerConfig optimization;
};
ShapleyResult re_shapley(const GameSpec& game, const ReOptions& opt, std::uint64_t seed);

struct MleOptions {
  int grid_size = 20;      // evenly spaced q grid on [0,1], endpoints included
  int samples_per_q = 2;   // coalition draws per grid point per pass
  SamplerConfig sampler;
  ConvergenceConfig convergence;
  bool use_convergence = true;
  bool exhaustive = false;  // exact e_i(q) by enumeration, then trapezoid
  OptimizerConfig optimization;
};
ShapleyResult mle_shapley(const GameSpec& game, const MleOptions& opt, std::uint64_t seed);

struct GtOptions {
  std::uint64_t n_tests = 4000;  // sampling budget cap
  double epsilon_target = 0.05;  // feasibility band checked as eps/(2*sqrt(n))
  SamplerConfig sampler;
  ConvergenceConfig convergence;
  bool use_convergence = true;
  bool exhaustive = false;
  OptimizerConfig optimization;
};
ShapleyResult gt_shapley(const GameSpec& game, const GtOptions& opt, std::uint64_t seed);

struct CpOptions {
  std::uint64_t n_permutations = 2000;  // sampling budget cap
  double sparsity_weight = 1e-3;        // l1 weight; 0 = direct least squares
  int n_measurements = 0;               // 0 = auto from sparsity guess
  int sparsity_guess = 0;               // 0 = auto max(1, n/4)
  int ist_iterations = 200;
  SamplerConfig sampler;
  ConvergenceConfig convergence;
  bool use_convergence = true;
  bool exhaustive = false;
  OptimizerConfig optimization;
};
ShapleyResult cp_shapley(const GameSpec& game, const CpOptions& opt, std::uint64_t seed);

// SV of a purely linear output for one class: w_i * (x_i - mean_i).
std::vector<double> linear_closed_form(const LinearModel& model,
                                       const std::vector<double>& explicand,
                                       const std::vector<double>& train_means,
                                       int output_class);

// U(N) - U(N \ {i}); n+1 evaluations.
ShapleyResult loo_values(const GameSpec& game);

// U(N) / n for every player; 1 evaluation.
ShapleyResult uniform_division(const GameSpec& game);

}  // namespace svkit
