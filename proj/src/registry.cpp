#include "svkit/registry.hpp"

#include <stdexcept>

namespace svkit {

EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "exact") return EstimatorKind::exact;
  if (s == "MC" || s == "mc") return EstimatorKind::mc;
  if (s == "RE" || s == "re") return EstimatorKind::re;
  if (s == "MLE" || s == "mle") return EstimatorKind::mle;
  if (s == "GT" || s == "gt") return EstimatorKind::gt;
  if (s == "CP" || s == "cp") return EstimatorKind::cp;
  if (s == "LOO" || s == "loo") return EstimatorKind::loo;
  if (s == "uniform") return EstimatorKind::uniform;
  throw std::invalid_argument("unknown estimator '" + s +
                              "' (choose exact, MC, RE, MLE, GT, CP, LOO or uniform)");
}

std::string estimator_to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::exact: return "exact";
    case EstimatorKind::mc: return "MC";
    case EstimatorKind::re: return "RE";
    case EstimatorKind::mle: return "MLE";
    case EstimatorKind::gt: return "GT";
    case EstimatorKind::cp: return "CP";
    case EstimatorKind::loo: return "LOO";
    case EstimatorKind::uniform: return "uniform";
  }
  return "exact";
}

bool estimator_is_sampling(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::mc:
    case EstimatorKind::re:
    case EstimatorKind::mle:
    case EstimatorKind::gt:
    case EstimatorKind::cp:
      return true;
    default:
      return false;
  }
}

ShapleyResult run_estimator(const GameSpec& game, EstimatorKind kind,
                            const EstimatorSettings& s, std::uint64_t seed) {
  switch (kind) {
    case EstimatorKind::exact:
      return exact_shapley(game, s.force_exact);
    case EstimatorKind::mc: {
      McOptions o;
      o.sampler = s.sampler;
      o.optimization = s.optimization;
      o.convergence = s.convergence;
      o.max_marginals = s.mc_max_marginals;
      o.exhaustive = s.exhaustive;
      return mc_shapley(game, o, seed);
    }
    case EstimatorKind::re: {
      ReOptions o;
      o.n_samples = s.re_n_samples;
      o.sampler = s.sampler;
      o.convergence = s.convergence;
      o.use_convergence = s.use_convergence;
      o.exhaustive = s.exhaustive;
      o.ridge = s.re_ridge;
      o.optimization = s.optimization;
      return re_shapley(game, o, seed);
    }
    case EstimatorKind::mle: {
      MleOptions o;
      o.grid_size = s.mle_grid_size;
      o.samples_per_q = s.mle_samples_per_q;
      o.sampler = s.sampler;
      o.convergence = s.convergence;
      o.use_convergence = s.use_convergence;
      o.exhaustive = s.exhaustive;
      o.optimization = s.optimization;
      return mle_shapley(game, o, seed);
    }
    case EstimatorKind::gt: {
      GtOptions o;
      o.n_tests = s.gt_n_tests;
      o.epsilon_target = s.gt_epsilon_target;
      o.sampler = s.sampler;
      o.convergence = s.convergence;
      o.use_convergence = s.use_convergence;
      o.exhaustive = s.exhaustive;
      o.optimization = s.optimization;
      return gt_shapley(game, o, seed);
    }
    case EstimatorKind::cp: {
      CpOptions o;
      o.n_permutations = s.cp_n_permutations;
      o.sparsity_weight = s.cp_sparsity_weight;
      o.n_measurements = s.cp_n_measurements;
      o.sparsity_guess = s.cp_sparsity_guess;
      o.ist_iterations = s.cp_ist_iterations;
      o.sampler = s.sampler;
      o.convergence = s.convergence;
      o.use_convergence = s.use_convergence;
      o.exhaustive = s.exhaustive;
      o.optimization = s.optimization;
      return cp_shapley(game, o, seed);
    }
    case EstimatorKind::loo:
      return loo_values(game);
    case EstimatorKind::uniform:
      return uniform_division(game);
  }
  throw std::logic_error("run_estimator: unhandled estimator kind");
}

}  // namespace svkit
