#pragma once

#include <cstdint>
#include <vector>

#include "svkit/data.hpp"
#include "svkit/games.hpp"
#include "svkit/privacy.hpp"
#include "svkit/registry.hpp"

namespace svkit {

// Black-box model explanation endpoint: one model trained on the held data,
// per-query feature attributions, optional masking before release.
struct ExplanationServiceOptions {
  EstimatorKind estimator = EstimatorKind::mc;
  EstimatorSettings settings;
  PrivacyConfig privacy;
  GameOptions game;
  std::uint64_t seed = 42;
};

class ExplanationService {
 public:
  ExplanationService(const SplitTable& data, const ExplanationServiceOptions& opts);

  // attribution of the explained class (game.ri_class, or the model's
  // prediction when unset) for this input, masked before release
  std::vector<double> explain(const std::vector<double>& explicand);
  int n_features() const { return static_cast<int>(base_.baseline_means.size()); }
  std::uint64_t queries() const { return queries_; }
  const LinearModel& model() const { return base_.model; }
  // mean rank displacement the masking introduced, over all queries so far
  double mean_ranking_variance() const {
    return queries_ ? rank_var_sum_ / static_cast<double>(queries_) : 0.0;
  }

 private:
  ExplanationServiceOptions opts_;
  RiContext base_;  // explicand fields overwritten per query
  std::uint64_t queries_ = 0;
  double rank_var_sum_ = 0.0;
};

// Feature inference from a leaked attribution vector, with an auxiliary
// dataset: per-dimension least squares from attribution to feature value.
// Near-constant dimensions fall back to the auxiliary mean.
std::vector<double> fia_aux(ExplanationService& service, const Table& aux,
                            const std::vector<double>& stolen_sv);

struct FiaGenOptions {
  int n_candidates = 64;
  bool gaussian = false;    // uniform on [0,1] by default; N(0.5, 0.25^2) clamped
  double threshold = -1.0;  // < 0: per-dim 10th percentile of candidate distances
  std::uint64_t seed = 7;
};

// Feature inference without data access: probe with generated candidates,
// keep per-dimension attribution matches, average survivors. Dimensions with
// no survivors fall back to the candidate distribution mean.
std::vector<double> fia_gen(ExplanationService& service,
                            const std::vector<double>& stolen_sv,
                            const FiaGenOptions& opt);

// Black-box data valuation endpoint over a private tuple set: a query row is
// appended as an extra player and its value estimated with a fixed sampling
// budget. A row already present in the holdings is redundant with its twin,
// which depresses the reported value.
struct ValuationServiceOptions {
  int knn_k = 5;
  std::uint64_t mc_marginals = 64;  // per-query sampling budget
  PrivacyConfig privacy;
  std::uint64_t seed = 42;
};

class ValuationService {
 public:
  ValuationService(const Table& owned, const Table& test,
                   const ValuationServiceOptions& opts);

  // SV of the row appended to the holdings as they are
  double value_of(const std::vector<double>& row, int label);
  // include=true forces an exact twin into the holdings first; include=false
  // strips any twin, so the caller picks the world the query is valued in
  double value_of(const std::vector<double>& row, int label, bool include);
  int owned_rows() const { return owned_.n_rows(); }
  std::uint64_t queries() const { return queries_; }
  double mean_ranking_variance() const {
    return queries_ ? rank_var_sum_ / static_cast<double>(queries_) : 0.0;
  }

 private:
  double valued_against(const Table& holdings, const std::vector<double>& row,
                        int label);

  Table owned_;
  Table test_;
  ValuationServiceOptions opts_;
  std::uint64_t queries_ = 0;
  double rank_var_sum_ = 0.0;
};

struct MiaOptions {
  int shadow_rounds = 30;
  int real_queries = 5;  // repeated service queries averaged into the test value
  std::uint64_t seed = 11;
};

// Shadow-service membership inference: gaussian likelihood ratio of the
// service's reported value under in/out shadow populations. Returns a score
// in [0,1]; degenerate likelihoods give 0.5.
double mia_score(ValuationService& service, const Table& pool, const Table& test,
                 const ValuationServiceOptions& shadow_opts,
                 const std::vector<double>& row, int label, const MiaOptions& opt);

// Rank-based AUROC; ties count one half. labels: 1 = positive, 0 = negative.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

// Canned experiments shared by the CLI and the acceptance harness.

struct FiaExperimentConfig {
  // the service explains one fixed class score for every query, so the
  // attributions are affine in the explicand; this is the leakiest
  // (attack-relevant) service configuration
  FiaExperimentConfig() {
    service.game.ri_probability = false;
    service.game.ri_class = 1;
  }

  int features = 6;
  int train_rows = 80;
  int aux_rows = 24;
  int n_targets = 8;
  int trials = 1;       // independent service/attack re-runs on the same data
  bool use_aux = true;  // auxiliary-data variant; else generative probing
  FiaGenOptions gen;
  ExplanationServiceOptions service;
  std::uint64_t seed = 5;
};

struct FiaReport {
  double mean_mae = 0.0;
  std::vector<double> per_target_mae;  // first trial
  std::vector<double> per_trial_mae;
  double ranking_variance = 0.0;  // mean masking rank displacement per query
  int n_trials = 1;
};

FiaReport run_fia_experiment(const FiaExperimentConfig& cfg);

struct MiaExperimentConfig {
  // a twin-sensitive valuation: with a single neighbor, a held duplicate of
  // the query makes its marginal contribution vanish wherever the twin is
  // present, which is the leakage the attack reads; heavy label noise keeps
  // single tuples influential so that suppression is visible
  MiaExperimentConfig() {
    service.knn_k = 1;
    service.mc_marginals = 2048;
  }

  int features = 6;
  int owned_rows = 20;
  int test_rows = 40;
  int pool_rows = 60;
  int member_targets = 20;
  int nonmember_targets = 20;
  int trials = 1;
  double label_noise = 0.45;  // flipped-label fraction in held/pool/outsider rows
  ValuationServiceOptions service;
  MiaOptions mia;
  std::uint64_t seed = 5;
};

struct MiaReport {
  double auroc_value = 0.0;
  std::vector<double> scores;  // first trial
  std::vector<int> labels;     // 1 = member
  std::vector<double> per_trial_auroc;
  double ranking_variance = 0.0;  // mean masking rank displacement per query
  int n_trials = 1;
};

MiaReport run_mia_experiment(const MiaExperimentConfig& cfg);

}  // namespace svkit
