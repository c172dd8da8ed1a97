#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "svkit/game.hpp"
#include "svkit/rng.hpp"

namespace svkit {

enum class SampleStrategy { random, stratified, antithetic, exhaustive };

SampleStrategy strategy_from_string(const std::string& s);
std::string strategy_to_string(SampleStrategy s);

// size distribution for coalition draws
enum class SizeDistribution { uniform, kernel };

struct SamplerConfig {
  SampleStrategy strategy = SampleStrategy::random;
  int pivot = 0;  // stratified permutations: player whose position defines strata
  // coalition draws
  SizeDistribution size_dist = SizeDistribution::uniform;
  int min_size = 0;
  int max_size = -1;  // -1 = universe size
  std::vector<double> strata_proportions;  // stratified: per size in [min,max]; empty = stratum-size proportional
};

// Permutation stream over n players. random = Fisher-Yates; stratified =
// cyclic-rotation blocks of a fresh uniform permutation, so every player (any
// pivot) occupies each position exactly once per n draws; antithetic =
// uniform draw strictly alternated with its reversal; exhaustive = one pass
// in lexicographic order.
class PermutationSampler {
 public:
  PermutationSampler(const SamplerConfig& cfg, int n_players, std::uint64_t seed);

  Permutation next();
  bool exhausted() const { return exhausted_; }  // exhaustive mode only
  std::uint64_t draws() const { return draws_; }

 private:
  SamplerConfig cfg_;
  int n_;
  Rng rng_;
  std::uint64_t draws_ = 0;
  bool exhausted_ = false;
  std::vector<int> base_;  // stratified rotation base / exhaustive state
  int rotation_ = 0;
  bool pending_reverse_ = false;
  std::vector<int> last_;
};

// Coalition stream over the universe 0..n-1 minus an optional excluded
// player. pmf() reports the marginal draw probability, which importance-
// weighted consumers divide out.
class CoalitionSampler {
 public:
  CoalitionSampler(const SamplerConfig& cfg, int n_players, int exclude,
                   std::uint64_t seed);  // exclude = -1 for none

  Coalition next();
  double pmf(const Coalition& c) const;
  int universe_size() const { return m_; }

 private:
  int lo_() const;
  int hi_() const;
  double size_prob(int s) const;     // under the base size distribution
  double strata_prob(int s) const;   // under stratified proportions
  Coalition uniform_of_size(int s);
  Coalition base_draw();
  double base_pmf(const Coalition& c) const;

  SamplerConfig cfg_;
  int n_;
  int exclude_;
  int m_;  // universe size
  Rng rng_;
  std::vector<int> universe_;
  std::vector<double> strata_;        // normalized proportions per size
  std::vector<std::uint64_t> emitted_;  // stratified allocation counts
  std::uint64_t strat_draws_ = 0;
  bool pending_complement_ = false;
  Coalition last_;
};

// Bernoulli(q) inclusion draws over all n players, used by the multilinear
// path. antithetic flips the underlying uniforms (1-u) at the same q, which
// preserves marginals; stratified allocates Binomial(n,q) size strata by
// largest deficit, then draws a uniform subset of the allocated size.
class BernoulliCoalitionSampler {
 public:
  BernoulliCoalitionSampler(SampleStrategy strategy, int n_players, std::uint64_t seed);

  Coalition next(double q);

 private:
  struct QState {
    std::vector<double> pmf;
    std::vector<std::uint64_t> emitted;
    std::uint64_t draws = 0;
  };

  SampleStrategy strategy_;
  int n_;
  Rng rng_;
  bool pending_flip_ = false;
  std::vector<double> last_uniforms_;
  double last_q_ = -1.0;
  std::map<std::int64_t, QState> strata_;  // keyed by rounded grid q
};

// n choose k as double
double binomial_coefficient(int n, int k);

}  // namespace svkit
