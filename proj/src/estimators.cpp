#include "svkit/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace svkit {

namespace {

double wall_now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Records a snapshot each time the utility-computation counter crosses a
// multiple of n; feeds the convergence monitor when present.
class SnapshotDriver {
 public:
  SnapshotDriver(int n, ConvergenceMonitor* monitor, std::vector<TracePoint>* trace)
      : n_(static_cast<std::uint64_t>(n)), next_(n_), monitor_(monitor), trace_(trace) {}

  template <typename PhiFn>
  bool poll(std::uint64_t n_uc, PhiFn&& phi_fn) {
    bool converged = false;
    while (n_uc >= next_) {
      std::vector<double> phi = phi_fn();
      if (trace_ != nullptr) trace_->push_back({next_, phi});
      if (monitor_ != nullptr) {
        const auto v = monitor_->update_and_check(phi, next_);
        if (v.converged) converged = true;
      }
      next_ += n_;
    }
    return converged;
  }

 private:
  std::uint64_t n_;
  std::uint64_t next_;
  ConvergenceMonitor* monitor_;
  std::vector<TracePoint>* trace_;
};

void finish_counters(ShapleyResult& r, const EstimateState& state, double t0) {
  r.n_uc = state.counters.n_uc.load();
  r.cache_hits = state.counters.cache_hits.load();
  r.utility_seconds = state.counters.utility_seconds.load();
  r.wall_seconds = wall_now() - t0;
}

void attach_convergence(ShapleyResult& r, const ConvergenceMonitor& mon, bool converged) {
  r.used_convergence = true;
  r.converged = converged;
  if (mon.has_delta()) r.final_delta = mon.last_delta();
  r.convergence_skipped = mon.total_skipped();
}

void attach_marginals(ShapleyResult& r, const EstimateState& state) {
  r.marginal_variance = state.variances();
  r.marginal_count = state.count;
}

double kernel_weight(int n, int s) {
  // (n-1) / (C(n,s) * s * (n-s)), the regression kernel; infinite at s=0,n
  return (n - 1.0) / (binomial_coefficient(n, s) * s * (n - s));
}

// Once every coalition a sampler can reach is cached, n_uc can no longer
// advance, so eval-indexed snapshots (and the convergence verdict) would
// stall forever. Full caching of the space is the cheap certain test;
// truncation shrinks the reachable set, so a long run of walks that add no
// evaluations is treated the same way.
bool space_saturated(const UtilityCache& cache, int n) {
  return n <= 62 && cache.size() >= ((1ULL << n) - 1);
}

constexpr std::uint64_t kStalledWalkLimit = 512;

constexpr const char* kSaturationNote =
    "coalition space fully cached before convergence; sampling stopped";

Eigen::VectorXd solve_constrained_ls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                     double total, double ridge, bool* used_ridge) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd k(n + 1, n + 1);
  Eigen::VectorXd rhs(n + 1);
  auto build = [&](double reg) {
    k.setZero();
    k.topLeftCorner(n, n) = 2.0 * a;
    for (int i = 0; i < n; ++i) k(i, i) += 2.0 * reg;
    k.topRightCorner(n, 1).setOnes();
    k.bottomLeftCorner(1, n).setOnes();
    rhs.head(n) = 2.0 * b;
    rhs(n) = total;
  };
  build(0.0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(k);
  if (lu.isInvertible()) {
    const Eigen::VectorXd x = lu.solve(rhs);
    if (x.allFinite()) {
      if (used_ridge != nullptr) *used_ridge = false;
      return x.head(n);
    }
  }
  build(ridge > 0 ? ridge : 1e-9);
  Eigen::FullPivLU<Eigen::MatrixXd> lu2(k);
  const Eigen::VectorXd x = lu2.solve(rhs);
  if (used_ridge != nullptr) *used_ridge = true;
  return x.head(n);
}

}  // namespace

EstimateState::EstimateState(int n_players) : n(n_players) {
  if (n_players < 1) throw std::invalid_argument("estimate state: need n >= 1");
  mean.assign(static_cast<std::size_t>(n_players), 0.0);
  m2.assign(static_cast<std::size_t>(n_players), 0.0);
  count.assign(static_cast<std::size_t>(n_players), 0);
}

void EstimateState::add_marginal(int player, double marginal) {
  auto p = static_cast<std::size_t>(player);
  ++count[p];
  const double d = marginal - mean[p];
  mean[p] += d / static_cast<double>(count[p]);
  m2[p] += d * (marginal - mean[p]);
  ++sample_index;
}

std::vector<double> EstimateState::means() const { return mean; }

std::vector<double> EstimateState::variances() const {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < v.size(); ++p)
    v[p] = count[p] >= 2 ? m2[p] / static_cast<double>(count[p] - 1)
                         : std::numeric_limits<double>::quiet_NaN();
  return v;
}

std::vector<double> exact_values(const GameSpec& game, UtilityCache* cache,
                                 EvalCounters& counters, bool force) {
  const int n = game.players.n;
  if (n < 1) throw std::invalid_argument("exact: need n >= 1");
  if (n > 25 && !force)
    throw std::invalid_argument("exact: n > 25 needs the force flag");
  if (n > 30) throw std::invalid_argument("exact: n > 30 unsupported");

  // w[s] = s! (n-1-s)! / n!
  std::vector<double> w(static_cast<std::size_t>(n));
  w[0] = 1.0 / n;
  for (int s = 1; s < n; ++s)
    w[static_cast<std::size_t>(s)] =
        w[static_cast<std::size_t>(s - 1)] * s / static_cast<double>(n - s);

  const std::size_t total = 1ULL << n;
  std::vector<double> u(total);
  u[0] = 0.0;
  for (std::size_t mask = 1; mask < total; ++mask)
    u[mask] = eval_utility(game, Coalition::from_mask(n, mask), cache, counters);

  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  for (std::size_t mask = 0; mask < total; ++mask) {
    const double us = u[mask];
    const double ws = w[static_cast<std::size_t>(std::popcount(mask))];
    for (int i = 0; i < n; ++i) {
      const std::size_t bit = 1ULL << i;
      if (mask & bit) continue;
      phi[static_cast<std::size_t>(i)] += ws * (u[mask | bit] - us);
    }
  }
  return phi;
}

ShapleyResult exact_shapley(const GameSpec& game, bool force) {
  const double t0 = wall_now();
  ShapleyResult r;
  EstimateState state(game.players.n);
  UtilityCache cache;
  r.values = exact_values(game, &cache, state.counters, force);
  r.converged = true;
  finish_counters(r, state, t0);
  return r;
}

ShapleyResult mc_shapley(const GameSpec& game, const McOptions& opt, std::uint64_t seed) {
  const double t0 = wall_now();
  const int n = game.players.n;
  ShapleyResult r;
  EstimateState state(n);
  UtilityCache cache;
  SamplerConfig scfg = opt.sampler;
  if (opt.exhaustive) scfg.strategy = SampleStrategy::exhaustive;
  PermutationSampler sampler(scfg, n, hash_combine(seed, 0x3c01));

  ConvergenceMonitor monitor(opt.convergence, n);
  const bool track = !opt.exhaustive;
  SnapshotDriver snaps(n, track ? &monitor : nullptr, &r.trace);

  double u_grand = 0.0;
  if (opt.optimization.tc.enabled)
    u_grand = eval_utility(game, Coalition::full_of(n), &cache, state.counters);

  std::uint64_t marginals = 0;
  std::uint64_t stalled_walks = 0;
  bool converged = false;
  const auto phi_fn = [&] { return state.means(); };

  while (true) {
    if (opt.exhaustive) {
      if (sampler.exhausted()) break;
    } else {
      if (converged) break;
      if (state.counters.n_uc.load() >= opt.convergence.max_evals) break;
      if (opt.max_marginals != 0 && marginals >= opt.max_marginals) break;
      if (space_saturated(cache, n) || stalled_walks >= kStalledWalkLimit) {
        r.warnings.push_back(kSaturationNote);
        break;
      }
    }
    const std::uint64_t walk_start_uc = state.counters.n_uc.load();
    const Permutation perm = sampler.next();
    Coalition prefix(n);
    double u_prev = 0.0;
    for (int k = 0; k < n; ++k) {
      if (opt.max_marginals != 0 && marginals >= opt.max_marginals) break;
      const int p = perm.order[static_cast<std::size_t>(k)];
      if (opt.optimization.tc.enabled &&
          should_truncate(u_prev, u_grand, opt.optimization.tc.ratio)) {
        // the rest of this walk is recorded as zero marginals, no evaluations
        for (int j = k; j < n; ++j) {
          if (opt.max_marginals != 0 && marginals >= opt.max_marginals) break;
          state.add_marginal(perm.order[static_cast<std::size_t>(j)], 0.0);
          ++marginals;
        }
        break;
      }
      prefix.add(p);
      const double u_cur = eval_utility(game, prefix, &cache, state.counters);
      state.add_marginal(p, u_cur - u_prev);
      ++marginals;
      u_prev = u_cur;
      if (track) converged |= snaps.poll(state.counters.n_uc.load(), phi_fn);
    }
    stalled_walks =
        state.counters.n_uc.load() == walk_start_uc ? stalled_walks + 1 : 0;
  }

  r.values = state.means();
  if (track) attach_convergence(r, monitor, converged);
  attach_marginals(r, state);
  finish_counters(r, state, t0);
  return r;
}

ShapleyResult re_shapley(const GameSpec& game, const ReOptions& opt, std::uint64_t seed) {
  const double t0 = wall_now();
  const int n = game.players.n;
  ShapleyResult r;
  EstimateState state(n);
  UtilityCache cache;
  if (n == 1) {
    EvalCounters& c = state.counters;
    r.values = {eval_utility(game, Coalition::full_of(1), &cache, c)};
    r.converged = true;
    finish_counters(r, state, t0);
    return r;
  }

  const double u_grand =
      eval_utility(game, Coalition::full_of(n), &cache, state.counters);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  auto accumulate = [&](const Coalition& z, double u, double weight) {
    const auto ms = z.members();
    for (int i : ms) {
      b(i) += weight * u;
      for (int j : ms) a(i, j) += weight;
    }
  };

  bool used_ridge = false;
  const auto solve_now = [&](bool* ridge_flag) {
    const Eigen::VectorXd phi =
        solve_constrained_ls(a, b, u_grand, opt.ridge, ridge_flag);
    return std::vector<double>(phi.data(), phi.data() + n);
  };

  if (opt.exhaustive) {
    if (n > 25) throw std::invalid_argument("re exhaustive: n too large");
    const std::size_t total = 1ULL << n;
    for (std::size_t mask = 1; mask + 1 < total; ++mask) {
      const Coalition z = Coalition::from_mask(n, mask);
      const double u = eval_utility(game, z, &cache, state.counters);
      accumulate(z, u, kernel_weight(n, z.size()));
    }
    r.values = solve_now(&used_ridge);
    r.converged = true;
  } else {
    SamplerConfig scfg = opt.sampler;
    scfg.size_dist = SizeDistribution::kernel;
    scfg.min_size = 1;
    scfg.max_size = n - 1;
    CoalitionSampler cs(scfg, n, -1, hash_combine(seed, 0x4e07));

    ConvergenceMonitor monitor(opt.convergence, n);
    SnapshotDriver snaps(n, opt.use_convergence ? &monitor : nullptr, &r.trace);
    bool converged = false;
    const auto phi_fn = [&] {
      bool ignored = false;
      return solve_now(&ignored);
    };

    for (std::uint64_t t = 0; t < opt.n_samples; ++t) {
      if (converged) break;
      if (state.counters.n_uc.load() >= opt.convergence.max_evals) break;
      const Coalition z = cs.next();
      const double pmf = cs.pmf(z);
      if (pmf <= 0.0) throw std::logic_error("re: sampler produced zero-probability draw");
      const double u = eval_utility(game, z, &cache, state.counters);
      accumulate(z, u, kernel_weight(n, z.size()) / pmf);
      converged |= snaps.poll(state.counters.n_uc.load(), phi_fn);
    }
    r.values = solve_now(&used_ridge);
    if (opt.use_convergence) attach_convergence(r, monitor, converged);
  }
  if (used_ridge)
    r.warnings.push_back("re: singular normal equations, ridge fallback used");
  finish_counters(r, state, t0);
  return r;
}

ShapleyResult mle_shapley(const GameSpec& game, const MleOptions& opt, std::uint64_t seed) {
  const double t0 = wall_now();
  const int n = game.players.n;
  if (opt.grid_size < 2) throw std::invalid_argument("mle: grid_size must be >= 2");
  if (opt.samples_per_q < 1) throw std::invalid_argument("mle: samples_per_q must be >= 1");
  const int grid = opt.grid_size;
  const double h = 1.0 / (grid - 1);

  ShapleyResult r;
  EstimateState state(n);
  UtilityCache cache;

  std::vector<std::vector<double>> e_sum(static_cast<std::size_t>(n),
                                         std::vector<double>(static_cast<std::size_t>(grid), 0.0));
  std::vector<std::vector<std::uint64_t>> e_cnt(
      static_cast<std::size_t>(n), std::vector<std::uint64_t>(static_cast<std::size_t>(grid), 0));

  const auto integrate = [&] {
    std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      auto e_at = [&](int j) {
        const auto cnt = e_cnt[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        return cnt == 0 ? 0.0
                        : e_sum[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /
                              static_cast<double>(cnt);
      };
      for (int j = 0; j + 1 < grid; ++j) acc += 0.5 * h * (e_at(j) + e_at(j + 1));
      phi[static_cast<std::size_t>(i)] = acc;
    }
    return phi;
  };

  if (opt.exhaustive) {
    if (n > 25) throw std::invalid_argument("mle exhaustive: n too large");
    const std::size_t total = 1ULL << n;
    std::vector<double> u(total);
    u[0] = 0.0;
    for (std::size_t mask = 1; mask < total; ++mask)
      u[mask] = eval_utility(game, Coalition::from_mask(n, mask), &cache, state.counters);
    // per-size marginal sums: e_i(q) = sum_s q^s (1-q)^(n-1-s) A_i(s)
    for (int i = 0; i < n; ++i) {
      std::vector<double> a_s(static_cast<std::size_t>(n), 0.0);
      const std::size_t bit = 1ULL << i;
      for (std::size_t mask = 0; mask < total; ++mask) {
        if (mask & bit) continue;
        a_s[static_cast<std::size_t>(std::popcount(mask))] += u[mask | bit] - u[mask];
      }
      for (int j = 0; j < grid; ++j) {
        const double q = j * h;
        double e = 0.0;
        for (int s = 0; s < n; ++s) {
          const double w = std::pow(q, s) * std::pow(1.0 - q, n - 1 - s);
          e += w * a_s[static_cast<std::size_t>(s)];
        }
        e_sum[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = e;
        e_cnt[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
      }
    }
    r.values = integrate();
    r.converged = true;
    finish_counters(r, state, t0);
    return r;
  }

  BernoulliCoalitionSampler bern(opt.sampler.strategy, n, hash_combine(seed, 0x31e5));
  ConvergenceMonitor monitor(opt.convergence, n);
  SnapshotDriver snaps(n, opt.use_convergence ? &monitor : nullptr, &r.trace);
  bool converged = false;
  const auto phi_fn = [&] { return integrate(); };

  double u_grand = 0.0;
  if (opt.optimization.tc.enabled)
    u_grand = eval_utility(game, Coalition::full_of(n), &cache, state.counters);

  std::uint64_t stalled_passes = 0;
  while (!converged && state.counters.n_uc.load() < opt.convergence.max_evals) {
    if (space_saturated(cache, n) || stalled_passes >= 16) {
      r.warnings.push_back(kSaturationNote);
      break;
    }
    const std::uint64_t pass_start_uc = state.counters.n_uc.load();
    for (int j = 0; j < grid && !converged; ++j) {
      const double q = j * h;
      for (int rep = 0; rep < opt.samples_per_q && !converged; ++rep) {
        const Coalition base = bern.next(q);
        for (int i = 0; i < n; ++i) {
          const Coalition without = base.without(i);
          const double u_no = eval_utility(game, without, &cache, state.counters);
          double marginal = 0.0;
          if (opt.optimization.tc.enabled &&
              should_truncate(u_no, u_grand, opt.optimization.tc.ratio)) {
            marginal = 0.0;  // skip the joining evaluation
          } else {
            const double u_yes =
                eval_utility(game, base.with(i), &cache, state.counters);
            marginal = u_yes - u_no;
          }
          e_sum[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += marginal;
          ++e_cnt[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          state.add_marginal(i, marginal);
          converged |= snaps.poll(state.counters.n_uc.load(), phi_fn);
        }
        if (state.counters.n_uc.load() >= opt.convergence.max_evals) break;
      }
    }
    stalled_passes =
        state.counters.n_uc.load() == pass_start_uc ? stalled_passes + 1 : 0;
  }

  r.values = integrate();
  if (opt.use_convergence) attach_convergence(r, monitor, converged);
  attach_marginals(r, state);
  finish_counters(r, state, t0);
  return r;
}

ShapleyResult gt_shapley(const GameSpec& game, const GtOptions& opt, std::uint64_t seed) {
  const double t0 = wall_now();
  const int n = game.players.n;
  ShapleyResult r;
  EstimateState state(n);
  UtilityCache cache;
  const double u_grand =
      eval_utility(game, Coalition::full_of(n), &cache, state.counters);
  if (n == 1) {
    r.values = {u_grand};
    r.converged = true;
    finish_counters(r, state, t0);
    return r;
  }

  double z_norm = 0.0;
  for (int k = 1; k < n; ++k) z_norm += 1.0 / k + 1.0 / (n - k);

  std::vector<double> rsum(static_cast<std::size_t>(n), 0.0);
  const auto phi_from = [&](double t_count) {
    std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
    double total_r = 0.0;
    for (double v : rsum) total_r += v;
    for (int i = 0; i < n; ++i) {
      const double pairwise_sum =
          z_norm * (n * rsum[static_cast<std::size_t>(i)] - total_r) / t_count;
      phi[static_cast<std::size_t>(i)] = (u_grand + pairwise_sum) / n;
    }
    return phi;
  };

  if (opt.exhaustive) {
    if (n > 25) throw std::invalid_argument("gt exhaustive: n too large");
    // exact expectation: R_i = sum_S q(S) U(S) [i in S]
    const std::size_t total = 1ULL << n;
    for (std::size_t mask = 1; mask + 1 < total; ++mask) {
      const Coalition s = Coalition::from_mask(n, mask);
      const int k = s.size();
      const double q_size = (1.0 / k + 1.0 / (n - k)) / z_norm;
      const double q = q_size / binomial_coefficient(n, k);
      const double u = eval_utility(game, s, &cache, state.counters);
      for (int i : s.members()) rsum[static_cast<std::size_t>(i)] += q * u;
    }
    r.values = phi_from(1.0);
    r.converged = true;
    finish_counters(r, state, t0);
    return r;
  }

  SamplerConfig scfg = opt.sampler;
  scfg.size_dist = SizeDistribution::kernel;
  scfg.min_size = 1;
  scfg.max_size = n - 1;
  CoalitionSampler cs(scfg, n, -1, hash_combine(seed, 0x67e5));

  ConvergenceMonitor monitor(opt.convergence, n);
  SnapshotDriver snaps(n, opt.use_convergence ? &monitor : nullptr, &r.trace);
  bool converged = false;
  std::uint64_t tests = 0;
  const auto phi_fn = [&] { return phi_from(std::max<std::uint64_t>(tests, 1)); };

  const auto q_of = [&](const Coalition& s) {
    const int k = s.size();
    return (1.0 / k + 1.0 / (n - k)) / z_norm / binomial_coefficient(n, k);
  };

  for (std::uint64_t t = 0; t < opt.n_tests; ++t) {
    if (converged) break;
    if (state.counters.n_uc.load() >= opt.convergence.max_evals) break;
    const Coalition s = cs.next();
    const double pmf = cs.pmf(s);
    if (pmf <= 0.0) throw std::logic_error("gt: sampler produced zero-probability draw");
    const double w = q_of(s) / pmf;
    const double u = eval_utility(game, s, &cache, state.counters);
    for (int i : s.members()) rsum[static_cast<std::size_t>(i)] += w * u;
    ++tests;
    converged |= snaps.poll(state.counters.n_uc.load(), phi_fn);
  }

  r.values = phi_from(std::max<std::uint64_t>(tests, 1));
  // pairwise residual vs the estimated difference matrix; the projection is
  // exact for difference-consistent estimates, so violations are numeric only
  double max_violation = 0.0;
  const double t_count = std::max<std::uint64_t>(tests, 1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double du =
          z_norm * (rsum[static_cast<std::size_t>(i)] - rsum[static_cast<std::size_t>(j)]) /
          t_count;
      const double got =
          r.values[static_cast<std::size_t>(i)] - r.values[static_cast<std::size_t>(j)];
      max_violation = std::max(max_violation, std::abs(got - du));
    }
  if (max_violation > opt.epsilon_target / (2.0 * std::sqrt(static_cast<double>(n))))
    r.warnings.push_back("gt: pairwise residual above the feasibility band");
  if (opt.use_convergence) attach_convergence(r, monitor, converged);
  finish_counters(r, state, t0);
  return r;
}

ShapleyResult cp_shapley(const GameSpec& game, const CpOptions& opt, std::uint64_t seed) {
  const double t0 = wall_now();
  const int n = game.players.n;
  ShapleyResult r;
  EstimateState state(n);
  UtilityCache cache;
  const double u_grand =
      eval_utility(game, Coalition::full_of(n), &cache, state.counters);
  const double phi_bar = u_grand / n;

  const int sparsity =
      opt.sparsity_guess > 0 ? opt.sparsity_guess : std::max(1, n / 4);
  int m = opt.n_measurements > 0
              ? opt.n_measurements
              : 4 * static_cast<int>(std::ceil(std::log2(std::max(n, 2)))) * sparsity;
  m = std::max(m, 1);

  Rng arng(hash_combine(seed, 0xc9a7));
  Eigen::MatrixXd a(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = arng.bernoulli(0.5) ? scale : -scale;

  double lipschitz = 0.0;
  if (opt.sparsity_weight > 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a);
    lipschitz = es.eigenvalues().maxCoeff();
    if (lipschitz <= 0.0) lipschitz = 1.0;
  }

  const auto recover = [&](const std::vector<double>& marginal_means) {
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g(i) = marginal_means[static_cast<std::size_t>(i)] - phi_bar;
    const Eigen::VectorXd b = a * g;
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    if (opt.sparsity_weight <= 0.0) {
      delta = a.completeOrthogonalDecomposition().solve(b);
    } else {
      const double step = 1.0 / lipschitz;
      const double thresh = opt.sparsity_weight / lipschitz;
      for (int it = 0; it < opt.ist_iterations; ++it) {
        const Eigen::VectorXd grad = a.transpose() * (a * delta - b);
        delta -= step * grad;
        for (int i = 0; i < n; ++i) {
          const double v = delta(i);
          delta(i) = v > thresh ? v - thresh : (v < -thresh ? v + thresh : 0.0);
        }
      }
    }
    delta.array() -= delta.mean();  // efficiency projection
    std::vector<double> phi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) phi[static_cast<std::size_t>(i)] = phi_bar + delta(i);
    return phi;
  };

  SamplerConfig scfg = opt.sampler;
  if (opt.exhaustive) scfg.strategy = SampleStrategy::exhaustive;
  PermutationSampler sampler(scfg, n, hash_combine(seed, 0xc203));
  ConvergenceMonitor monitor(opt.convergence, n);
  const bool track = !opt.exhaustive && opt.use_convergence;
  SnapshotDriver snaps(n, track ? &monitor : nullptr, &r.trace);
  bool converged = false;
  const auto phi_fn = [&] { return recover(state.means()); };

  std::uint64_t walks = 0;
  std::uint64_t stalled_walks = 0;
  while (true) {
    if (opt.exhaustive) {
      if (sampler.exhausted()) break;
    } else {
      if (converged) break;
      if (walks >= opt.n_permutations) break;
      if (state.counters.n_uc.load() >= opt.convergence.max_evals) break;
      if (space_saturated(cache, n) || stalled_walks >= kStalledWalkLimit) {
        r.warnings.push_back(kSaturationNote);
        break;
      }
    }
    const std::uint64_t walk_start_uc = state.counters.n_uc.load();
    const Permutation perm = sampler.next();
    Coalition prefix(n);
    double u_prev = 0.0;
    for (int k = 0; k < n; ++k) {
      const int p = perm.order[static_cast<std::size_t>(k)];
      if (opt.optimization.tc.enabled &&
          should_truncate(u_prev, u_grand, opt.optimization.tc.ratio)) {
        for (int j = k; j < n; ++j)
          state.add_marginal(perm.order[static_cast<std::size_t>(j)], 0.0);
        break;
      }
      prefix.add(p);
      const double u_cur = eval_utility(game, prefix, &cache, state.counters);
      state.add_marginal(p, u_cur - u_prev);
      u_prev = u_cur;
      if (track) converged |= snaps.poll(state.counters.n_uc.load(), phi_fn);
    }
    ++walks;
    stalled_walks =
        state.counters.n_uc.load() == walk_start_uc ? stalled_walks + 1 : 0;
  }

  r.values = recover(state.means());
  if (track) attach_convergence(r, monitor, converged);
  attach_marginals(r, state);
  finish_counters(r, state, t0);
  return r;
}

std::vector<double> linear_closed_form(const LinearModel& model,
                                       const std::vector<double>& explicand,
                                       const std::vector<double>& train_means,
                                       int output_class) {
  if (static_cast<int>(explicand.size()) != model.n_features() ||
      train_means.size() != explicand.size())
    throw std::invalid_argument("linear_closed_form: size mismatch");
  if (output_class < 0 || output_class >= model.n_classes())
    throw std::invalid_argument("linear_closed_form: class out of range");
  std::vector<double> phi(explicand.size());
  for (std::size_t f = 0; f < phi.size(); ++f)
    phi[f] = model.weight(output_class, static_cast<int>(f)) *
             (explicand[f] - train_means[f]);
  return phi;
}

ShapleyResult loo_values(const GameSpec& game) {
  const double t0 = wall_now();
  const int n = game.players.n;
  ShapleyResult r;
  EstimateState state(n);
  UtilityCache cache;
  const Coalition full = Coalition::full_of(n);
  const double u_grand = eval_utility(game, full, &cache, state.counters);
  r.values.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    r.values[static_cast<std::size_t>(i)] =
        u_grand - eval_utility(game, full.without(i), &cache, state.counters);
  r.converged = true;
  finish_counters(r, state, t0);
  return r;
}

ShapleyResult uniform_division(const GameSpec& game) {
  const double t0 = wall_now();
  const int n = game.players.n;
  ShapleyResult r;
  EstimateState state(n);
  UtilityCache cache;
  const double u_grand =
      eval_utility(game, Coalition::full_of(n), &cache, state.counters);
  r.values.assign(static_cast<std::size_t>(n), u_grand / n);
  r.converged = true;
  finish_counters(r, state, t0);
  return r;
}

}  // namespace svkit
