#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

namespace svkit {

struct ConvergenceConfig {
  double tau = 0.05;
  std::uint64_t max_evals = 1000000;
  int window = 5;  // snapshots compared against the current estimate
};

struct ConvergenceVerdict {
  bool ready = false;      // enough history for a verdict
  double delta = 0.0;      // defined only when ready
  bool converged = false;  // ready && delta < tau
  int skipped_terms = 0;   // |current component| < floor, left out of delta
};

// Rolling relative-change test. Snapshots are taken every n utility
// computations; the current estimate is compared against the last `window`
// snapshots, averaging |(phi_i^e - phi_i^{e-m*n}) / phi_i^e| over players and
// window offsets. Components with |phi_i^e| < 1e-12 are skipped and counted.
// No verdict before `window` prior snapshots exist (>= window*n evals).
class ConvergenceMonitor {
 public:
  ConvergenceMonitor(const ConvergenceConfig& cfg, int n_players)
      : cfg_(cfg), n_(n_players) {
    if (cfg.tau <= 0.0) throw std::invalid_argument("convergence: tau must be > 0");
    if (cfg.window < 1) throw std::invalid_argument("convergence: window must be >= 1");
    if (n_players < 1) throw std::invalid_argument("convergence: need n >= 1");
  }

  // e must be a strictly increasing multiple of n.
  ConvergenceVerdict update_and_check(const std::vector<double>& phi, std::uint64_t e) {
    if (static_cast<int>(phi.size()) != n_)
      throw std::invalid_argument("convergence: estimate size mismatch");
    if (e == 0 || e % static_cast<std::uint64_t>(n_) != 0)
      throw std::invalid_argument("convergence: eval count not a positive multiple of n");
    if (e <= last_e_ && last_e_ != 0)
      throw std::invalid_argument("convergence: eval count not increasing");
    last_e_ = e;

    ConvergenceVerdict v;
    if (static_cast<int>(ring_.size()) == cfg_.window) {
      v.ready = true;
      double acc = 0.0;
      int skipped = 0;
      for (const auto& prior : ring_) {
        for (int i = 0; i < n_; ++i) {
          const double cur = phi[static_cast<std::size_t>(i)];
          if (cur > -1e-12 && cur < 1e-12) {
            ++skipped;
            continue;
          }
          const double diff = (cur - prior[static_cast<std::size_t>(i)]) / cur;
          acc += diff < 0 ? -diff : diff;
        }
      }
      v.delta = acc / (static_cast<double>(cfg_.window) * n_);
      v.skipped_terms = skipped;
      total_skipped_ += static_cast<std::uint64_t>(skipped);
      v.converged = v.delta < cfg_.tau;
      last_delta_ = v.delta;
      has_delta_ = true;
    }
    ring_.push_front(phi);
    if (static_cast<int>(ring_.size()) > cfg_.window) ring_.pop_back();
    ++snapshots_;
    return v;
  }

  bool budget_exceeded(std::uint64_t e) const { return e >= cfg_.max_evals; }
  std::uint64_t snapshots() const { return snapshots_; }
  std::uint64_t total_skipped() const { return total_skipped_; }
  bool has_delta() const { return has_delta_; }
  double last_delta() const { return last_delta_; }
  const ConvergenceConfig& config() const { return cfg_; }

 private:
  ConvergenceConfig cfg_;
  int n_;
  std::deque<std::vector<double>> ring_;  // most recent first
  std::uint64_t snapshots_ = 0;
  std::uint64_t last_e_ = 0;
  std::uint64_t total_skipped_ = 0;
  double last_delta_ = 0.0;
  bool has_delta_ = false;
};

}  // namespace svkit
