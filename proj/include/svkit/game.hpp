#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "svkit/rng.hpp"

namespace svkit {

using PlayerId = int;

struct PlayerSet {
  int n = 0;
  bool valid() const { return n >= 1; }
};

// Set of players out of a fixed universe 0..n-1. Backed by 64-bit words so
// n <= 64 stays a single word; the word sequence is the canonical encoding
// used for hashing and cache keys.
class Coalition {
 public:
  Coalition() = default;
  explicit Coalition(int n_players);

  static Coalition empty_of(int n_players) { return Coalition(n_players); }
  static Coalition full_of(int n_players);
  static Coalition of(int n_players, std::initializer_list<int> members);
  // mask bit i <-> player i; n_players <= 64
  static Coalition from_mask(int n_players, std::uint64_t mask);

  int n_players() const { return n_; }
  bool contains(int p) const;
  void add(int p);
  void remove(int p);
  Coalition with(int p) const;
  Coalition without(int p) const;
  int size() const;
  bool is_empty() const;
  bool is_full() const { return size() == n_; }
  Coalition complement() const;
  std::vector<int> members() const;
  std::uint64_t low_mask() const { return words_.empty() ? 0 : words_[0]; }
  const std::vector<std::uint64_t>& words() const { return words_; }
  std::uint64_t hash() const;

  bool operator==(const Coalition& o) const {
    return n_ == o.n_ && words_ == o.words_;
  }

 private:
  void check_player(int p) const;

  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const {
    return static_cast<std::size_t>(c.hash());
  }
};

struct Permutation {
  std::vector<int> order;

  static Permutation identity(int n);
  int size() const { return static_cast<int>(order.size()); }
};

// throws std::invalid_argument on duplicates, gaps or out-of-range entries
void validate_permutation(const Permutation& perm, int n_players);

// players strictly before p in perm
Coalition predecessors(const Permutation& perm, int p);

enum class CostClass { cheap, model_training };

struct TrainBudget {
  int epochs = 30;
  int max_batch = 256;
};

struct Utility;
using UtilityFn = std::function<double(const Coalition&)>;

struct Utility {
  std::string name;
  bool deterministic = true;
  CostClass cost = CostClass::cheap;
  UtilityFn fn;
  // Present on model-training utilities only: rebuild with a different
  // training budget, or against a subset of the test rows.
  std::function<std::shared_ptr<Utility>(const TrainBudget&)> rebuild_with_budget;
  std::function<std::shared_ptr<Utility>(const std::vector<int>&)> rebuild_with_test_rows;
};

// Memo table for utility values. Concurrent inserts of the same key are
// benign (same value for a deterministic utility); lookups never block
// writers for long. The cache never changes returned values, only cost.
class UtilityCache {
 public:
  std::optional<double> lookup(const Coalition& c) const;
  void insert(const Coalition& c, double v);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<Coalition, double, CoalitionHash> map_;
};

// Run-level evaluation accounting. n_uc counts actual utility computations;
// cache hits never increment it.
struct EvalCounters {
  std::atomic<std::uint64_t> n_uc{0};
  std::atomic<std::uint64_t> cache_hits{0};
  std::atomic<double> utility_seconds{0.0};

  void add_seconds(double s) {
    utility_seconds.fetch_add(s, std::memory_order_relaxed);
  }
};

// Per-game accumulation of model train/inference cost, filled in by the
// builtin model-backed utilities.
struct UtilityTimers {
  std::atomic<double> train_seconds{0.0};
  std::atomic<double> infer_seconds{0.0};
  std::atomic<std::uint64_t> calls{0};
};

struct Table;        // data.hpp
class LinearModel;   // model.hpp
struct RiContext;    // games.hpp

struct GameSpec {
  PlayerSet players;
  Utility utility;
  std::uint64_t seed = 0;
  std::string label;

  // model-backed games only
  std::shared_ptr<const Table> test_data;
  std::shared_ptr<UtilityTimers> timers;
  std::function<std::vector<LinearModel>(int, std::uint64_t)> train_probe_models;
  std::shared_ptr<const RiContext> ri;
};

// U(empty) = 0 by definition: short-circuited, never evaluated, never counted.
// cache may be null. Throws std::runtime_error on a non-finite utility value.
double eval_utility(const GameSpec& game, const Coalition& c, UtilityCache* cache,
                    EvalCounters& counters);

}  // namespace svkit
