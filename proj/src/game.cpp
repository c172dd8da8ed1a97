#include "svkit/game.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace svkit {

namespace {
constexpr int kWordBits = 64;

int word_count(int n) { return (n + kWordBits - 1) / kWordBits; }
}  // namespace

Coalition::Coalition(int n_players) : n_(n_players) {
  if (n_players < 0) throw std::invalid_argument("coalition: negative player count");
  words_.assign(static_cast<std::size_t>(word_count(n_players)), 0);
}

Coalition Coalition::full_of(int n_players) {
  Coalition c(n_players);
  for (int p = 0; p < n_players; ++p) c.add(p);
  return c;
}

Coalition Coalition::of(int n_players, std::initializer_list<int> members) {
  Coalition c(n_players);
  for (int p : members) c.add(p);
  return c;
}

Coalition Coalition::from_mask(int n_players, std::uint64_t mask) {
  if (n_players > kWordBits)
    throw std::invalid_argument("coalition: from_mask needs n <= 64");
  Coalition c(n_players);
  if (n_players > 0) {
    const std::uint64_t valid =
        n_players == kWordBits ? ~0ULL : ((1ULL << n_players) - 1);
    if (mask & ~valid) throw std::invalid_argument("coalition: mask has bits past n");
    c.words_[0] = mask;
  } else if (mask != 0) {
    throw std::invalid_argument("coalition: mask has bits past n");
  }
  return c;
}

void Coalition::check_player(int p) const {
  if (p < 0 || p >= n_) throw std::out_of_range("coalition: player id out of range");
}

bool Coalition::contains(int p) const {
  check_player(p);
  return (words_[static_cast<std::size_t>(p / kWordBits)] >> (p % kWordBits)) & 1ULL;
}

void Coalition::add(int p) {
  check_player(p);
  words_[static_cast<std::size_t>(p / kWordBits)] |= 1ULL << (p % kWordBits);
}

void Coalition::remove(int p) {
  check_player(p);
  words_[static_cast<std::size_t>(p / kWordBits)] &= ~(1ULL << (p % kWordBits));
}

Coalition Coalition::with(int p) const {
  Coalition c = *this;
  c.add(p);
  return c;
}

Coalition Coalition::without(int p) const {
  Coalition c = *this;
  c.remove(p);
  return c;
}

int Coalition::size() const {
  int s = 0;
  for (std::uint64_t w : words_) s += std::popcount(w);
  return s;
}

bool Coalition::is_empty() const {
  for (std::uint64_t w : words_)
    if (w != 0) return false;
  return true;
}

Coalition Coalition::complement() const {
  Coalition c(n_);
  for (std::size_t i = 0; i < words_.size(); ++i) c.words_[i] = ~words_[i];
  const int tail = n_ % kWordBits;
  if (tail != 0 && !c.words_.empty())
    c.words_.back() &= (1ULL << tail) - 1;
  return c;
}

std::vector<int> Coalition::members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::size_t wi = 0; wi < words_.size(); ++wi) {
    std::uint64_t w = words_[wi];
    while (w != 0) {
      const int b = std::countr_zero(w);
      out.push_back(static_cast<int>(wi) * kWordBits + b);
      w &= w - 1;
    }
  }
  return out;
}

std::uint64_t Coalition::hash() const {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(n_));
  for (std::uint64_t w : words_) h = hash_combine(h, w);
  return h;
}

Permutation Permutation::identity(int n) {
  Permutation p;
  p.order.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p.order[static_cast<std::size_t>(i)] = i;
  return p;
}

void validate_permutation(const Permutation& perm, int n_players) {
  if (perm.size() != n_players)
    throw std::invalid_argument("permutation: wrong length");
  std::vector<bool> seen(static_cast<std::size_t>(n_players), false);
  for (int p : perm.order) {
    if (p < 0 || p >= n_players)
      throw std::invalid_argument("permutation: entry out of range");
    if (seen[static_cast<std::size_t>(p)])
      throw std::invalid_argument("permutation: duplicate entry");
    seen[static_cast<std::size_t>(p)] = true;
  }
}

Coalition predecessors(const Permutation& perm, int p) {
  Coalition c(perm.size());
  for (int q : perm.order) {
    if (q == p) return c;
    c.add(q);
  }
  throw std::invalid_argument("predecessors: player not in permutation");
}

std::optional<double> UtilityCache::lookup(const Coalition& c) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = map_.find(c);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

void UtilityCache::insert(const Coalition& c, double v) {
  std::lock_guard<std::mutex> lock(mu_);
  map_.emplace(c, v);
}

std::size_t UtilityCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return map_.size();
}

double eval_utility(const GameSpec& game, const Coalition& c, UtilityCache* cache,
                    EvalCounters& counters) {
  if (c.n_players() != game.players.n)
    throw std::invalid_argument("eval_utility: coalition size mismatch for game '" +
                                game.label + "'");
  if (c.is_empty()) return 0.0;
  if (cache != nullptr) {
    if (auto hit = cache->lookup(c)) {
      counters.cache_hits.fetch_add(1, std::memory_order_relaxed);
      return *hit;
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  const double v = game.utility.fn(c);
  const auto t1 = std::chrono::steady_clock::now();
  counters.add_seconds(std::chrono::duration<double>(t1 - t0).count());
  counters.n_uc.fetch_add(1, std::memory_order_relaxed);
  if (!std::isfinite(v))
    throw std::runtime_error("eval_utility: non-finite utility from game '" +
                             game.label + "'");
  if (cache != nullptr) cache->insert(c, v);
  return v;
}

}  // namespace svkit
