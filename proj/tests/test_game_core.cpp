#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "svkit/game.hpp"

using namespace svkit;

TEST_CASE("coalition set operations") {
  Coalition c = Coalition::empty_of(5);
  CHECK(c.n_players() == 5);
  CHECK(c.is_empty());
  CHECK(c.size() == 0);

  c.add(1);
  c.add(3);
  CHECK(c.size() == 2);
  CHECK(c.contains(1));
  CHECK(c.contains(3));
  CHECK_FALSE(c.contains(0));

  c.add(1);  // idempotent
  CHECK(c.size() == 2);

  c.remove(1);
  CHECK_FALSE(c.contains(1));
  CHECK(c.size() == 1);
  c.remove(1);  // removing an absent player is a no-op
  CHECK(c.size() == 1);

  const Coalition grown = c.with(4);
  CHECK(grown.contains(4));
  CHECK_FALSE(c.contains(4));  // with/without do not mutate
  const Coalition shrunk = grown.without(3);
  CHECK_FALSE(shrunk.contains(3));
  CHECK(grown.contains(3));
}

TEST_CASE("coalition construction helpers") {
  const Coalition full = Coalition::full_of(4);
  CHECK(full.size() == 4);
  CHECK(full.is_full());
  CHECK_FALSE(full.is_empty());

  const Coalition listed = Coalition::of(6, {0, 2, 5});
  CHECK(listed.members() == std::vector<int>{0, 2, 5});
  CHECK(listed.low_mask() == 0b100101ULL);

  const Coalition masked = Coalition::from_mask(6, 0b100101ULL);
  CHECK(masked == listed);
  CHECK(masked.hash() == listed.hash());

  const Coalition comp = listed.complement();
  CHECK(comp.members() == std::vector<int>{1, 3, 4});
  CHECK(comp.size() + listed.size() == 6);
  CHECK(comp.complement() == listed);
}

TEST_CASE("coalition wider than one word") {
  Coalition c = Coalition::empty_of(70);
  c.add(0);
  c.add(63);
  c.add(64);
  c.add(69);
  CHECK(c.size() == 4);
  CHECK(c.words().size() == 2);
  CHECK(c.contains(64));
  CHECK(c.members() == std::vector<int>{0, 63, 64, 69});
  CHECK(c.complement().size() == 66);
  CHECK(Coalition::full_of(70).size() == 70);

  Coalition other = Coalition::of(70, {0, 63, 64, 69});
  CHECK(other == c);
  CHECK(other.hash() == c.hash());
}

TEST_CASE("coalition argument validation") {
  CHECK_THROWS_AS(Coalition(-1), std::invalid_argument);
  CHECK_THROWS_AS(Coalition::from_mask(3, 0b1000ULL), std::invalid_argument);
  CHECK_THROWS_AS(Coalition::from_mask(70, 1ULL), std::invalid_argument);
  Coalition c(4);
  CHECK_THROWS_AS(c.add(4), std::out_of_range);
  CHECK_THROWS_AS(c.add(-1), std::out_of_range);
  CHECK_THROWS_AS((void)c.contains(9), std::out_of_range);
}

TEST_CASE("permutation validation") {
  CHECK(Permutation::identity(4).order == std::vector<int>{0, 1, 2, 3});

  Permutation ok{{2, 0, 1}};
  CHECK_NOTHROW(validate_permutation(ok, 3));

  Permutation dup{{0, 0, 1}};
  CHECK_THROWS_AS(validate_permutation(dup, 3), std::invalid_argument);
  Permutation range{{0, 1, 3}};
  CHECK_THROWS_AS(validate_permutation(range, 3), std::invalid_argument);
  Permutation shorter{{0, 1}};
  CHECK_THROWS_AS(validate_permutation(shorter, 3), std::invalid_argument);
}

TEST_CASE("predecessors in a permutation") {
  const Permutation perm{{2, 0, 1}};
  CHECK(predecessors(perm, 2).is_empty());
  CHECK(predecessors(perm, 0).members() == std::vector<int>{2});
  CHECK(predecessors(perm, 1).members() == std::vector<int>{0, 2});
  CHECK_THROWS_AS(predecessors(perm, 7), std::invalid_argument);
}

namespace {

GameSpec size_game(int n, int* calls) {
  GameSpec g;
  g.players.n = n;
  g.utility.name = "size";
  g.utility.fn = [n, calls](const Coalition& c) {
    if (calls != nullptr) ++*calls;
    return static_cast<double>(c.size()) / n;
  };
  return g;
}

}  // namespace

TEST_CASE("empty coalition short-circuits to zero") {
  int calls = 0;
  const GameSpec g = size_game(3, &calls);
  EvalCounters counters;
  UtilityCache cache;

  CHECK(eval_utility(g, Coalition::empty_of(3), &cache, counters) == 0.0);
  CHECK(calls == 0);
  CHECK(counters.n_uc.load() == 0);
  CHECK(cache.size() == 0);
}

TEST_CASE("cache hits do not count as evaluations") {
  int calls = 0;
  const GameSpec g = size_game(3, &calls);
  EvalCounters counters;
  UtilityCache cache;
  const Coalition c = Coalition::of(3, {0, 2});

  const double first = eval_utility(g, c, &cache, counters);
  CHECK(first == doctest::Approx(2.0 / 3.0));
  CHECK(counters.n_uc.load() == 1);
  CHECK(counters.cache_hits.load() == 0);
  CHECK(calls == 1);

  const double second = eval_utility(g, c, &cache, counters);
  CHECK(second == first);
  CHECK(counters.n_uc.load() == 1);
  CHECK(counters.cache_hits.load() == 1);
  CHECK(calls == 1);

  // a different coalition is a fresh evaluation
  eval_utility(g, Coalition::of(3, {1}), &cache, counters);
  CHECK(counters.n_uc.load() == 2);
  CHECK(cache.size() == 2);
}

TEST_CASE("eval without a cache recomputes") {
  int calls = 0;
  const GameSpec g = size_game(3, &calls);
  EvalCounters counters;
  const Coalition c = Coalition::of(3, {1});
  eval_utility(g, c, nullptr, counters);
  eval_utility(g, c, nullptr, counters);
  CHECK(calls == 2);
  CHECK(counters.n_uc.load() == 2);
}

TEST_CASE("non-finite utility values are rejected") {
  GameSpec g;
  g.players.n = 2;
  g.utility.name = "nan";
  g.utility.fn = [](const Coalition&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  EvalCounters counters;
  CHECK_THROWS_AS(eval_utility(g, Coalition::of(2, {0}), nullptr, counters),
                  std::runtime_error);

  g.utility.fn = [](const Coalition&) {
    return std::numeric_limits<double>::infinity();
  };
  CHECK_THROWS_AS(eval_utility(g, Coalition::of(2, {1}), nullptr, counters),
                  std::runtime_error);
}

TEST_CASE("coalition size must match the game") {
  const GameSpec g = size_game(3, nullptr);
  EvalCounters counters;
  CHECK_THROWS_AS(eval_utility(g, Coalition::of(4, {0}), nullptr, counters),
                  std::invalid_argument);
}

TEST_CASE("utility cache stores and reports entries") {
  UtilityCache cache;
  const Coalition a = Coalition::of(4, {0, 1});
  CHECK_FALSE(cache.lookup(a).has_value());
  cache.insert(a, 0.5);
  REQUIRE(cache.lookup(a).has_value());
  CHECK(*cache.lookup(a) == 0.5);
  CHECK(cache.size() == 1);

  // same members, same key
  CHECK(cache.lookup(Coalition::from_mask(4, 0b11ULL)).has_value());
}
