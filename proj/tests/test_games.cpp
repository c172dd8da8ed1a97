#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "svkit/data.hpp"
#include "svkit/estimators.hpp"
#include "svkit/games.hpp"
#include "svkit/model.hpp"

using namespace svkit;

namespace {

double eval(const GameSpec& g, const Coalition& c) {
  EvalCounters counters;
  return eval_utility(g, c, nullptr, counters);
}

SplitTable blob_split(int rows, int features, std::uint64_t seed) {
  return split(make_blobs("blobs2", rows, features, seed), 0.7, seed);
}

}  // namespace

TEST_CASE("task and player kind names round-trip") {
  for (const auto* name : {"RI", "DV", "DSV", "FL"}) {
    CHECK(task_to_string(task_from_string(name)) == name);
  }
  CHECK_THROWS_AS(task_from_string("XX"), std::invalid_argument);

  CHECK(task_player_kind(Task::RI) == PlayerKind::feature);
  CHECK(task_player_kind(Task::DV) == PlayerKind::tuple);
  CHECK(task_player_kind(Task::DSV) == PlayerKind::dataset);
  CHECK(task_player_kind(Task::FL) == PlayerKind::model);
  for (const auto* name : {"feature", "tuple", "dataset", "model"}) {
    CHECK(player_kind_to_string(player_kind_from_string(name)) == name);
  }
  CHECK_THROWS_AS(player_kind_from_string("row"), std::invalid_argument);
}

TEST_CASE("table game reads utilities from the mask table") {
  const std::vector<double> by_mask = {0, 1, 2, 4, 3, 5, 6, 8};
  const GameSpec g = table_game_from_values(3, by_mask, "demo");
  CHECK(g.players.n == 3);
  CHECK(g.label == "demo");
  for (std::uint64_t mask = 1; mask < 8; ++mask) {
    CHECK(eval(g, Coalition::from_mask(3, mask)) ==
          by_mask[static_cast<std::size_t>(mask)]);
  }

  CHECK_THROWS_AS(table_game_from_values(3, {0, 1}, "short"), std::invalid_argument);
  CHECK_THROWS_AS(table_game_from_values(25, {}, "wide"), std::invalid_argument);
}

TEST_CASE("additive game sums member values") {
  const GameSpec g = additive_game({1.0, 2.0, 3.0});
  CHECK(eval(g, Coalition::of(3, {1})) == 2.0);
  CHECK(eval(g, Coalition::of(3, {0, 2})) == 4.0);
  CHECK(eval(g, Coalition::full_of(3)) == 6.0);
  CHECK_THROWS_AS(additive_game({}), std::invalid_argument);
}

TEST_CASE("iid table game is deterministic and bounded") {
  const GameSpec a = iid_table_game(6, 11);
  const GameSpec b = iid_table_game(6, 11);
  const GameSpec c = iid_table_game(6, 12);
  bool any_diff = false;
  for (std::uint64_t mask = 1; mask < 64; ++mask) {
    const Coalition coal = Coalition::from_mask(6, mask);
    const double va = eval(a, coal);
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
    CHECK(eval(b, coal) == va);
    any_diff |= eval(c, coal) != va;
  }
  CHECK(any_diff);
  CHECK_THROWS_AS(iid_table_game(0, 1), std::invalid_argument);
}

TEST_CASE("noisy additive game stays near its base values") {
  const int n = 5;
  const auto base = noisy_additive_base(n, 3);
  const GameSpec g = noisy_additive_game(n, 3, 0.25);
  for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
    const Coalition coal = Coalition::from_mask(n, mask);
    double sum = 0.0;
    for (int p : coal.members()) sum += base[static_cast<std::size_t>(p)];
    CHECK(std::abs(eval(g, coal) - sum) <= 0.25 + 1e-12);
  }

  // zero interaction degenerates to the additive game
  const GameSpec pure = noisy_additive_game(n, 3, 0.0);
  const ShapleyResult r = exact_shapley(pure, false);
  for (int i = 0; i < n; ++i)
    CHECK(r.values[static_cast<std::size_t>(i)] ==
          doctest::Approx(base[static_cast<std::size_t>(i)]));
}

TEST_CASE("ri game explains the model at the explicand") {
  const SplitTable data = blob_split(60, 4, 21);
  GameOptions opt;
  opt.budget.epochs = 25;
  const GameSpec g = make_ri_game(data, opt, 5);
  CHECK(g.players.n == 4);
  REQUIRE(g.ri != nullptr);
  CHECK(g.ri->explic_class == data.test.y[0]);
  CHECK(g.ri->explicand == data.test.x[0]);
  CHECK(g.ri->baseline_means == feature_means(data.train));

  // grand coalition utility: model output at the explicand, centered on the
  // all-baseline output
  const double p_x =
      g.ri->model.probabilities(g.ri->explicand)[static_cast<std::size_t>(g.ri->explic_class)];
  const double p_base =
      g.ri->model.probabilities(g.ri->baseline_means)[static_cast<std::size_t>(g.ri->explic_class)];
  CHECK(eval(g, Coalition::full_of(4)) == doctest::Approx(p_x - p_base));

  // mixed coalitions splice explicand features onto the baseline
  std::vector<double> row = g.ri->baseline_means;
  row[1] = g.ri->explicand[1];
  const double expect =
      g.ri->model.probabilities(row)[static_cast<std::size_t>(g.ri->explic_class)] - p_base;
  CHECK(eval(g, Coalition::of(4, {1})) == doctest::Approx(expect));

  GameOptions bad = opt;
  bad.explicand_index = data.test.n_rows();
  CHECK_THROWS_AS(make_ri_game(data, bad, 5), std::invalid_argument);
}

TEST_CASE("ri context validation") {
  CHECK_THROWS_AS(ri_game_from_context(nullptr, 1), std::invalid_argument);

  auto ctx = std::make_shared<RiContext>();
  ctx->model = LinearModel(2, 2);
  ctx->explicand = {0.5, 0.5};
  ctx->baseline_means = {0.4};
  CHECK_THROWS_AS(ri_game_from_context(ctx, 1), std::invalid_argument);

  ctx->baseline_means = {0.4, 0.4};
  ctx->explic_class = 2;
  CHECK_THROWS_AS(ri_game_from_context(ctx, 1), std::invalid_argument);
}

TEST_CASE("dv game values training tuples against held-out accuracy") {
  const SplitTable data = blob_split(40, 3, 9);
  GameOptions opt;
  opt.n_players = 6;
  opt.use_knn = true;
  opt.knn_k = 3;
  const GameSpec g = make_dv_game(data, opt, 2);
  CHECK(g.players.n == 6);
  CHECK(g.utility.cost == CostClass::cheap);
  CHECK(g.test_data->n_rows() == data.test.n_rows());

  const double full = eval(g, Coalition::full_of(6));
  CHECK(full >= 0.0);
  CHECK(full <= 1.0);
  CHECK(eval(g, Coalition::of(6, {2})) >= 0.0);
  CHECK(eval(g, Coalition::full_of(6)) == full);
  CHECK(g.timers->calls.load() == 3);

  // grand coalition trains on background plus all valued rows, which is the
  // whole train split
  CHECK(full == doctest::Approx(knn_accuracy(data.train, data.test, 3)));

  GameOptions deflt;
  deflt.use_knn = true;
  CHECK(make_dv_game(data, deflt, 2).players.n == 12);

  GameOptions bad;
  bad.n_players = data.train.n_rows() + 1;
  CHECK_THROWS_AS(make_dv_game(data, bad, 2), std::invalid_argument);
}

TEST_CASE("dv game with model training exposes rebuild hooks") {
  const SplitTable data = blob_split(30, 3, 4);
  GameOptions opt;
  opt.n_players = 4;
  opt.budget.epochs = 5;
  const GameSpec g = make_dv_game(data, opt, 2);
  CHECK(g.utility.cost == CostClass::model_training);
  REQUIRE(g.utility.rebuild_with_budget);
  REQUIRE(g.utility.rebuild_with_test_rows);

  const double v = eval(g, Coalition::of(4, {0, 1}));
  CHECK(v >= 0.0);
  CHECK(v <= 1.0);

  TrainBudget cheap;
  cheap.epochs = 1;
  const auto light = g.utility.rebuild_with_budget(cheap);
  const double lv = light->fn(Coalition::of(4, {0, 1}));
  CHECK(lv >= 0.0);
  CHECK(lv <= 1.0);

  const auto narrowed = g.utility.rebuild_with_test_rows({0, 1});
  CHECK(narrowed->fn(Coalition::of(4, {0, 1})) >= 0.0);

  const auto probes = g.train_probe_models(3, 7);
  CHECK(probes.size() == 3);
  CHECK(probes[0].n_features() == 3);
}

TEST_CASE("dsv game shards the train split") {
  const SplitTable data = blob_split(50, 3, 13);
  GameOptions opt;
  opt.n_players = 5;
  opt.use_knn = true;
  const GameSpec g = make_dsv_game(data, opt, 3);
  CHECK(g.players.n == 5);

  // all shards together reconstruct the train split
  CHECK(eval(g, Coalition::full_of(5)) ==
        doctest::Approx(knn_accuracy(data.train, data.test, opt.knn_k)));

  GameOptions deflt;
  deflt.use_knn = true;
  CHECK(make_dsv_game(data, deflt, 3).players.n == 10);
}

TEST_CASE("fl game scores federated averages of local models") {
  const SplitTable data = blob_split(40, 3, 17);
  GameOptions opt;
  opt.n_players = 4;
  opt.budget.epochs = 8;
  const GameSpec g = make_fl_game(data, opt, 6);
  CHECK(g.players.n == 4);
  CHECK(g.utility.name == "fl_fedavg_accuracy");

  for (int p = 0; p < 4; ++p) {
    const double v = eval(g, Coalition::of(4, {p}));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  const double full = eval(g, Coalition::full_of(4));
  CHECK(eval(g, Coalition::full_of(4)) == full);

  const auto probes = g.train_probe_models(2, 9);
  CHECK(probes.size() == 2);
}

TEST_CASE("make_game dispatches on task") {
  const SplitTable data = blob_split(40, 3, 19);
  GameOptions opt;
  opt.n_players = 4;
  opt.use_knn = true;
  opt.budget.epochs = 5;
  CHECK(make_game(Task::DV, data, opt, 1).label == "DV(n=4)");
  CHECK(make_game(Task::DSV, data, opt, 1).label == "DSV(n=4)");
  CHECK(make_game(Task::FL, data, opt, 1).label == "FL(n=4)");
  CHECK(make_game(Task::RI, data, opt, 1).label == "RI(n=3)");
}

TEST_CASE("model games refuse oversized training splits") {
  Table big;
  big.feature_names = {"a"};
  for (int i = 0; i < 501; ++i) big.append_row({static_cast<double>(i)}, i % 2);
  SplitTable data;
  data.train = big;
  data.test = big.slice(0, 4);
  GameOptions opt;
  CHECK_THROWS_AS(make_dv_game(data, opt, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_dsv_game(data, opt, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_fl_game(data, opt, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_ri_game(data, opt, 1), std::invalid_argument);
}
