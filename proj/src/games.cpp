#include "svkit/games.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "svkit/rng.hpp"

namespace svkit {

namespace {

constexpr int kDeskScaleRows = 500;

void check_desk_scale(const Table& train, const char* task) {
  if (train.n_rows() > kDeskScaleRows)
    throw std::invalid_argument(std::string(task) +
                                ": training split exceeds desk scale (500 rows)");
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::uint64_t coalition_seed(std::uint64_t game_seed, const Coalition& c) {
  return hash_combine(game_seed, c.hash());
}

double hash_uniform(std::uint64_t game_seed, const Coalition& c, std::uint64_t salt) {
  const std::uint64_t h = mix64(hash_combine(hash_combine(game_seed, salt), c.hash()));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// training rows for a DV coalition: fixed background plus member rows
Table dv_train_table(const Table& valued, const Table& background, const Coalition& c) {
  Table t = background;
  if (t.feature_names.empty()) t.feature_names = valued.feature_names;
  for (int p : c.members())
    t.append_row(valued.x[static_cast<std::size_t>(p)], valued.y[static_cast<std::size_t>(p)]);
  return t;
}

struct DvCore {
  Table valued;
  Table background;
  std::shared_ptr<const Table> test;
  GameOptions opt;
  std::uint64_t seed = 0;
  int n_classes = 0;
  std::shared_ptr<UtilityTimers> timers;
};

Utility make_dv_utility(std::shared_ptr<DvCore> core);

std::shared_ptr<Utility> dv_rebuild_budget(std::shared_ptr<DvCore> core,
                                           const TrainBudget& b) {
  auto next = std::make_shared<DvCore>(*core);
  next->opt.budget = b;
  return std::make_shared<Utility>(make_dv_utility(std::move(next)));
}

std::shared_ptr<Utility> dv_rebuild_test(std::shared_ptr<DvCore> core,
                                         const std::vector<int>& rows) {
  auto next = std::make_shared<DvCore>(*core);
  next->test = std::make_shared<const Table>(core->test->take(rows));
  return std::make_shared<Utility>(make_dv_utility(std::move(next)));
}

Utility make_dv_utility(std::shared_ptr<DvCore> core) {
  Utility u;
  u.name = core->opt.use_knn ? "dv_knn_accuracy" : "dv_accuracy";
  u.deterministic = true;
  u.cost = core->opt.use_knn ? CostClass::cheap : CostClass::model_training;
  u.fn = [core](const Coalition& c) {
    const Table train = dv_train_table(core->valued, core->background, c);
    const double t0 = now_seconds();
    double acc = 0.0;
    if (core->opt.use_knn) {
      acc = knn_accuracy(train, *core->test, core->opt.knn_k);
      core->timers->infer_seconds.fetch_add(now_seconds() - t0, std::memory_order_relaxed);
    } else {
      TrainSettings ts;
      ts.budget = core->opt.budget;
      ts.learning_rate = core->opt.learning_rate;
      ts.n_classes = core->n_classes;
      const LinearModel model = train_logistic(train, ts, coalition_seed(core->seed, c));
      const double t1 = now_seconds();
      acc = accuracy(model, *core->test);
      core->timers->train_seconds.fetch_add(t1 - t0, std::memory_order_relaxed);
      core->timers->infer_seconds.fetch_add(now_seconds() - t1, std::memory_order_relaxed);
    }
    core->timers->calls.fetch_add(1, std::memory_order_relaxed);
    return acc;
  };
  if (!core->opt.use_knn)
    u.rebuild_with_budget = [core](const TrainBudget& b) { return dv_rebuild_budget(core, b); };
  u.rebuild_with_test_rows = [core](const std::vector<int>& rows) {
    return dv_rebuild_test(core, rows);
  };
  return u;
}

struct DsvCore {
  std::vector<Table> shards;
  std::shared_ptr<const Table> test;
  GameOptions opt;
  std::uint64_t seed = 0;
  int n_classes = 0;
  std::shared_ptr<UtilityTimers> timers;
};

Utility make_dsv_utility(std::shared_ptr<DsvCore> core);

std::shared_ptr<Utility> dsv_rebuild_budget(std::shared_ptr<DsvCore> core,
                                            const TrainBudget& b) {
  auto next = std::make_shared<DsvCore>(*core);
  next->opt.budget = b;
  return std::make_shared<Utility>(make_dsv_utility(std::move(next)));
}

std::shared_ptr<Utility> dsv_rebuild_test(std::shared_ptr<DsvCore> core,
                                          const std::vector<int>& rows) {
  auto next = std::make_shared<DsvCore>(*core);
  next->test = std::make_shared<const Table>(core->test->take(rows));
  return std::make_shared<Utility>(make_dsv_utility(std::move(next)));
}

Utility make_dsv_utility(std::shared_ptr<DsvCore> core) {
  Utility u;
  u.name = core->opt.use_knn ? "dsv_knn_accuracy" : "dsv_accuracy";
  u.deterministic = true;
  u.cost = core->opt.use_knn ? CostClass::cheap : CostClass::model_training;
  u.fn = [core](const Coalition& c) {
    Table train;
    train.feature_names = core->shards[0].feature_names;
    for (int p : c.members()) {
      const Table& s = core->shards[static_cast<std::size_t>(p)];
      for (int i = 0; i < s.n_rows(); ++i)
        train.append_row(s.x[static_cast<std::size_t>(i)], s.y[static_cast<std::size_t>(i)]);
    }
    const double t0 = now_seconds();
    double acc = 0.0;
    if (core->opt.use_knn) {
      acc = knn_accuracy(train, *core->test, core->opt.knn_k);
      core->timers->infer_seconds.fetch_add(now_seconds() - t0, std::memory_order_relaxed);
    } else {
      TrainSettings ts;
      ts.budget = core->opt.budget;
      ts.learning_rate = core->opt.learning_rate;
      ts.n_classes = core->n_classes;
      const LinearModel model = train_logistic(train, ts, coalition_seed(core->seed, c));
      const double t1 = now_seconds();
      acc = accuracy(model, *core->test);
      core->timers->train_seconds.fetch_add(t1 - t0, std::memory_order_relaxed);
      core->timers->infer_seconds.fetch_add(now_seconds() - t1, std::memory_order_relaxed);
    }
    core->timers->calls.fetch_add(1, std::memory_order_relaxed);
    return acc;
  };
  if (!core->opt.use_knn)
    u.rebuild_with_budget = [core](const TrainBudget& b) { return dsv_rebuild_budget(core, b); };
  u.rebuild_with_test_rows = [core](const std::vector<int>& rows) {
    return dsv_rebuild_test(core, rows);
  };
  return u;
}

struct FlCore {
  std::vector<Table> shards;
  std::vector<LinearModel> locals;
  std::shared_ptr<const Table> test;
  GameOptions opt;
  std::uint64_t seed = 0;
  int n_classes = 0;
  std::shared_ptr<UtilityTimers> timers;
};

Utility make_fl_utility(std::shared_ptr<FlCore> core);

void fl_pretrain(FlCore& core) {
  core.locals.clear();
  core.locals.reserve(core.shards.size());
  TrainSettings ts;
  ts.budget = core.opt.budget;
  ts.learning_rate = core.opt.learning_rate;
  ts.n_classes = core.n_classes;
  for (std::size_t i = 0; i < core.shards.size(); ++i)
    core.locals.push_back(
        train_logistic(core.shards[i], ts, hash_combine(core.seed, 0xf1 + i)));
}

std::shared_ptr<Utility> fl_rebuild_budget(std::shared_ptr<FlCore> core,
                                           const TrainBudget& b) {
  auto next = std::make_shared<FlCore>(*core);
  next->opt.budget = b;
  fl_pretrain(*next);
  return std::make_shared<Utility>(make_fl_utility(std::move(next)));
}

std::shared_ptr<Utility> fl_rebuild_test(std::shared_ptr<FlCore> core,
                                         const std::vector<int>& rows) {
  auto next = std::make_shared<FlCore>(*core);
  next->test = std::make_shared<const Table>(core->test->take(rows));
  return std::make_shared<Utility>(make_fl_utility(std::move(next)));
}

Utility make_fl_utility(std::shared_ptr<FlCore> core) {
  Utility u;
  u.name = "fl_fedavg_accuracy";
  u.deterministic = true;
  u.cost = CostClass::model_training;
  u.fn = [core](const Coalition& c) {
    std::vector<const LinearModel*> members;
    for (int p : c.members()) members.push_back(&core->locals[static_cast<std::size_t>(p)]);
    const double t0 = now_seconds();
    const LinearModel avg = fedavg(members);
    const double acc = accuracy(avg, *core->test);
    core->timers->infer_seconds.fetch_add(now_seconds() - t0, std::memory_order_relaxed);
    core->timers->calls.fetch_add(1, std::memory_order_relaxed);
    return acc;
  };
  u.rebuild_with_budget = [core](const TrainBudget& b) { return fl_rebuild_budget(core, b); };
  u.rebuild_with_test_rows = [core](const std::vector<int>& rows) {
    return fl_rebuild_test(core, rows);
  };
  return u;
}

std::vector<Table> shard_rows(const Table& train, int n_shards) {
  std::vector<Table> shards;
  shards.reserve(static_cast<std::size_t>(n_shards));
  const int rows = train.n_rows();
  for (int i = 0; i < n_shards; ++i) {
    const int lo = static_cast<int>(static_cast<long long>(rows) * i / n_shards);
    const int hi = static_cast<int>(static_cast<long long>(rows) * (i + 1) / n_shards);
    shards.push_back(train.slice(lo, hi));
  }
  return shards;
}

Coalition random_half_coalition(int n, Rng& rng) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  rng.shuffle(ids);
  Coalition c(n);
  const int half = std::max(1, n / 2);
  for (int i = 0; i < half; ++i) c.add(ids[static_cast<std::size_t>(i)]);
  return c;
}

}  // namespace

Task task_from_string(const std::string& s) {
  if (s == "RI") return Task::RI;
  if (s == "DV") return Task::DV;
  if (s == "DSV") return Task::DSV;
  if (s == "FL") return Task::FL;
  throw std::invalid_argument("unknown task '" + s + "' (expected RI|DV|DSV|FL)");
}

std::string task_to_string(Task t) {
  switch (t) {
    case Task::RI: return "RI";
    case Task::DV: return "DV";
    case Task::DSV: return "DSV";
    case Task::FL: return "FL";
  }
  return "?";
}

PlayerKind task_player_kind(Task t) {
  switch (t) {
    case Task::RI: return PlayerKind::feature;
    case Task::DV: return PlayerKind::tuple;
    case Task::DSV: return PlayerKind::dataset;
    case Task::FL: return PlayerKind::model;
  }
  return PlayerKind::feature;
}

PlayerKind player_kind_from_string(const std::string& s) {
  if (s == "feature") return PlayerKind::feature;
  if (s == "tuple") return PlayerKind::tuple;
  if (s == "dataset") return PlayerKind::dataset;
  if (s == "model") return PlayerKind::model;
  throw std::invalid_argument("unknown player kind '" + s +
                              "' (expected feature|tuple|dataset|model)");
}

std::string player_kind_to_string(PlayerKind k) {
  switch (k) {
    case PlayerKind::feature: return "feature";
    case PlayerKind::tuple: return "tuple";
    case PlayerKind::dataset: return "dataset";
    case PlayerKind::model: return "model";
  }
  return "?";
}

GameSpec ri_game_from_context(std::shared_ptr<const RiContext> ctx, std::uint64_t seed) {
  if (!ctx) throw std::invalid_argument("RI: null context");
  if (ctx->explicand.size() != ctx->baseline_means.size() ||
      static_cast<int>(ctx->explicand.size()) != ctx->model.n_features())
    throw std::invalid_argument("RI: context size mismatch");
  if (ctx->explic_class < 0 || ctx->explic_class >= ctx->model.n_classes())
    throw std::invalid_argument("RI: explicand class out of range");

  auto timers = std::make_shared<UtilityTimers>();
  const int n = static_cast<int>(ctx->explicand.size());

  GameSpec g;
  g.players = {n};
  g.seed = seed;
  g.label = "RI(n=" + std::to_string(n) + ")";
  g.timers = timers;
  g.ri = ctx;

  auto out_for = [ctx](const std::vector<double>& row) {
    if (ctx->use_probability)
      return ctx->model.probabilities(row)[static_cast<std::size_t>(ctx->explic_class)];
    return ctx->model.scores(row)[static_cast<std::size_t>(ctx->explic_class)];
  };
  const double baseline = out_for(ctx->baseline_means);

  Utility u;
  u.name = "ri_model_output";
  u.deterministic = true;
  u.cost = CostClass::cheap;
  u.fn = [ctx, timers, out_for, baseline](const Coalition& c) {
    std::vector<double> row = ctx->baseline_means;
    for (int p : c.members()) row[static_cast<std::size_t>(p)] = ctx->explicand[static_cast<std::size_t>(p)];
    const double t0 = now_seconds();
    const double v = out_for(row) - baseline;
    timers->infer_seconds.fetch_add(now_seconds() - t0, std::memory_order_relaxed);
    timers->calls.fetch_add(1, std::memory_order_relaxed);
    return v;
  };
  g.utility = std::move(u);
  return g;
}

GameSpec make_ri_game(const SplitTable& data, const GameOptions& opt, std::uint64_t seed) {
  check_desk_scale(data.train, "RI");
  if (data.test.n_rows() == 0) throw std::invalid_argument("RI: empty test split");
  if (opt.explicand_index < 0 || opt.explicand_index >= data.test.n_rows())
    throw std::invalid_argument("RI: explicand index out of range");

  auto ctx = std::make_shared<RiContext>();
  TrainSettings ts;
  ts.budget = opt.budget;
  ts.learning_rate = opt.learning_rate;
  ctx->model = train_logistic(data.train, ts, hash_combine(seed, 0x41));
  ctx->explicand = data.test.x[static_cast<std::size_t>(opt.explicand_index)];
  ctx->explic_class = data.test.y[static_cast<std::size_t>(opt.explicand_index)];
  ctx->baseline_means = feature_means(data.train);
  ctx->use_probability = opt.ri_probability;
  return ri_game_from_context(ctx, seed);
}

GameSpec make_dv_game(const SplitTable& data, const GameOptions& opt, std::uint64_t seed) {
  check_desk_scale(data.train, "DV");
  if (data.test.n_rows() == 0) throw std::invalid_argument("DV: empty test split");
  const int rows = data.train.n_rows();
  int n = opt.n_players > 0 ? opt.n_players : std::min(12, std::max(2, rows / 2));
  if (n < 1 || n > rows)
    throw std::invalid_argument("DV: player count must be in [1, train rows]");

  auto core = std::make_shared<DvCore>();
  core->valued = data.train.slice(0, n);
  core->background = data.train.slice(n, rows);
  core->test = std::make_shared<const Table>(data.test);
  core->opt = opt;
  core->seed = seed;
  core->n_classes = data.train.n_classes();
  core->timers = std::make_shared<UtilityTimers>();

  GameSpec g;
  g.players = {n};
  g.seed = seed;
  g.label = "DV(n=" + std::to_string(n) + ")";
  g.test_data = core->test;
  g.timers = core->timers;
  g.utility = make_dv_utility(core);
  g.train_probe_models = [core](int count, std::uint64_t probe_seed) {
    std::vector<LinearModel> models;
    Rng rng(hash_combine(probe_seed, 0xd7));
    TrainSettings ts;
    ts.budget = core->opt.budget;
    ts.learning_rate = core->opt.learning_rate;
    ts.n_classes = core->n_classes;
    const int n_players = core->valued.n_rows();
    for (int m = 0; m < count; ++m) {
      const Coalition half = random_half_coalition(n_players, rng);
      const Table train = dv_train_table(core->valued, core->background, half);
      models.push_back(train_logistic(train, ts, hash_combine(probe_seed, 0x100 + m)));
    }
    return models;
  };
  return g;
}

GameSpec make_dsv_game(const SplitTable& data, const GameOptions& opt, std::uint64_t seed) {
  check_desk_scale(data.train, "DSV");
  if (data.test.n_rows() == 0) throw std::invalid_argument("DSV: empty test split");
  const int rows = data.train.n_rows();
  const int n = opt.n_players > 0 ? opt.n_players : 10;
  if (n < 1 || n > rows)
    throw std::invalid_argument("DSV: shard count must be in [1, train rows]");

  auto core = std::make_shared<DsvCore>();
  core->shards = shard_rows(data.train, n);
  core->test = std::make_shared<const Table>(data.test);
  core->opt = opt;
  core->seed = seed;
  core->n_classes = data.train.n_classes();
  core->timers = std::make_shared<UtilityTimers>();

  GameSpec g;
  g.players = {n};
  g.seed = seed;
  g.label = "DSV(n=" + std::to_string(n) + ")";
  g.test_data = core->test;
  g.timers = core->timers;
  g.utility = make_dsv_utility(core);
  g.train_probe_models = [core](int count, std::uint64_t probe_seed) {
    std::vector<LinearModel> models;
    Rng rng(hash_combine(probe_seed, 0xd5));
    TrainSettings ts;
    ts.budget = core->opt.budget;
    ts.learning_rate = core->opt.learning_rate;
    ts.n_classes = core->n_classes;
    const int n_players = static_cast<int>(core->shards.size());
    for (int m = 0; m < count; ++m) {
      const Coalition half = random_half_coalition(n_players, rng);
      Table train;
      train.feature_names = core->shards[0].feature_names;
      for (int p : half.members()) {
        const Table& s = core->shards[static_cast<std::size_t>(p)];
        for (int i = 0; i < s.n_rows(); ++i)
          train.append_row(s.x[static_cast<std::size_t>(i)], s.y[static_cast<std::size_t>(i)]);
      }
      models.push_back(train_logistic(train, ts, hash_combine(probe_seed, 0x200 + m)));
    }
    return models;
  };
  return g;
}

GameSpec make_fl_game(const SplitTable& data, const GameOptions& opt, std::uint64_t seed) {
  check_desk_scale(data.train, "FL");
  if (data.test.n_rows() == 0) throw std::invalid_argument("FL: empty test split");
  const int rows = data.train.n_rows();
  const int n = opt.n_players > 0 ? opt.n_players : 10;
  if (n < 1 || n > rows)
    throw std::invalid_argument("FL: client count must be in [1, train rows]");

  auto core = std::make_shared<FlCore>();
  core->shards = shard_rows(data.train, n);
  core->test = std::make_shared<const Table>(data.test);
  core->opt = opt;
  core->seed = seed;
  core->n_classes = data.train.n_classes();
  core->timers = std::make_shared<UtilityTimers>();
  fl_pretrain(*core);

  GameSpec g;
  g.players = {n};
  g.seed = seed;
  g.label = "FL(n=" + std::to_string(n) + ")";
  g.test_data = core->test;
  g.timers = core->timers;
  g.utility = make_fl_utility(core);
  g.train_probe_models = [core](int count, std::uint64_t probe_seed) {
    std::vector<LinearModel> models;
    Rng rng(hash_combine(probe_seed, 0xf7));
    const int n_players = static_cast<int>(core->shards.size());
    for (int m = 0; m < count; ++m) {
      const Coalition half = random_half_coalition(n_players, rng);
      std::vector<const LinearModel*> members;
      for (int p : half.members()) members.push_back(&core->locals[static_cast<std::size_t>(p)]);
      models.push_back(fedavg(members));
    }
    return models;
  };
  return g;
}

GameSpec make_game(Task task, const SplitTable& data, const GameOptions& opt,
                   std::uint64_t seed) {
  switch (task) {
    case Task::RI: return make_ri_game(data, opt, seed);
    case Task::DV: return make_dv_game(data, opt, seed);
    case Task::DSV: return make_dsv_game(data, opt, seed);
    case Task::FL: return make_fl_game(data, opt, seed);
  }
  throw std::invalid_argument("make_game: unknown task");
}

GameSpec iid_table_game(int n_players, std::uint64_t seed) {
  if (n_players < 1) throw std::invalid_argument("iid_table_game: need n >= 1");
  GameSpec g;
  g.players = {n_players};
  g.seed = seed;
  g.label = "iid_table(n=" + std::to_string(n_players) + ")";
  g.utility.name = "iid_table";
  g.utility.fn = [seed](const Coalition& c) { return hash_uniform(seed, c, 0x7ab1e); };
  return g;
}

std::vector<double> noisy_additive_base(int n_players, std::uint64_t seed) {
  Rng rng(hash_combine(seed, 0xadd));
  std::vector<double> v(static_cast<std::size_t>(n_players));
  for (auto& x : v) x = rng.uniform(0.5, 1.5);
  return v;
}

GameSpec noisy_additive_game(int n_players, std::uint64_t seed, double interaction) {
  if (n_players < 1) throw std::invalid_argument("noisy_additive_game: need n >= 1");
  const auto v = noisy_additive_base(n_players, seed);
  GameSpec g;
  g.players = {n_players};
  g.seed = seed;
  g.label = "noisy_additive(n=" + std::to_string(n_players) + ")";
  g.utility.name = "noisy_additive";
  g.utility.fn = [v, seed, interaction](const Coalition& c) {
    double acc = 0.0;
    for (int p : c.members()) acc += v[static_cast<std::size_t>(p)];
    return acc + interaction * (2.0 * hash_uniform(seed, c, 0x901e) - 1.0);
  };
  return g;
}

GameSpec additive_game(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("additive_game: need values");
  GameSpec g;
  g.players = {static_cast<int>(values.size())};
  g.label = "additive(n=" + std::to_string(values.size()) + ")";
  g.utility.name = "additive";
  g.utility.fn = [values](const Coalition& c) {
    double acc = 0.0;
    for (int p : c.members()) acc += values[static_cast<std::size_t>(p)];
    return acc;
  };
  return g;
}

GameSpec table_game_from_values(int n_players, const std::vector<double>& by_mask,
                                const std::string& label) {
  if (n_players < 1 || n_players > 24)
    throw std::invalid_argument("table_game_from_values: need 1 <= n <= 24");
  if (by_mask.size() != (1ULL << n_players))
    throw std::invalid_argument("table_game_from_values: need 2^n values");
  GameSpec g;
  g.players = {n_players};
  g.label = label;
  g.utility.name = "table";
  g.utility.fn = [by_mask](const Coalition& c) {
    return by_mask[static_cast<std::size_t>(c.low_mask())];
  };
  return g;
}

}  // namespace svkit
