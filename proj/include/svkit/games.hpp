#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svkit/data.hpp"
#include "svkit/game.hpp"
#include "svkit/model.hpp"

namespace svkit {

enum class Task { RI, DV, DSV, FL };

Task task_from_string(const std::string& s);
std::string task_to_string(Task t);

enum class PlayerKind { feature, tuple, dataset, model };
PlayerKind task_player_kind(Task t);
PlayerKind player_kind_from_string(const std::string& s);
std::string player_kind_to_string(PlayerKind k);

struct GameOptions {
  TrainBudget budget;
  double learning_rate = 0.1;
  int n_players = 0;        // DV valued tuples / DSV shards / FL clients; 0 = default
  bool use_knn = false;     // cheap KNN(k) utility instead of logistic training
  int knn_k = 5;
  int explicand_index = 0;  // RI: test row to explain
  bool ri_probability = true;  // RI: class probability vs raw class score
  int ri_class = -1;  // service queries: fixed class to explain; -1 = predicted
};

// RI explanation context kept on the game for the closed-form path and the
// explanation service.
struct RiContext {
  LinearModel model;
  std::vector<double> explicand;
  int explic_class = 0;
  std::vector<double> baseline_means;
  bool use_probability = true;
};

// Players = features. Utility = model output for the explicand's class with
// absent features imputed to training means, centered at the all-imputed
// baseline so U(empty)=0 holds structurally.
GameSpec make_ri_game(const SplitTable& data, const GameOptions& opt, std::uint64_t seed);

// Same utility over an already-prepared context; lets a service reuse one
// trained model across many explicands.
GameSpec ri_game_from_context(std::shared_ptr<const RiContext> ctx, std::uint64_t seed);

// Players = a designated prefix of the training rows; the remainder is a
// fixed background set joined to every coalition. Utility = test accuracy.
GameSpec make_dv_game(const SplitTable& data, const GameOptions& opt, std::uint64_t seed);

// Players = disjoint shards of the training rows. Utility = test accuracy of
// a model trained on the union of the member shards.
GameSpec make_dsv_game(const SplitTable& data, const GameOptions& opt, std::uint64_t seed);

// Players = clients with pre-trained local models. Utility = test accuracy of
// the uniform parameter average over the member models.
GameSpec make_fl_game(const SplitTable& data, const GameOptions& opt, std::uint64_t seed);

GameSpec make_game(Task task, const SplitTable& data, const GameOptions& opt,
                   std::uint64_t seed);

// Synthetic utility tables (cheap, hash-backed, deterministic per seed).
// iid: U(S) ~ Uniform(0,1) independently per coalition.
GameSpec iid_table_game(int n_players, std::uint64_t seed);
// additive base v_i ~ Uniform(0.5,1.5) plus bounded interaction noise.
GameSpec noisy_additive_game(int n_players, std::uint64_t seed,
                             double interaction = 0.25);
// U(S) = sum of member values; exact SV is the value vector.
GameSpec additive_game(const std::vector<double>& values);
// explicit utility table indexed by coalition bit mask; by_mask[0] ignored.
GameSpec table_game_from_values(int n_players, const std::vector<double>& by_mask,
                                const std::string& label = "table");

// player values of an additive game; helper for fixtures
std::vector<double> noisy_additive_base(int n_players, std::uint64_t seed);

}  // namespace svkit
