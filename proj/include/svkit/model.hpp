#pragma once

#include <cstdint>
#include <vector>

#include "svkit/data.hpp"
#include "svkit/game.hpp"

namespace svkit {

// Multinomial logistic regression trained by seeded gradient descent.
// Deterministic for a given (data, budget, seed); argmax ties resolve to the
// lowest class index.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(int n_features, int n_classes);

  int n_features() const { return n_features_; }
  int n_classes() const { return n_classes_; }

  std::vector<double> scores(const std::vector<double>& row) const;
  std::vector<double> probabilities(const std::vector<double>& row) const;
  int predict(const std::vector<double>& row) const;

  double& weight(int c, int f);
  double weight(int c, int f) const;
  double& bias(int c) { return b_[static_cast<std::size_t>(c)]; }
  double bias(int c) const { return b_[static_cast<std::size_t>(c)]; }

 private:
  int n_features_ = 0;
  int n_classes_ = 0;
  std::vector<double> w_;  // n_classes x n_features
  std::vector<double> b_;
};

struct TrainSettings {
  TrainBudget budget;
  double learning_rate = 0.1;
  int n_classes = 0;  // 0 = infer from data
};

// Softmax cross-entropy GD: full batch when rows <= budget.max_batch, else
// seeded mini-batches. Single-class data yields a constant predictor for that
// class; epochs=0 returns the zero initialization.
LinearModel train_logistic(const Table& train, const TrainSettings& settings,
                           std::uint64_t seed);

double accuracy(const LinearModel& model, const Table& test);

// Per-parameter uniform average. All models must share shape.
LinearModel fedavg(const std::vector<const LinearModel*>& models);

// majority label among the k nearest train rows (Euclidean); distance ties
// resolve to the lower row index, vote ties to the smaller label.
int knn_predict(const Table& train, const std::vector<double>& row, int k);
double knn_accuracy(const Table& train, const Table& test, int k);

}  // namespace svkit
