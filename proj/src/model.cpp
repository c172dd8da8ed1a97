#include "svkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svkit/rng.hpp"

namespace svkit {

LinearModel::LinearModel(int n_features, int n_classes)
    : n_features_(n_features), n_classes_(n_classes) {
  if (n_features < 1 || n_classes < 1)
    throw std::invalid_argument("linear model: bad shape");
  w_.assign(static_cast<std::size_t>(n_features) * n_classes, 0.0);
  b_.assign(static_cast<std::size_t>(n_classes), 0.0);
}

double& LinearModel::weight(int c, int f) {
  return w_[static_cast<std::size_t>(c) * n_features_ + f];
}

double LinearModel::weight(int c, int f) const {
  return w_[static_cast<std::size_t>(c) * n_features_ + f];
}

std::vector<double> LinearModel::scores(const std::vector<double>& row) const {
  if (static_cast<int>(row.size()) != n_features_)
    throw std::invalid_argument("linear model: row width mismatch");
  std::vector<double> s(static_cast<std::size_t>(n_classes_));
  for (int c = 0; c < n_classes_; ++c) {
    double acc = b_[static_cast<std::size_t>(c)];
    const double* wc = &w_[static_cast<std::size_t>(c) * n_features_];
    for (int f = 0; f < n_features_; ++f) acc += wc[f] * row[static_cast<std::size_t>(f)];
    s[static_cast<std::size_t>(c)] = acc;
  }
  return s;
}

std::vector<double> LinearModel::probabilities(const std::vector<double>& row) const {
  auto s = scores(row);
  const double m = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (auto& v : s) {
    v = std::exp(v - m);
    z += v;
  }
  for (auto& v : s) v /= z;
  return s;
}

int LinearModel::predict(const std::vector<double>& row) const {
  const auto s = scores(row);
  int best = 0;
  for (int c = 1; c < n_classes_; ++c)
    if (s[static_cast<std::size_t>(c)] > s[static_cast<std::size_t>(best)]) best = c;
  return best;
}

LinearModel train_logistic(const Table& train, const TrainSettings& settings,
                           std::uint64_t seed) {
  if (train.n_rows() == 0 || train.n_features() == 0)
    throw std::invalid_argument("train_logistic: empty training data");
  const int n_classes = settings.n_classes > 0 ? settings.n_classes
                                               : std::max(train.n_classes(), 1);
  LinearModel model(train.n_features(), n_classes);
  const int epochs = settings.budget.epochs;
  if (epochs < 0) throw std::invalid_argument("train_logistic: negative epochs");
  if (epochs == 0) return model;

  bool single_class = true;
  for (int i = 1; i < train.n_rows(); ++i)
    if (train.y[static_cast<std::size_t>(i)] != train.y[0]) {
      single_class = false;
      break;
    }
  if (single_class) {
    model.bias(train.y[0]) = 1.0;
    return model;
  }

  const int rows = train.n_rows();
  const int d = train.n_features();
  const int batch = std::max(1, settings.budget.max_batch);
  const bool full_batch = rows <= batch;
  Rng rng(hash_combine(seed, 0x10615));
  std::vector<int> order(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i) order[static_cast<std::size_t>(i)] = i;

  std::vector<double> grad_w(static_cast<std::size_t>(d) * n_classes);
  std::vector<double> grad_b(static_cast<std::size_t>(n_classes));

  for (int epoch = 0; epoch < epochs; ++epoch) {
    if (!full_batch) rng.shuffle(order);
    for (int start = 0; start < rows; start += batch) {
      const int stop = std::min(rows, start + batch);
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
      for (int bi = start; bi < stop; ++bi) {
        const int i = full_batch ? bi : order[static_cast<std::size_t>(bi)];
        const auto& row = train.x[static_cast<std::size_t>(i)];
        auto p = model.probabilities(row);
        p[static_cast<std::size_t>(train.y[static_cast<std::size_t>(i)])] -= 1.0;
        for (int c = 0; c < n_classes; ++c) {
          const double pc = p[static_cast<std::size_t>(c)];
          if (pc == 0.0) continue;
          double* gw = &grad_w[static_cast<std::size_t>(c) * d];
          for (int f = 0; f < d; ++f) gw[f] += pc * row[static_cast<std::size_t>(f)];
          grad_b[static_cast<std::size_t>(c)] += pc;
        }
      }
      const double scale = settings.learning_rate / (stop - start);
      for (int c = 0; c < n_classes; ++c) {
        for (int f = 0; f < d; ++f)
          model.weight(c, f) -= scale * grad_w[static_cast<std::size_t>(c) * d + f];
        model.bias(c) -= scale * grad_b[static_cast<std::size_t>(c)];
      }
    }
  }
  return model;
}

double accuracy(const LinearModel& model, const Table& test) {
  if (test.n_rows() == 0) throw std::invalid_argument("accuracy: empty test set");
  int hits = 0;
  for (int i = 0; i < test.n_rows(); ++i)
    if (model.predict(test.x[static_cast<std::size_t>(i)]) ==
        test.y[static_cast<std::size_t>(i)])
      ++hits;
  return static_cast<double>(hits) / test.n_rows();
}

LinearModel fedavg(const std::vector<const LinearModel*>& models) {
  if (models.empty()) throw std::invalid_argument("fedavg: no models");
  const int d = models[0]->n_features();
  const int k = models[0]->n_classes();
  for (const auto* m : models)
    if (m->n_features() != d || m->n_classes() != k)
      throw std::invalid_argument("fedavg: model shape mismatch");
  LinearModel avg(d, k);
  const double inv = 1.0 / static_cast<double>(models.size());
  for (int c = 0; c < k; ++c) {
    for (int f = 0; f < d; ++f) {
      double acc = 0.0;
      for (const auto* m : models) acc += m->weight(c, f);
      avg.weight(c, f) = acc * inv;
    }
    double acc = 0.0;
    for (const auto* m : models) acc += m->bias(c);
    avg.bias(c) = acc * inv;
  }
  return avg;
}

int knn_predict(const Table& train, const std::vector<double>& row, int k) {
  if (train.n_rows() == 0) throw std::invalid_argument("knn: empty training data");
  const int kk = std::min(k, train.n_rows());
  // (distance^2, row index), stable under distance ties
  std::vector<std::pair<double, int>> d(static_cast<std::size_t>(train.n_rows()));
  for (int i = 0; i < train.n_rows(); ++i) {
    const auto& t = train.x[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (std::size_t f = 0; f < row.size(); ++f) {
      const double diff = t[f] - row[f];
      acc += diff * diff;
    }
    d[static_cast<std::size_t>(i)] = {acc, i};
  }
  std::partial_sort(d.begin(), d.begin() + kk, d.end());
  std::vector<int> votes;
  for (int j = 0; j < kk; ++j) {
    const int label = train.y[static_cast<std::size_t>(d[static_cast<std::size_t>(j)].second)];
    if (label >= static_cast<int>(votes.size())) votes.resize(static_cast<std::size_t>(label) + 1, 0);
    ++votes[static_cast<std::size_t>(label)];
  }
  int best = 0;
  for (int c = 1; c < static_cast<int>(votes.size()); ++c)
    if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
  return best;
}

double knn_accuracy(const Table& train, const Table& test, int k) {
  if (test.n_rows() == 0) throw std::invalid_argument("knn_accuracy: empty test set");
  int hits = 0;
  for (int i = 0; i < test.n_rows(); ++i)
    if (knn_predict(train, test.x[static_cast<std::size_t>(i)], k) ==
        test.y[static_cast<std::size_t>(i)])
      ++hits;
  return static_cast<double>(hits) / test.n_rows();
}

}  // namespace svkit
