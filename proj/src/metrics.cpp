#include "svkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace svkit {

double approximation_error(const std::vector<double>& estimate,
                           const std::vector<double>& reference) {
  if (estimate.size() != reference.size() || estimate.empty())
    throw std::invalid_argument("approximation_error: size mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    dot += estimate[i] * reference[i];
    na += estimate[i] * estimate[i];
    nb += reference[i] * reference[i];
  }
  if (na == 0.0 && nb == 0.0) return 0.0;
  if (na == 0.0 || nb == 0.0) return 1.0;
  return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

double protection_effectiveness(const std::vector<double>& error_protected,
                                const std::vector<double>& error_plain) {
  if (error_protected.size() != error_plain.size() || error_plain.empty())
    throw std::invalid_argument("effectiveness: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < error_plain.size(); ++i)
    acc += error_protected[i] - error_plain[i];
  return acc / static_cast<double>(error_plain.size());
}

double protection_effectiveness_abs(const std::vector<double>& error_protected,
                                    const std::vector<double>& error_plain) {
  if (error_protected.size() != error_plain.size() || error_plain.empty())
    throw std::invalid_argument("effectiveness: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < error_plain.size(); ++i)
    acc += std::abs(error_protected[i] - error_plain[i]);
  return acc / static_cast<double>(error_plain.size());
}

std::vector<int> rank_positions(const std::vector<double>& values,
                                const std::vector<bool>& suppressed) {
  if (!suppressed.empty() && suppressed.size() != values.size())
    throw std::invalid_argument("rank_positions: flag vector size mismatch");
  const int n = static_cast<int>(values.size());
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  auto is_sup = [&](int i) {
    return !suppressed.empty() && suppressed[static_cast<std::size_t>(i)];
  };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const bool sa = is_sup(a), sb = is_sup(b);
    if (sa != sb) return sb;  // suppressed players go last
    const double va = values[static_cast<std::size_t>(a)];
    const double vb = values[static_cast<std::size_t>(b)];
    if (va != vb) return va > vb;
    return a < b;
  });
  std::vector<int> pos(values.size());
  for (int r = 0; r < n; ++r) pos[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
  return pos;
}

double ranking_variance(const std::vector<double>& a, const std::vector<double>& b,
                        const std::vector<bool>& suppressed_a,
                        const std::vector<bool>& suppressed_b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("ranking_variance: size mismatch");
  const auto pa = rank_positions(a, suppressed_a);
  const auto pb = rank_positions(b, suppressed_b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = pa[i] - pb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

UtilityDelta utility_delta(const GameSpec& game, int player, UtilityCache* cache,
                           EvalCounters& counters) {
  const int n = game.players.n;
  if (player < 0 || player >= n)
    throw std::invalid_argument("utility_delta: player out of range");
  const Coalition full = Coalition::full_of(n);
  UtilityDelta d;
  d.removal = eval_utility(game, full.without(player), cache, counters) -
              eval_utility(game, full, cache, counters);
  d.addition = eval_utility(game, Coalition::of(n, {player}), cache, counters);
  return d;
}

std::vector<double> mc_variance_profile(const std::vector<std::vector<double>>& runs) {
  if (runs.size() < 2) throw std::invalid_argument("variance profile: need >= 2 runs");
  const std::size_t n = runs.front().size();
  for (const auto& r : runs)
    if (r.size() != n) throw std::invalid_argument("variance profile: ragged runs");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (const auto& r : runs) mean += r[i];
    mean /= static_cast<double>(runs.size());
    double acc = 0.0;
    for (const auto& r : runs) {
      const double d = r[i] - mean;
      acc += d * d;
    }
    out[i] = acc / static_cast<double>(runs.size() - 1);
  }
  return out;
}

double mean_absolute_error(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("mae: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("spearman: need two same-length vectors");
  const auto avg_rank = [](const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    std::vector<int> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return v[static_cast<std::size_t>(x)] < v[static_cast<std::size_t>(y)];
    });
    std::vector<double> rank(v.size(), 0.0);
    int i = 0;
    while (i < n) {
      int j = i;
      while (j + 1 < n && v[static_cast<std::size_t>(order[static_cast<std::size_t>(j + 1)])] ==
                              v[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])
        ++j;
      const double shared = 0.5 * (i + j);
      for (int k = i; k <= j; ++k)
        rank[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = shared;
      i = j + 1;
    }
    return rank;
  };
  const auto ra = avg_rank(a);
  const auto rb = avg_rank(b);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= static_cast<double>(ra.size());
  mb /= static_cast<double>(rb.size());
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace svkit
