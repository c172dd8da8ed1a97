#include "svkit/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "svkit/rng.hpp"

namespace svkit {

PrivacyKind privacy_from_string(const std::string& s) {
  if (s.empty() || s == "None" || s == "none") return PrivacyKind::none;
  if (s == "DP" || s == "dp") return PrivacyKind::dp;
  if (s == "QT" || s == "qt") return PrivacyKind::qt;
  if (s == "DR" || s == "dr") return PrivacyKind::dr;
  throw std::invalid_argument("unknown privacy measure '" + s +
                              "' (choose None, DP, QT or DR)");
}

std::string privacy_to_string(PrivacyKind k) {
  switch (k) {
    case PrivacyKind::none: return "None";
    case PrivacyKind::dp: return "DP";
    case PrivacyKind::qt: return "QT";
    case PrivacyKind::dr: return "DR";
  }
  return "None";
}

std::vector<double> dp_mask(const std::vector<double>& values, double sigma,
                            std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("dp: sigma must be >= 0");
  std::vector<double> out(values.size());
  Rng rng(hash_combine(seed, 0xd9));
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = values[i] + sigma * rng.normal();
  return out;
}

std::vector<double> qt_mask(const std::vector<double>& values, int levels) {
  if (levels < 1) throw std::invalid_argument("qt: levels must be >= 1");
  if (values.empty()) return {};
  std::set<double> distinct(values.begin(), values.end());
  if (static_cast<int>(distinct.size()) <= levels) return values;

  const double lo = *distinct.begin();
  const double hi = *distinct.rbegin();
  const double width = (hi - lo) / levels;
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    int bin = static_cast<int>((values[i] - lo) / width);
    bin = std::clamp(bin, 0, levels - 1);
    out[i] = lo + (bin + 0.5) * width;
  }
  return out;
}

MaskedValues dr_mask(const std::vector<double>& values,
                     const std::vector<double>& marginal_variance, int keep) {
  if (keep < 1) throw std::invalid_argument("dr: keep must be >= 1");
  if (marginal_variance.size() != values.size())
    throw std::invalid_argument("dr: variance vector size mismatch");
  for (double v : marginal_variance)
    if (std::isnan(v))
      throw std::invalid_argument("dr: marginal variances unavailable");

  const int n = static_cast<int>(values.size());
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double va = marginal_variance[static_cast<std::size_t>(a)];
    const double vb = marginal_variance[static_cast<std::size_t>(b)];
    if (va != vb) return va > vb;
    return a < b;
  });

  MaskedValues out;
  out.values.assign(values.size(), 0.0);
  out.suppressed.assign(values.size(), true);
  for (int r = 0; r < std::min(keep, n); ++r) {
    const auto i = static_cast<std::size_t>(order[static_cast<std::size_t>(r)]);
    out.values[i] = values[i];
    out.suppressed[i] = false;
  }
  return out;
}

MaskedValues apply_privacy(const ShapleyResult& result, const PrivacyConfig& cfg,
                           std::uint64_t seed) {
  const int n = static_cast<int>(result.values.size());
  MaskedValues out;
  switch (cfg.kind) {
    case PrivacyKind::none:
      out.values = result.values;
      break;
    case PrivacyKind::dp:
      out.values = dp_mask(result.values, cfg.dp_sigma, seed);
      break;
    case PrivacyKind::qt: {
      const int levels = cfg.qt_levels > 0 ? cfg.qt_levels : (n + 1) / 2;
      out.values = qt_mask(result.values, levels);
      break;
    }
    case PrivacyKind::dr: {
      const int keep = cfg.dr_keep > 0 ? cfg.dr_keep : (n + 1) / 2;
      if (result.marginal_variance.empty())
        throw std::invalid_argument(
            "dr: the chosen estimator does not expose marginal variances");
      out = dr_mask(result.values, result.marginal_variance, keep);
      break;
    }
  }
  return out;
}

}  // namespace svkit
