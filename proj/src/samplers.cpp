#include "svkit/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svkit {

SampleStrategy strategy_from_string(const std::string& s) {
  if (s == "random") return SampleStrategy::random;
  if (s == "stratified") return SampleStrategy::stratified;
  if (s == "antithetic") return SampleStrategy::antithetic;
  if (s == "exhaustive") return SampleStrategy::exhaustive;
  throw std::invalid_argument("unknown sampling strategy '" + s +
                              "' (expected random|stratified|antithetic)");
}

std::string strategy_to_string(SampleStrategy s) {
  switch (s) {
    case SampleStrategy::random: return "random";
    case SampleStrategy::stratified: return "stratified";
    case SampleStrategy::antithetic: return "antithetic";
    case SampleStrategy::exhaustive: return "exhaustive";
  }
  return "?";
}

double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

PermutationSampler::PermutationSampler(const SamplerConfig& cfg, int n_players,
                                       std::uint64_t seed)
    : cfg_(cfg), n_(n_players), rng_(hash_combine(seed, 0x9e24)) {
  if (n_ < 1) throw std::invalid_argument("permutation sampler: need n >= 1");
  if (cfg_.pivot < 0 || cfg_.pivot >= n_)
    throw std::invalid_argument("permutation sampler: pivot out of range");
  if (cfg_.strategy == SampleStrategy::exhaustive) {
    base_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) base_[static_cast<std::size_t>(i)] = i;
  }
}

Permutation PermutationSampler::next() {
  Permutation p;
  p.order.resize(static_cast<std::size_t>(n_));
  switch (cfg_.strategy) {
    case SampleStrategy::random: {
      for (int i = 0; i < n_; ++i) p.order[static_cast<std::size_t>(i)] = i;
      rng_.shuffle(p.order);
      break;
    }
    case SampleStrategy::stratified: {
      // one uniform base permutation per block of n; its n rotations put every
      // player in every position exactly once, i.e. pivot-position strata are
      // sampled in exact proportion while each single draw stays uniform
      if (rotation_ == 0) {
        base_.resize(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) base_[static_cast<std::size_t>(i)] = i;
        rng_.shuffle(base_);
      }
      for (int i = 0; i < n_; ++i)
        p.order[static_cast<std::size_t>(i)] =
            base_[static_cast<std::size_t>((i + rotation_) % n_)];
      rotation_ = (rotation_ + 1) % n_;
      break;
    }
    case SampleStrategy::antithetic: {
      if (pending_reverse_) {
        p.order.assign(last_.rbegin(), last_.rend());
        pending_reverse_ = false;
      } else {
        for (int i = 0; i < n_; ++i) p.order[static_cast<std::size_t>(i)] = i;
        rng_.shuffle(p.order);
        last_ = p.order;
        pending_reverse_ = true;
      }
      break;
    }
    case SampleStrategy::exhaustive: {
      if (exhausted_)
        throw std::runtime_error("permutation sampler: exhaustive stream consumed");
      p.order = base_;
      if (!std::next_permutation(base_.begin(), base_.end())) exhausted_ = true;
      break;
    }
  }
  ++draws_;
  return p;
}

CoalitionSampler::CoalitionSampler(const SamplerConfig& cfg, int n_players, int exclude,
                                   std::uint64_t seed)
    : cfg_(cfg), n_(n_players), exclude_(exclude), rng_(hash_combine(seed, 0xc0a1)),
      last_(n_players) {
  if (n_ < 1) throw std::invalid_argument("coalition sampler: need n >= 1");
  if (exclude_ < -1 || exclude_ >= n_)
    throw std::invalid_argument("coalition sampler: excluded player out of range");
  for (int i = 0; i < n_; ++i)
    if (i != exclude_) universe_.push_back(i);
  m_ = static_cast<int>(universe_.size());
  if (m_ < 1) throw std::invalid_argument("coalition sampler: empty universe");
  if (lo_() > hi_())
    throw std::invalid_argument("coalition sampler: empty size range");

  const int lo = lo_(), hi = hi_();
  strata_.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  if (!cfg_.strata_proportions.empty()) {
    if (static_cast<int>(cfg_.strata_proportions.size()) != hi - lo + 1)
      throw std::invalid_argument("coalition sampler: strata proportions length mismatch");
    double z = 0.0;
    for (double v : cfg_.strata_proportions) {
      if (v < 0.0) throw std::invalid_argument("coalition sampler: negative stratum share");
      z += v;
    }
    if (z <= 0.0) throw std::invalid_argument("coalition sampler: zero strata mass");
    for (std::size_t i = 0; i < strata_.size(); ++i)
      strata_[i] = cfg_.strata_proportions[i] / z;
  } else {
    // proportional to stratum size
    double z = 0.0;
    for (int s = lo; s <= hi; ++s) z += binomial_coefficient(m_, s);
    for (int s = lo; s <= hi; ++s)
      strata_[static_cast<std::size_t>(s - lo)] = binomial_coefficient(m_, s) / z;
  }
  emitted_.assign(strata_.size(), 0);
}

int CoalitionSampler::lo_() const {
  int lo = std::max(cfg_.min_size, 0);
  if (cfg_.size_dist == SizeDistribution::kernel) lo = std::max(lo, 1);
  return lo;
}

int CoalitionSampler::hi_() const {
  int hi = cfg_.max_size < 0 ? m_ : std::min(cfg_.max_size, m_);
  if (cfg_.size_dist == SizeDistribution::kernel) hi = std::min(hi, m_ - 1);
  return hi;
}

double CoalitionSampler::size_prob(int s) const {
  const int lo = lo_(), hi = hi_();
  if (s < lo || s > hi) return 0.0;
  if (cfg_.size_dist == SizeDistribution::uniform)
    return 1.0 / static_cast<double>(hi - lo + 1);
  double z = 0.0;
  for (int k = lo; k <= hi; ++k) z += 1.0 / k + 1.0 / (m_ - k);
  return (1.0 / s + 1.0 / (m_ - s)) / z;
}

double CoalitionSampler::strata_prob(int s) const {
  const int lo = lo_(), hi = hi_();
  if (s < lo || s > hi) return 0.0;
  return strata_[static_cast<std::size_t>(s - lo)];
}

Coalition CoalitionSampler::uniform_of_size(int s) {
  std::vector<int> pool = universe_;
  Coalition c(n_);
  for (int i = 0; i < s; ++i) {
    const std::size_t j =
        static_cast<std::size_t>(i) + static_cast<std::size_t>(rng_.below(pool.size() - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    c.add(pool[static_cast<std::size_t>(i)]);
  }
  return c;
}

Coalition CoalitionSampler::base_draw() {
  const int lo = lo_(), hi = hi_();
  int size = lo;
  const double u = rng_.uniform();
  double acc = 0.0;
  for (int s = lo; s <= hi; ++s) {
    acc += size_prob(s);
    if (u < acc) {
      size = s;
      break;
    }
    size = s;  // fall through to hi on rounding
  }
  return uniform_of_size(size);
}

double CoalitionSampler::base_pmf(const Coalition& c) const {
  if (exclude_ >= 0 && c.contains(exclude_)) return 0.0;
  const int s = c.size();
  const double ps = size_prob(s);
  if (ps == 0.0) return 0.0;
  return ps / binomial_coefficient(m_, s);
}

Coalition CoalitionSampler::next() {
  switch (cfg_.strategy) {
    case SampleStrategy::random:
    case SampleStrategy::exhaustive:
      return base_draw();
    case SampleStrategy::stratified: {
      const int lo = lo_();
      std::size_t best = 0;
      double best_deficit = -1.0;
      for (std::size_t i = 0; i < strata_.size(); ++i) {
        const double deficit =
            strata_[i] * static_cast<double>(strat_draws_ + 1) -
            static_cast<double>(emitted_[i]);
        if (deficit > best_deficit + 1e-12) {
          best_deficit = deficit;
          best = i;
        }
      }
      ++emitted_[best];
      ++strat_draws_;
      return uniform_of_size(lo + static_cast<int>(best));
    }
    case SampleStrategy::antithetic: {
      if (pending_complement_) {
        pending_complement_ = false;
        Coalition c = last_.complement();
        if (exclude_ >= 0) c.remove(exclude_);
        return c;
      }
      last_ = base_draw();
      pending_complement_ = true;
      return last_;
    }
  }
  throw std::logic_error("coalition sampler: unreachable");
}

double CoalitionSampler::pmf(const Coalition& c) const {
  if (exclude_ >= 0 && c.contains(exclude_)) return 0.0;
  switch (cfg_.strategy) {
    case SampleStrategy::random:
      return base_pmf(c);
    case SampleStrategy::exhaustive:
      return 1.0;
    case SampleStrategy::stratified: {
      const int s = c.size();
      const double ps = strata_prob(s);
      if (ps == 0.0) return 0.0;
      return ps / binomial_coefficient(m_, s);
    }
    case SampleStrategy::antithetic: {
      Coalition comp = c.complement();
      if (exclude_ >= 0) comp.remove(exclude_);
      return 0.5 * (base_pmf(c) + base_pmf(comp));
    }
  }
  throw std::logic_error("coalition sampler: unreachable");
}

BernoulliCoalitionSampler::BernoulliCoalitionSampler(SampleStrategy strategy,
                                                     int n_players, std::uint64_t seed)
    : strategy_(strategy), n_(n_players), rng_(hash_combine(seed, 0xbe12)) {
  if (n_ < 1) throw std::invalid_argument("bernoulli sampler: need n >= 1");
}

Coalition BernoulliCoalitionSampler::next(double q) {
  if (q < 0.0 || q > 1.0)
    throw std::invalid_argument("bernoulli sampler: q outside [0,1]");
  Coalition c(n_);
  switch (strategy_) {
    case SampleStrategy::random:
    case SampleStrategy::exhaustive: {
      for (int i = 0; i < n_; ++i)
        if (rng_.uniform() < q) c.add(i);
      return c;
    }
    case SampleStrategy::antithetic: {
      if (pending_flip_ && last_q_ == q) {
        pending_flip_ = false;
        for (int i = 0; i < n_; ++i)
          if (1.0 - last_uniforms_[static_cast<std::size_t>(i)] < q) c.add(i);
        return c;
      }
      last_uniforms_.resize(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) {
        last_uniforms_[static_cast<std::size_t>(i)] = rng_.uniform();
        if (last_uniforms_[static_cast<std::size_t>(i)] < q) c.add(i);
      }
      last_q_ = q;
      pending_flip_ = true;
      return c;
    }
    case SampleStrategy::stratified: {
      const std::int64_t key = std::llround(q * 1e12);
      auto& st = strata_[key];
      if (st.pmf.empty()) {
        st.pmf.resize(static_cast<std::size_t>(n_) + 1);
        for (int k = 0; k <= n_; ++k)
          st.pmf[static_cast<std::size_t>(k)] = binomial_coefficient(n_, k) *
                                                std::pow(q, k) * std::pow(1.0 - q, n_ - k);
        st.emitted.assign(static_cast<std::size_t>(n_) + 1, 0);
      }
      std::size_t best = 0;
      double best_deficit = -1.0;
      for (std::size_t k = 0; k < st.pmf.size(); ++k) {
        const double deficit = st.pmf[k] * static_cast<double>(st.draws + 1) -
                               static_cast<double>(st.emitted[k]);
        if (deficit > best_deficit + 1e-12) {
          best_deficit = deficit;
          best = k;
        }
      }
      ++st.emitted[best];
      ++st.draws;
      std::vector<int> pool(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) pool[static_cast<std::size_t>(i)] = i;
      for (std::size_t i = 0; i < best; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng_.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        c.add(pool[i]);
      }
      return c;
    }
  }
  throw std::logic_error("bernoulli sampler: unreachable");
}

}  // namespace svkit
