#include "svkit/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "svkit/metrics.hpp"
#include "svkit/rng.hpp"

namespace svkit {

namespace {

double gaussian_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * 3.14159265358979323846 * var);
}

void fit_gaussian(const std::vector<double>& xs, double* mean, double* var) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v = xs.size() > 1 ? v / static_cast<double>(xs.size() - 1) : 0.0;
  *mean = m;
  *var = std::max(v, 1e-9);
}

}  // namespace

ExplanationService::ExplanationService(const SplitTable& data,
                                       const ExplanationServiceOptions& opts)
    : opts_(opts) {
  if (data.train.n_rows() == 0) throw std::invalid_argument("explanation service: empty train split");
  TrainSettings ts;
  ts.budget = opts.game.budget;
  ts.learning_rate = opts.game.learning_rate;
  base_.model = train_logistic(data.train, ts, hash_combine(opts.seed, 0x41));
  base_.baseline_means = feature_means(data.train);
  base_.use_probability = opts.game.ri_probability;
}

std::vector<double> ExplanationService::explain(const std::vector<double>& explicand) {
  if (static_cast<int>(explicand.size()) != n_features())
    throw std::invalid_argument("explanation service: explicand size mismatch");
  auto ctx = std::make_shared<RiContext>(base_);
  ctx->explicand = explicand;
  ctx->explic_class = opts_.game.ri_class >= 0 ? opts_.game.ri_class
                                               : base_.model.predict(explicand);
  const std::uint64_t qseed = hash_combine(opts_.seed, 0xe1 + queries_);
  GameSpec game = ri_game_from_context(ctx, qseed);
  const ShapleyResult res = run_estimator(game, opts_.estimator, opts_.settings, qseed);
  const MaskedValues masked = apply_privacy(res, opts_.privacy, qseed);
  rank_var_sum_ += ranking_variance(res.values, masked.values, {}, masked.suppressed);
  ++queries_;
  return masked.values;
}

std::vector<double> fia_aux(ExplanationService& service, const Table& aux,
                            const std::vector<double>& stolen_sv) {
  const int d = service.n_features();
  if (aux.n_features() != d || aux.n_rows() < 2)
    throw std::invalid_argument("fia_aux: auxiliary table shape mismatch");
  if (static_cast<int>(stolen_sv.size()) != d)
    throw std::invalid_argument("fia_aux: attribution size mismatch");

  std::vector<std::vector<double>> svs;
  svs.reserve(static_cast<std::size_t>(aux.n_rows()));
  for (int r = 0; r < aux.n_rows(); ++r)
    svs.push_back(service.explain(aux.x[static_cast<std::size_t>(r)]));

  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  const auto rows = static_cast<double>(aux.n_rows());
  for (int f = 0; f < d; ++f) {
    double ms = 0.0, mx = 0.0;
    double xlo = aux.x[0][static_cast<std::size_t>(f)], xhi = xlo;
    for (int r = 0; r < aux.n_rows(); ++r) {
      const double x = aux.x[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)];
      ms += svs[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)];
      mx += x;
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
    }
    ms /= rows;
    mx /= rows;
    double cov = 0.0, var = 0.0;
    for (int r = 0; r < aux.n_rows(); ++r) {
      const double s = svs[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)] - ms;
      cov += s * (aux.x[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)] - mx);
      var += s * s;
    }
    double guess = mx;
    if (var / rows >= 1e-12)
      guess = mx + (cov / var) * (stolen_sv[static_cast<std::size_t>(f)] - ms);
    out[static_cast<std::size_t>(f)] = std::clamp(guess, xlo, xhi);
  }
  return out;
}

std::vector<double> fia_gen(ExplanationService& service,
                            const std::vector<double>& stolen_sv,
                            const FiaGenOptions& opt) {
  const int d = service.n_features();
  if (static_cast<int>(stolen_sv.size()) != d)
    throw std::invalid_argument("fia_gen: attribution size mismatch");
  if (opt.n_candidates < 2) throw std::invalid_argument("fia_gen: need >= 2 candidates");

  Rng rng(hash_combine(opt.seed, 0xf1a));
  std::vector<std::vector<double>> cands(static_cast<std::size_t>(opt.n_candidates));
  for (auto& c : cands) {
    c.resize(static_cast<std::size_t>(d));
    for (auto& x : c) {
      x = opt.gaussian ? std::clamp(rng.normal(0.5, 0.25), 0.0, 1.0) : rng.uniform();
    }
  }
  std::vector<std::vector<double>> svs;
  svs.reserve(cands.size());
  for (const auto& c : cands) svs.push_back(service.explain(c));

  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  for (int f = 0; f < d; ++f) {
    std::vector<double> dist(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i)
      dist[i] = std::abs(svs[i][static_cast<std::size_t>(f)] -
                         stolen_sv[static_cast<std::size_t>(f)]);
    double t = opt.threshold;
    if (t < 0.0) {
      std::vector<double> sorted = dist;
      std::sort(sorted.begin(), sorted.end());
      t = sorted[static_cast<std::size_t>(0.1 * (sorted.size() - 1))];
    }
    double acc = 0.0;
    int kept = 0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (dist[i] > t) continue;
      acc += cands[i][static_cast<std::size_t>(f)];
      ++kept;
    }
    out[static_cast<std::size_t>(f)] = kept > 0 ? acc / kept : 0.5;
  }
  return out;
}

ValuationService::ValuationService(const Table& owned, const Table& test,
                                   const ValuationServiceOptions& opts)
    : owned_(owned), test_(test), opts_(opts) {
  if (owned_.n_rows() < 1) throw std::invalid_argument("valuation service: empty holdings");
  if (test_.n_rows() < 1) throw std::invalid_argument("valuation service: empty test split");
  if (opts_.mc_marginals == 0)
    throw std::invalid_argument("valuation service: zero sampling budget");
}

double ValuationService::value_of(const std::vector<double>& row, int label,
                                  bool include) {
  Table holdings;
  holdings.feature_names = owned_.feature_names;
  for (int r = 0; r < owned_.n_rows(); ++r) {
    const bool twin = owned_.y[static_cast<std::size_t>(r)] == label &&
                      owned_.x[static_cast<std::size_t>(r)] == row;
    if (twin && !include) continue;
    holdings.append_row(owned_.x[static_cast<std::size_t>(r)],
                        owned_.y[static_cast<std::size_t>(r)]);
  }
  if (include) {
    bool present = false;
    for (int r = 0; r < holdings.n_rows() && !present; ++r)
      present = holdings.y[static_cast<std::size_t>(r)] == label &&
                holdings.x[static_cast<std::size_t>(r)] == row;
    if (!present) holdings.append_row(row, label);
  }
  const Table kept = std::move(holdings);
  return valued_against(kept, row, label);
}

double ValuationService::value_of(const std::vector<double>& row, int label) {
  return valued_against(owned_, row, label);
}

double ValuationService::valued_against(const Table& holdings,
                                        const std::vector<double>& row, int label) {
  if (static_cast<int>(row.size()) != owned_.n_features())
    throw std::invalid_argument("valuation service: row size mismatch");
  auto train = std::make_shared<Table>(holdings);
  train->append_row(row, label);
  const int n = train->n_rows();
  auto test = std::make_shared<const Table>(test_);
  const int k = opts_.knn_k;

  GameSpec g;
  g.players = {n};
  g.seed = hash_combine(opts_.seed, 0x7a + queries_);
  g.label = "valuation(n=" + std::to_string(n) + ")";
  g.utility.name = "valuation_knn_accuracy";
  g.utility.cost = CostClass::cheap;
  g.utility.fn = [train, test, k](const Coalition& c) {
    Table sub = train->take(c.members());
    return knn_accuracy(sub, *test, k);
  };

  McOptions mo;
  mo.max_marginals = opts_.mc_marginals;
  mo.convergence.tau = 1e-300;  // budget-bounded, not convergence-bounded
  mo.convergence.max_evals = ~0ULL;
  const ShapleyResult res = mc_shapley(g, mo, g.seed);
  const MaskedValues masked = apply_privacy(res, opts_.privacy, g.seed);
  rank_var_sum_ += ranking_variance(res.values, masked.values, {}, masked.suppressed);
  ++queries_;
  return masked.values[static_cast<std::size_t>(n - 1)];
}

double mia_score(ValuationService& service, const Table& pool, const Table& test,
                 const ValuationServiceOptions& shadow_opts,
                 const std::vector<double>& row, int label, const MiaOptions& opt) {
  const int base_rows = service.owned_rows() - 1;
  if (pool.n_rows() < base_rows + 2)
    throw std::invalid_argument("mia: pool too small for shadow bases");
  if (opt.shadow_rounds < 2) throw std::invalid_argument("mia: need >= 2 shadow rounds");
  if (opt.real_queries < 1) throw std::invalid_argument("mia: need >= 1 service query");

  double real = 0.0;
  for (int q = 0; q < opt.real_queries; ++q) real += service.value_of(row, label);
  real /= static_cast<double>(opt.real_queries);

  Rng rng(hash_combine(opt.seed, 0x317a));
  std::vector<int> ids(static_cast<std::size_t>(pool.n_rows()));
  std::iota(ids.begin(), ids.end(), 0);

  std::vector<double> in_scores, out_scores;
  in_scores.reserve(static_cast<std::size_t>(opt.shadow_rounds));
  out_scores.reserve(static_cast<std::size_t>(opt.shadow_rounds));
  for (int r = 0; r < opt.shadow_rounds; ++r) {
    rng.shuffle(ids);
    std::vector<int> base(ids.begin(), ids.begin() + base_rows);
    const int decoy = ids[static_cast<std::size_t>(base_rows)];

    Table in_table = pool.take(base);
    in_table.append_row(row, label);
    Table out_table = pool.take(base);
    out_table.append_row(pool.x[static_cast<std::size_t>(decoy)],
                         pool.y[static_cast<std::size_t>(decoy)]);

    ValuationServiceOptions ropts = shadow_opts;
    ropts.seed = hash_combine(opt.seed, 0x520 + static_cast<std::uint64_t>(r));
    ValuationService svc_in(in_table, test, ropts);
    ValuationService svc_out(out_table, test, ropts);
    in_scores.push_back(svc_in.value_of(row, label));
    out_scores.push_back(svc_out.value_of(row, label));
  }

  double mean_in = 0.0, var_in = 0.0, mean_out = 0.0, var_out = 0.0;
  fit_gaussian(in_scores, &mean_in, &var_in);
  fit_gaussian(out_scores, &mean_out, &var_out);
  const double lik_in = gaussian_pdf(real, mean_in, var_in);
  const double lik_out = gaussian_pdf(real, mean_out, var_out);
  const double denom = lik_in + lik_out;
  if (!std::isfinite(denom) || denom <= 0.0) return 0.5;
  return lik_in / denom;
}

FiaReport run_fia_experiment(const FiaExperimentConfig& cfg) {
  if (cfg.n_targets < 1) throw std::invalid_argument("fia experiment: need targets");
  const int total = cfg.train_rows + cfg.n_targets + cfg.aux_rows;
  const Table pop =
      make_blobs("blobs2", total, cfg.features, hash_combine(cfg.seed, 0xda7a));
  SplitTable data;
  data.train = pop.slice(0, cfg.train_rows);
  data.test = pop.slice(cfg.train_rows, cfg.train_rows + cfg.n_targets);
  const Table aux =
      pop.slice(cfg.train_rows + cfg.n_targets, total);

  if (cfg.trials < 1) throw std::invalid_argument("fia experiment: need trials");

  FiaReport rep;
  rep.n_trials = cfg.trials;
  double rank_var = 0.0;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    ExplanationServiceOptions sopts = cfg.service;
    sopts.seed = hash_combine(hash_combine(cfg.seed, 0x5e1),
                              static_cast<std::uint64_t>(trial));
    ExplanationService service(data, sopts);

    double trial_mae = 0.0;
    for (int t = 0; t < cfg.n_targets; ++t) {
      const auto& x = data.test.x[static_cast<std::size_t>(t)];
      const std::vector<double> stolen = service.explain(x);
      std::vector<double> recon;
      if (cfg.use_aux) {
        recon = fia_aux(service, aux, stolen);
      } else {
        FiaGenOptions g = cfg.gen;
        g.seed = hash_combine(sopts.seed, 0x6e0 + static_cast<std::uint64_t>(t));
        recon = fia_gen(service, stolen, g);
      }
      const double mae = mean_absolute_error(recon, x);
      if (trial == 0) rep.per_target_mae.push_back(mae);
      trial_mae += mae;
    }
    rep.per_trial_mae.push_back(trial_mae / static_cast<double>(cfg.n_targets));
    rank_var += service.mean_ranking_variance();
  }
  for (double m : rep.per_trial_mae) rep.mean_mae += m;
  rep.mean_mae /= static_cast<double>(rep.per_trial_mae.size());
  rep.ranking_variance = rank_var / static_cast<double>(cfg.trials);
  return rep;
}

MiaReport run_mia_experiment(const MiaExperimentConfig& cfg) {
  if (cfg.member_targets > cfg.owned_rows)
    throw std::invalid_argument("mia experiment: more member targets than holdings");
  const int total =
      cfg.owned_rows + cfg.test_rows + cfg.pool_rows + cfg.nonmember_targets;
  if (cfg.label_noise < 0.0 || cfg.label_noise > 1.0)
    throw std::invalid_argument("mia experiment: label noise outside [0,1]");
  Table pop =
      make_blobs("blobs2", total, cfg.features, hash_combine(cfg.seed, 0x31a0));
  const Table test = pop.slice(cfg.owned_rows, cfg.owned_rows + cfg.test_rows);
  // valuation-grade data: a fraction of candidate tuples carries wrong labels,
  // so single tuples move the utility; the test split stays clean
  {
    Rng noise(hash_combine(cfg.seed, 0xf11b));
    int n_classes = 2;
    for (int y : pop.y) n_classes = std::max(n_classes, y + 1);
    for (int r = 0; r < pop.n_rows(); ++r) {
      const bool held = r < cfg.owned_rows;
      const bool candidate = r >= cfg.owned_rows + cfg.test_rows;
      if (!held && !candidate) continue;
      if (noise.uniform() >= cfg.label_noise) continue;
      auto& y = pop.y[static_cast<std::size_t>(r)];
      y = (y + 1 + noise.below(static_cast<std::uint64_t>(n_classes - 1))) % n_classes;
    }
  }
  const Table owned = pop.slice(0, cfg.owned_rows);
  const Table pool = pop.slice(cfg.owned_rows + cfg.test_rows,
                               cfg.owned_rows + cfg.test_rows + cfg.pool_rows);
  const Table outsiders =
      pop.slice(cfg.owned_rows + cfg.test_rows + cfg.pool_rows, total);

  if (cfg.trials < 1) throw std::invalid_argument("mia experiment: need trials");

  MiaReport rep;
  rep.n_trials = cfg.trials;
  double rank_var = 0.0;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t tseed =
        hash_combine(hash_combine(cfg.seed, 0x0a11), static_cast<std::uint64_t>(trial));
    ValuationServiceOptions sopts = cfg.service;
    sopts.seed = tseed;
    ValuationService service(owned, test, sopts);

    std::vector<double> scores;
    std::vector<int> labels;
    int target_index = 0;
    auto probe = [&](const std::vector<double>& row, int label, int truth) {
      MiaOptions mo = cfg.mia;
      mo.seed = hash_combine(hash_combine(cfg.mia.seed, static_cast<std::uint64_t>(trial)),
                             static_cast<std::uint64_t>(target_index));
      scores.push_back(mia_score(service, pool, test, sopts, row, label, mo));
      labels.push_back(truth);
      ++target_index;
    };
    for (int t = 0; t < cfg.member_targets; ++t)
      probe(owned.x[static_cast<std::size_t>(t)], owned.y[static_cast<std::size_t>(t)], 1);
    for (int t = 0; t < cfg.nonmember_targets; ++t)
      probe(outsiders.x[static_cast<std::size_t>(t)], outsiders.y[static_cast<std::size_t>(t)], 0);
    rep.per_trial_auroc.push_back(auroc(scores, labels));
    rank_var += service.mean_ranking_variance();
    if (trial == 0) {
      rep.scores = std::move(scores);
      rep.labels = std::move(labels);
    }
  }
  for (double a : rep.per_trial_auroc) rep.auroc_value += a;
  rep.auroc_value /= static_cast<double>(rep.per_trial_auroc.size());
  rep.ranking_variance = rank_var / static_cast<double>(cfg.trials);
  return rep;
}

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw std::invalid_argument("auroc: size mismatch");
  std::uint64_t pos = 0, neg = 0;
  for (int l : labels) {
    if (l == 1)
      ++pos;
    else if (l == 0)
      ++neg;
    else
      throw std::invalid_argument("auroc: labels must be 0 or 1");
  }
  if (pos == 0 || neg == 0) throw std::invalid_argument("auroc: need both classes");
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      if (scores[i] > scores[j])
        acc += 1.0;
      else if (scores[i] == scores[j])
        acc += 0.5;
    }
  }
  return acc / (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace svkit
