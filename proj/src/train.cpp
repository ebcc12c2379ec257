#include "ssfair/train.hpp"

#include <algorithm>
#include <cmath>

#include "ssfair/errors.hpp"
#include "ssfair/format.hpp"
#include "ssfair/metrics.hpp"
#include "ssfair/optim.hpp"
#include "ssfair/rng.hpp"

namespace ssfair {

namespace {

void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (cfg.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (!(cfg.lr > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0))
    throw ConfigError("lambda must be in [0,1]");
  if (cfg.beta < 0.0) throw ConfigError("beta must be >= 0");
  if (cfg.hidden_dim < 1) throw ConfigError("hidden dimension must be >= 1");
  if (cfg.alpha_mode == AlphaMode::Convex && !(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
    throw ConfigError("alpha must be in [0,1] in convex mode");
  if (cfg.alpha_mode == AlphaMode::Additive && !(cfg.alpha >= 0.0))
    throw ConfigError("alpha must be >= 0 in additive mode");
}

Dataset labeled_subset(const Dataset& d) {
  Dataset out;
  out.n_features = d.n_features;
  out.feature_names = d.feature_names;
  for (size_t i = 0; i < d.n_rows(); ++i)
    if (d.y[i] != kUnlabeled) out.append_row(d, i);
  return out;
}

}  // namespace

double loss_and_gradient(const ModelParams& params, const double* x, size_t batch,
                         const std::vector<int8_t>& y,
                         const std::vector<uint8_t>& protected_attr,
                         const TrainConfig& cfg, Mode mode, uint64_t dropout_seed,
                         ForwardCache& cache, ParamGrads& grads,
                         LossBreakdown* breakdown) {
  forward(params, x, batch, mode, dropout_seed, cache);
  CombinedResult cr = combined_loss(cache.yhat, y, protected_attr, params,
                                    cfg.alpha, cfg.alpha_mode, cfg.beta,
                                    cfg.fairness, cfg.lambda);
  backward(params, cache, cr.dl_dyhat, grads);
  grads.add(cr.reg_grads);
  if (breakdown) *breakdown = cr.breakdown;
  return cr.breakdown.total;
}

std::pair<ModelParams, TrainHistory> train(const TrainConfig& cfg,
                                           const Dataset& train_set) {
  validate(cfg);
  if (train_set.n_rows() == 0) throw ConfigError("training set is empty");

  const Dataset* data = &train_set;
  Dataset filtered;
  if (cfg.supervised_only) {
    filtered = labeled_subset(train_set);
    if (filtered.n_rows() == 0)
      throw ConfigError("supervised-only training requires at least one labeled sample");
    data = &filtered;
  }

  const size_t n = data->n_rows();
  const size_t dim = data->n_features;
  const size_t bs = static_cast<size_t>(cfg.batch_size);

  ModelParams params = init(dim, cfg.hidden_dim, cfg.init_seed);
  AdamState adam;
  adam.lr = cfg.lr;
  adam.init_like(params);

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;

  std::vector<double> bx(bs * dim);
  std::vector<int8_t> by(bs);
  std::vector<uint8_t> bprot(bs);
  ForwardCache cache;
  ParamGrads grads;

  TrainHistory history;
  history.reserve(static_cast<size_t>(cfg.epochs));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.shuffle_seed, "epoch", static_cast<uint64_t>(epoch)));
    deterministic_shuffle(order, shuffle_rng);

    EpochRecord rec;
    size_t n_batches = 0;
    for (size_t start = 0, bi = 0; start < n; start += bs, ++bi) {
      const size_t cur = std::min(bs, n - start);
      by.resize(cur);
      bprot.resize(cur);
      for (size_t i = 0; i < cur; ++i) {
        const size_t src = order[start + i];
        std::copy(data->row(src), data->row(src) + dim, bx.begin() + i * dim);
        by[i] = data->y[src];
        bprot[i] = data->protected_attr[src];
      }

      LossBreakdown bd;
      loss_and_gradient(params, bx.data(), cur, by, bprot, cfg, Mode::Train,
                        derive_seed(cfg.dropout_seed, "drop",
                                    static_cast<uint64_t>(epoch), bi),
                        cache, grads, &bd);
      adam.step(params, grads);

      rec.classification_term += bd.classification_term;
      rec.fairness_term += bd.fairness_term;
      rec.regularization_term += bd.regularization_term;
      rec.kept_unlabeled += bd.gate_confident_unlabeled;
      rec.empty_group_events += bd.empty_group_events;
      ++n_batches;
    }
    const double inv = 1.0 / static_cast<double>(n_batches);
    rec.classification_term *= inv;
    rec.fairness_term *= inv;
    rec.regularization_term *= inv;
    history.push_back(rec);
  }
  return {std::move(params), std::move(history)};
}

const std::vector<double>& default_beta_grid() {
  static const std::vector<double> grid = {1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  return grid;
}

double tune_beta(const TrainConfig& cfg, const Dataset& train_set,
                 uint64_t holdout_seed, const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("beta grid is empty");
  validate(cfg);

  std::vector<size_t> labeled_idx, unlabeled_idx;
  for (size_t i = 0; i < train_set.n_rows(); ++i)
    (train_set.y[i] != kUnlabeled ? labeled_idx : unlabeled_idx).push_back(i);
  if (labeled_idx.size() < 5)
    throw ConfigError("beta tuning needs at least 5 labeled samples, have " +
                      std::to_string(labeled_idx.size()));

  // 20% holdout from each label stratum so the validation set always has
  // labels to score against.
  Rng rng(holdout_seed);
  deterministic_shuffle(labeled_idx, rng);
  deterministic_shuffle(unlabeled_idx, rng);
  const size_t hold_lab = std::max<size_t>(1, labeled_idx.size() / 5);
  const size_t hold_unl = unlabeled_idx.size() / 5;

  Dataset holdout, rest;
  holdout.n_features = rest.n_features = train_set.n_features;
  holdout.feature_names = rest.feature_names = train_set.feature_names;
  std::vector<size_t> rest_idx(labeled_idx.begin() + hold_lab, labeled_idx.end());
  rest_idx.insert(rest_idx.end(), unlabeled_idx.begin() + hold_unl, unlabeled_idx.end());
  std::sort(rest_idx.begin(), rest_idx.end());
  for (size_t i = 0; i < hold_lab; ++i) holdout.append_row(train_set, labeled_idx[i]);
  for (size_t i : rest_idx) rest.append_row(train_set, i);

  std::vector<double> sorted_grid = grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());

  double best_beta = sorted_grid.front();
  double best_acc = -1.0;
  for (double beta : sorted_grid) {
    TrainConfig trial = cfg;
    trial.beta = beta;
    auto [params, history] = train(trial, rest);
    const double acc = evaluate(params, holdout).accuracy;
    if (acc >= best_acc) {  // ascending grid: >= breaks ties toward larger beta
      best_acc = acc;
      best_beta = beta;
    }
  }
  return best_beta;
}

void write_history(const TrainHistory& history, std::ostream& out) {
  out << "epoch\tclassification\tfairness\tregularization\tkept_unlabeled\tempty_group_events\n";
  for (size_t e = 0; e < history.size(); ++e) {
    const EpochRecord& r = history[e];
    out << e << '\t' << format_double(r.classification_term) << '\t'
        << format_double(r.fairness_term) << '\t'
        << format_double(r.regularization_term) << '\t' << r.kept_unlabeled
        << '\t' << r.empty_group_events << '\n';
  }
}

}  // namespace ssfair
