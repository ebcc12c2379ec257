#pragma once

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "ssfair/dataset.hpp"
#include "ssfair/losses.hpp"
#include "ssfair/nn.hpp"

namespace ssfair {

struct TrainConfig {
  double alpha = 1.0;
  AlphaMode alpha_mode = AlphaMode::Convex;
  double beta = 1e-4;
  double lambda = 0.99;
  FairnessKind fairness = FairnessKind::DP;
  double lr = 1e-3;
  int epochs = 1000;
  int batch_size = 512;
  size_t hidden_dim = 32;
  uint64_t init_seed = 0;
  uint64_t shuffle_seed = 0;
  uint64_t dropout_seed = 0;
  bool supervised_only = false;  // drop unlabeled rows before the loop
};

// Loss terms are per-batch means within the epoch; the counters are sums.
struct EpochRecord {
  double classification_term = 0.0;
  double fairness_term = 0.0;
  double regularization_term = 0.0;
  size_t kept_unlabeled = 0;
  size_t empty_group_events = 0;
};

using TrainHistory = std::vector<EpochRecord>;

// One objective evaluation plus the full parameter gradient for a batch;
// shared by the training loop and the finite-difference checks. cache and
// grads are reused storage.
double loss_and_gradient(const ModelParams& params, const double* x, size_t batch,
                         const std::vector<int8_t>& y,
                         const std::vector<uint8_t>& protected_attr,
                         const TrainConfig& cfg, Mode mode, uint64_t dropout_seed,
                         ForwardCache& cache, ParamGrads& grads,
                         LossBreakdown* breakdown = nullptr);

// Shuffled mini-batch training: every epoch reshuffles with a seed derived
// from (shuffle_seed, epoch), visits every sample once (last batch may be
// short), and recomputes gates from the live forward pass.
std::pair<ModelParams, TrainHistory> train(const TrainConfig& cfg,
                                           const Dataset& train_set);

const std::vector<double>& default_beta_grid();

// Holds out 20% of the labeled rows and 20% of the unlabeled rows (seeded),
// trains one model per grid value on the rest, and returns the beta with the
// best accuracy on the labeled holdout; ties go to the larger beta. The
// caller retrains on the full set with the winner.
double tune_beta(const TrainConfig& cfg, const Dataset& train_set,
                 uint64_t holdout_seed,
                 const std::vector<double>& grid = default_beta_grid());

// Tab-separated table, one row per epoch.
void write_history(const TrainHistory& history, std::ostream& out);

}  // namespace ssfair
