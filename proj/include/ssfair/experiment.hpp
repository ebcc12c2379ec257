#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "ssfair/dataset.hpp"
#include "ssfair/train.hpp"

namespace ssfair {

struct ResultRow {
  std::string experiment;  // "sweep-unlabeled" or "sweep-alpha"
  std::string method;      // "ssfair" or "supervised"
  FairnessKind fairness = FairnessKind::DP;
  double alpha = 1.0;
  AlphaMode alpha_mode = AlphaMode::Convex;
  size_t n_labeled = 0;
  size_t n_unlabeled = 0;
  std::string repeat;  // "0".."R-1" or "mean"
  uint64_t seed = 0;   // repeat stream id; base seed on mean rows
  double accuracy = 0.0;
  double fairness_value = 0.0;
  double seconds = 0.0;  // cell wall time, tuning included
};

inline constexpr long long kAllUnlabeled = -1;

struct SweepConfig {
  std::vector<size_t> labeled_counts = {100, 200, 300};
  std::vector<long long> unlabeled_counts = {0, 1000, 5000, 10000, 20000, kAllUnlabeled};
  std::vector<double> alphas;  // required; command defaults live in the CLI
  int repeats = 5;
  uint64_t base_seed = 42;
  double train_fraction = 0.7;
  bool tune = false;  // per-cell beta tuning on the grid; otherwise base.beta
  int jobs = 1;
  TrainConfig base;   // alpha/beta/supervised_only overwritten per cell
};

// Labeled rows plus a seeded-permutation prefix of `count` unlabeled rows.
Dataset subsample_unlabeled(const Dataset& masked, size_t count, uint64_t seed);

// Unlabeled-size curve at a single labeled count (labeled_counts must hold
// exactly one value). Within a repeat, every (alpha, count) cell shares the
// same split/mask/init/shuffle/dropout seed block, and unlabeled subsets are
// nested prefixes of one seeded permutation.
std::vector<ResultRow> sweep_unlabeled(const Dataset& full, const SweepConfig& sc);

// Accuracy/fairness trade-off: for each labeled count and alpha, trains both
// the semi-supervised model (every unlabeled row retained) and the
// supervised-only ablation with a matched seed block.
std::vector<ResultRow> sweep_alpha(const Dataset& full, const SweepConfig& sc);

// Fixed column order:
// experiment,method,fairness,alpha,alpha_mode,n_labeled,n_unlabeled,repeat,
// seed,accuracy,fairness_value,seconds
// The seconds cell is left empty unless timing is set, so reruns of one
// configuration stay byte-identical.
void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out,
                       bool timing);

}  // namespace ssfair
