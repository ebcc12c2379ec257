#pragma once

#include <cstdint>
#include <ostream>

#include "ssfair/dataset.hpp"
#include "ssfair/nn.hpp"

namespace ssfair {

struct MetricsRecord {
  double accuracy = 0.0;
  double fairness_dp = 0.0;   // in [0,1]
  double fairness_opp = 0.0;  // in [0,1]
  double fairness_odd = 0.0;  // in [0,2]
  size_t n_evaluated = 0;
  size_t group_counts[2][2] = {{0, 0}, {0, 0}};  // [protected][label]
};

// Eval-mode forward, binarize with b = 1{yhat >= 0.5} (closed at the
// threshold), then accuracy plus the three fairness discrepancies computed
// from group rates on b with ground-truth labels. The test set must be
// fully labeled. An empty (group, label) cell zeroes its term.
MetricsRecord evaluate(const ModelParams& params, const Dataset& test_set);

// Header plus one CSV row.
void write_metrics_csv(const MetricsRecord& m, std::ostream& out);

}  // namespace ssfair
