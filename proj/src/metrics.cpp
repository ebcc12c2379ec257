#include "ssfair/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ssfair/errors.hpp"
#include "ssfair/format.hpp"

namespace ssfair {

namespace {

constexpr size_t kEvalBatch = 4096;

double gap(double sum_p, size_t n_p, double sum_n, size_t n_n) {
  if (n_p == 0 || n_n == 0) return 0.0;
  return std::abs(sum_p / static_cast<double>(n_p) - sum_n / static_cast<double>(n_n));
}

}  // namespace

MetricsRecord evaluate(const ModelParams& params, const Dataset& test_set) {
  if (test_set.n_features != params.in_dim)
    throw DataError("evaluation set has " + std::to_string(test_set.n_features) +
                    " features, model expects " + std::to_string(params.in_dim));

  const size_t n = test_set.n_rows();
  MetricsRecord rec;
  rec.n_evaluated = n;

  size_t correct = 0;
  // Positive-prediction counts per (protected, label) cell and per group.
  double pos[2][2] = {{0, 0}, {0, 0}};
  double pos_group[2] = {0, 0};
  size_t n_group[2] = {0, 0};

  ForwardCache cache;
  for (size_t start = 0; start < n; start += kEvalBatch) {
    const size_t cur = std::min(kEvalBatch, n - start);
    forward(params, test_set.row(start), cur, Mode::Eval, 0, cache);
    for (size_t i = 0; i < cur; ++i) {
      const size_t idx = start + i;
      const int8_t label = test_set.y[idx];
      if (label == kUnlabeled)
        throw DataError("evaluation set contains an unlabeled sample at row " +
                        std::to_string(idx));
      const int b = cache.yhat[i] >= 0.5 ? 1 : 0;
      const int a = test_set.protected_attr[idx] ? 1 : 0;
      correct += (b == label);
      pos[a][label] += b;
      pos_group[a] += b;
      ++n_group[a];
      ++rec.group_counts[a][label];
    }
  }

  rec.accuracy = n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0;
  rec.fairness_dp = gap(pos_group[1], n_group[1], pos_group[0], n_group[0]);
  rec.fairness_opp = gap(pos[1][1], rec.group_counts[1][1], pos[0][1], rec.group_counts[0][1]);
  rec.fairness_odd = rec.fairness_opp +
                     gap(pos[1][0], rec.group_counts[1][0], pos[0][0], rec.group_counts[0][0]);
  return rec;
}

void write_metrics_csv(const MetricsRecord& m, std::ostream& out) {
  out << "accuracy,fairness_dp,fairness_opp,fairness_odd,n_evaluated,"
         "n_protected_y0,n_protected_y1,n_unprotected_y0,n_unprotected_y1\n";
  out << format_double(m.accuracy) << ',' << format_double(m.fairness_dp) << ','
      << format_double(m.fairness_opp) << ',' << format_double(m.fairness_odd)
      << ',' << m.n_evaluated << ',' << m.group_counts[1][0] << ','
      << m.group_counts[1][1] << ',' << m.group_counts[0][0] << ','
      << m.group_counts[0][1] << '\n';
}

}  // namespace ssfair
