#include "ssfair/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "ssfair/errors.hpp"
#include "ssfair/format.hpp"
#include "ssfair/metrics.hpp"
#include "ssfair/rng.hpp"

namespace ssfair {

namespace {

struct RepeatSeeds {
  uint64_t split, mask, init, shuffle, dropout, unlabeled, holdout, id;
};

RepeatSeeds seeds_for(uint64_t base, uint64_t r) {
  return {derive_seed(base, "split", r),    derive_seed(base, "mask", r),
          derive_seed(base, "init", r),     derive_seed(base, "shuffle", r),
          derive_seed(base, "dropout", r),  derive_seed(base, "unlabeled", r),
          derive_seed(base, "holdout", r),  derive_seed(base, "repeat", r)};
}

void validate_common(const SweepConfig& sc) {
  if (sc.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (sc.alphas.empty()) throw ConfigError("alpha list is empty");
  if (sc.labeled_counts.empty()) throw ConfigError("labeled count list is empty");
  if (sc.jobs < 1) throw ConfigError("jobs must be >= 1");
  for (double a : sc.alphas) {
    if (a < 0.0) throw ConfigError("alpha must be >= 0");
    if (sc.base.alpha_mode == AlphaMode::Convex && a > 1.0)
      throw ConfigError("alpha " + format_double(a) + " > 1 requires --alpha-mode additive");
  }
}

double fairness_metric(const MetricsRecord& m, FairnessKind k) {
  switch (k) {
    case FairnessKind::DP: return m.fairness_dp;
    case FairnessKind::OPP: return m.fairness_opp;
    case FairnessKind::ODD: return m.fairness_odd;
  }
  return 0.0;
}

void run_parallel(std::vector<std::function<void()>>& tasks, int jobs) {
  if (jobs <= 1 || tasks.size() <= 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min<int>(jobs, static_cast<int>(tasks.size()));
  pool.reserve(static_cast<size_t>(n_threads));
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Trains one cell (tuning first if asked) and evaluates on the test split.
ResultRow run_cell(const Dataset& train_set, const Dataset& test_set,
                   const SweepConfig& sc, TrainConfig cfg,
                   const RepeatSeeds& seeds) {
  const auto t0 = std::chrono::steady_clock::now();
  cfg.init_seed = seeds.init;
  cfg.shuffle_seed = seeds.shuffle;
  cfg.dropout_seed = seeds.dropout;
  if (sc.tune) cfg.beta = tune_beta(cfg, train_set, seeds.holdout);

  auto [params, history] = train(cfg, train_set);
  const MetricsRecord m = evaluate(params, test_set);
  const auto t1 = std::chrono::steady_clock::now();

  ResultRow row;
  row.fairness = cfg.fairness;
  row.alpha = cfg.alpha;
  row.alpha_mode = cfg.alpha_mode;
  row.seed = seeds.id;
  row.accuracy = m.accuracy;
  row.fairness_value = fairness_metric(m, cfg.fairness);
  row.seconds = std::chrono::duration<double>(t1 - t0).count();
  return row;
}

ResultRow mean_row(const ResultRow* repeats, size_t n, uint64_t base_seed) {
  ResultRow m = repeats[0];
  m.repeat = "mean";
  m.seed = base_seed;
  m.accuracy = m.fairness_value = m.seconds = 0.0;
  for (size_t i = 0; i < n; ++i) {
    m.accuracy += repeats[i].accuracy;
    m.fairness_value += repeats[i].fairness_value;
    m.seconds += repeats[i].seconds;
  }
  m.accuracy /= static_cast<double>(n);
  m.fairness_value /= static_cast<double>(n);
  m.seconds /= static_cast<double>(n);
  return m;
}

// Labeled rows plus the first `count` rows of the seeded unlabeled
// permutation; prefixes nest across counts.
Dataset take_unlabeled_prefix(const Dataset& masked,
                              const std::vector<size_t>& unlabeled_perm,
                              size_t count) {
  Dataset out;
  out.n_features = masked.n_features;
  out.feature_names = masked.feature_names;
  for (size_t i = 0; i < masked.n_rows(); ++i)
    if (masked.y[i] != kUnlabeled) out.append_row(masked, i);
  for (size_t i = 0; i < count; ++i) out.append_row(masked, unlabeled_perm[i]);
  return out;
}

}  // namespace

Dataset subsample_unlabeled(const Dataset& masked, size_t count, uint64_t seed) {
  std::vector<size_t> unlabeled_perm;
  for (size_t i = 0; i < masked.n_rows(); ++i)
    if (masked.y[i] == kUnlabeled) unlabeled_perm.push_back(i);
  if (count > unlabeled_perm.size())
    throw ConfigError("unlabeled count " + std::to_string(count) +
                      " exceeds available pool " + std::to_string(unlabeled_perm.size()));
  Rng rng(seed);
  deterministic_shuffle(unlabeled_perm, rng);
  return take_unlabeled_prefix(masked, unlabeled_perm, count);
}

std::vector<ResultRow> sweep_unlabeled(const Dataset& full, const SweepConfig& sc) {
  validate_common(sc);
  if (sc.labeled_counts.size() != 1)
    throw ConfigError("sweep-unlabeled takes exactly one labeled count");
  if (sc.unlabeled_counts.empty()) throw ConfigError("unlabeled count list is empty");

  const size_t n_labeled = sc.labeled_counts[0];
  const size_t train_size =
      static_cast<size_t>(sc.train_fraction * static_cast<double>(full.n_rows()));
  if (n_labeled > train_size)
    throw ConfigError("labeled count " + std::to_string(n_labeled) +
                      " exceeds train split size " + std::to_string(train_size));
  const size_t pool = train_size - n_labeled;
  std::vector<size_t> counts;
  for (long long c : sc.unlabeled_counts) {
    const size_t want = (c == kAllUnlabeled) ? pool : static_cast<size_t>(c);
    if (c != kAllUnlabeled && want > pool)
      throw ConfigError("unlabeled count " + std::to_string(want) +
                        " exceeds available pool " + std::to_string(pool));
    counts.push_back(want);
  }

  const size_t n_alpha = sc.alphas.size();
  const size_t n_counts = counts.size();
  const size_t r_stride = static_cast<size_t>(sc.repeats) + 1;
  std::vector<ResultRow> rows(n_alpha * n_counts * r_stride);

  for (int r = 0; r < sc.repeats; ++r) {
    const RepeatSeeds seeds = seeds_for(sc.base_seed, static_cast<uint64_t>(r));
    auto [train_full, test] = split(full, {sc.train_fraction, seeds.split});
    const Dataset masked = mask_labels(train_full, n_labeled, seeds.mask);

    std::vector<size_t> unlabeled_perm;
    for (size_t i = 0; i < masked.n_rows(); ++i)
      if (masked.y[i] == kUnlabeled) unlabeled_perm.push_back(i);
    Rng perm_rng(seeds.unlabeled);
    deterministic_shuffle(unlabeled_perm, perm_rng);

    std::vector<std::function<void()>> tasks;
    for (size_t ai = 0; ai < n_alpha; ++ai) {
      for (size_t ci = 0; ci < n_counts; ++ci) {
        tasks.push_back([&, ai, ci, r] {
          const Dataset cell_set = take_unlabeled_prefix(masked, unlabeled_perm, counts[ci]);
          TrainConfig cfg = sc.base;
          cfg.alpha = sc.alphas[ai];
          ResultRow row = run_cell(cell_set, test, sc, cfg, seeds);
          row.experiment = "sweep-unlabeled";
          row.method = "ssfair";
          row.n_labeled = n_labeled;
          row.n_unlabeled = counts[ci];
          row.repeat = std::to_string(r);
          rows[(ai * n_counts + ci) * r_stride + static_cast<size_t>(r)] = std::move(row);
        });
      }
    }
    run_parallel(tasks, sc.jobs);
  }

  for (size_t cell = 0; cell < n_alpha * n_counts; ++cell) {
    ResultRow* block = rows.data() + cell * r_stride;
    block[sc.repeats] = mean_row(block, static_cast<size_t>(sc.repeats), sc.base_seed);
  }
  return rows;
}

std::vector<ResultRow> sweep_alpha(const Dataset& full, const SweepConfig& sc) {
  validate_common(sc);

  const size_t train_size =
      static_cast<size_t>(sc.train_fraction * static_cast<double>(full.n_rows()));
  for (size_t L : sc.labeled_counts)
    if (L > train_size)
      throw ConfigError("labeled count " + std::to_string(L) +
                        " exceeds train split size " + std::to_string(train_size));

  const size_t n_lab = sc.labeled_counts.size();
  const size_t n_alpha = sc.alphas.size();
  const size_t r_stride = static_cast<size_t>(sc.repeats) + 1;
  // Cell order: labeled count, alpha, method (ssfair then supervised).
  std::vector<ResultRow> rows(n_lab * n_alpha * 2 * r_stride);

  for (size_t li = 0; li < n_lab; ++li) {
    const size_t n_labeled = sc.labeled_counts[li];
    for (int r = 0; r < sc.repeats; ++r) {
      const RepeatSeeds seeds = seeds_for(sc.base_seed, static_cast<uint64_t>(r));
      auto [train_full, test] = split(full, {sc.train_fraction, seeds.split});
      const Dataset masked = mask_labels(train_full, n_labeled, seeds.mask);
      const size_t n_unlabeled = masked.count_unlabeled();

      std::vector<std::function<void()>> tasks;
      for (size_t ai = 0; ai < n_alpha; ++ai) {
        for (size_t mi = 0; mi < 2; ++mi) {
          tasks.push_back([&, li, ai, mi, r, n_labeled, n_unlabeled] {
            TrainConfig cfg = sc.base;
            cfg.alpha = sc.alphas[ai];
            cfg.supervised_only = (mi == 1);
            ResultRow row = run_cell(masked, test, sc, cfg, seeds);
            row.experiment = "sweep-alpha";
            row.method = (mi == 0) ? "ssfair" : "supervised";
            row.n_labeled = n_labeled;
            row.n_unlabeled = (mi == 0) ? n_unlabeled : 0;
            row.repeat = std::to_string(r);
            rows[((li * n_alpha + ai) * 2 + mi) * r_stride + static_cast<size_t>(r)] =
                std::move(row);
          });
        }
      }
      run_parallel(tasks, sc.jobs);
    }
  }

  for (size_t cell = 0; cell < n_lab * n_alpha * 2; ++cell) {
    ResultRow* block = rows.data() + cell * r_stride;
    block[sc.repeats] = mean_row(block, static_cast<size_t>(sc.repeats), sc.base_seed);
  }
  return rows;
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out,
                       bool timing) {
  out << "experiment,method,fairness,alpha,alpha_mode,n_labeled,n_unlabeled,"
         "repeat,seed,accuracy,fairness_value,seconds\n";
  for (const ResultRow& r : rows) {
    out << r.experiment << ',' << r.method << ',' << fairness_name(r.fairness)
        << ',' << format_double(r.alpha) << ',' << alpha_mode_name(r.alpha_mode)
        << ',' << r.n_labeled << ',' << r.n_unlabeled << ',' << r.repeat << ','
        << r.seed << ',' << format_double(r.accuracy) << ','
        << format_double(r.fairness_value) << ','
        << (timing ? format_double(r.seconds) : std::string()) << '\n';
  }
}

}  // namespace ssfair
