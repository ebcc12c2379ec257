#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssfair/dataset.hpp"
#include "ssfair/errors.hpp"
#include "ssfair/experiment.hpp"
#include "ssfair/format.hpp"
#include "ssfair/kernels.hpp"
#include "ssfair/metrics.hpp"
#include "ssfair/rng.hpp"
#include "ssfair/train.hpp"

namespace fs = std::filesystem;
using namespace ssfair;

namespace {

constexpr size_t kExpectedRows = 45222;
constexpr size_t kExpectedFeatures = 112;

std::vector<fs::path> resolve_raw_inputs(const std::string& data) {
  if (fs::is_directory(data)) {
    std::vector<fs::path> files = {fs::path(data) / "adult.data",
                                   fs::path(data) / "adult.test"};
    for (const auto& f : files)
      if (!fs::exists(f)) throw DataError("expected " + f.string() + " under " + data);
    return files;
  }
  std::vector<fs::path> files;
  size_t start = 0;
  while (start <= data.size()) {
    const size_t comma = data.find(',', start);
    const std::string piece = data.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!piece.empty()) files.emplace_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (files.empty()) throw ConfigError("--data names no input files");
  return files;
}

std::vector<long long> parse_unlabeled_list(const std::vector<std::string>& items) {
  std::vector<long long> out;
  for (const auto& s : items) {
    if (s == "all") {
      out.push_back(kAllUnlabeled);
      continue;
    }
    try {
      size_t pos = 0;
      const long long v = std::stoll(s, &pos);
      if (pos != s.size() || v < 0) throw std::invalid_argument(s);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("bad unlabeled count '" + s + "' (expected a non-negative integer or 'all')");
    }
  }
  return out;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

// Flags shared by train and the two sweeps.
struct TrainOpts {
  double alpha = 1.0;
  std::string alpha_mode = "convex";
  double beta = 1e-4;
  bool tune = false;
  double lambda = 0.99;
  std::string fairness = "dp";
  double lr = 1e-3;
  int epochs = 1000;
  int batch_size = 512;
  size_t hidden = 32;
  uint64_t seed = 42;

  void add_to(CLI::App* cmd, bool with_alpha_scalar) {
    if (with_alpha_scalar)
      cmd->add_option("--alpha", alpha, "Accuracy weight in the objective")
          ->capture_default_str();
    cmd->add_option("--alpha-mode", alpha_mode, "convex or additive")
        ->capture_default_str();
    cmd->add_option("--beta", beta, "Regularization weight")->capture_default_str();
    cmd->add_flag("--tune-beta", tune,
                  "Select beta on a 20% holdout over the standard grid");
    cmd->add_option("--lambda", lambda, "Pseudo-label confidence threshold")
        ->capture_default_str();
    cmd->add_option("--fairness", fairness, "dp, opp or odd")->capture_default_str();
    cmd->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
    cmd->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--batch-size", batch_size, "Mini-batch size")->capture_default_str();
    cmd->add_option("--hidden", hidden, "Hidden layer width")->capture_default_str();
    cmd->add_option("--seed", seed, "Base seed for every stochastic choice")
        ->capture_default_str();
  }

  TrainConfig to_config() const {
    TrainConfig cfg;
    cfg.alpha = alpha;
    cfg.alpha_mode = parse_alpha_mode(alpha_mode);
    cfg.beta = beta;
    cfg.lambda = lambda;
    cfg.fairness = parse_fairness(fairness);
    cfg.lr = lr;
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.hidden_dim = hidden;
    return cfg;
  }
};

int run_preprocess(const std::string& data, const fs::path& out_path, bool shape_check) {
  std::vector<RawRecord> records;
  for (const auto& file : resolve_raw_inputs(data)) {
    auto part = load_raw(file);
    records.insert(records.end(), part.begin(), part.end());
  }
  const Dataset d = encode(records);
  if (shape_check && (d.n_rows() != kExpectedRows || d.n_features != kExpectedFeatures))
    throw DataError("preprocessed shape is " + std::to_string(d.n_rows()) + "x" +
                    std::to_string(d.n_features) + ", expected " +
                    std::to_string(kExpectedRows) + "x" +
                    std::to_string(kExpectedFeatures));
  write_dataset(d, out_path);
  std::cout << d.n_rows() << " " << d.n_features << "\n";
  return 0;
}

int run_train(const std::string& data, const TrainOpts& opts, long long labeled,
              long long unlabeled, bool supervised_only, const std::string& model_out,
              const std::string& test_out, const std::string& history_out) {
  const Dataset full = read_dataset(data);

  auto [train_full, test] = split(full, {0.7, derive_seed(opts.seed, "split", 0)});
  Dataset train_set = std::move(train_full);
  if (labeled >= 0)
    train_set = mask_labels(train_set, static_cast<size_t>(labeled),
                            derive_seed(opts.seed, "mask", 0));
  if (unlabeled >= 0)
    train_set = subsample_unlabeled(train_set, static_cast<size_t>(unlabeled),
                                    derive_seed(opts.seed, "unlabeled", 0));

  TrainConfig cfg = opts.to_config();
  cfg.supervised_only = supervised_only;
  cfg.init_seed = derive_seed(opts.seed, "init", 0);
  cfg.shuffle_seed = derive_seed(opts.seed, "shuffle", 0);
  cfg.dropout_seed = derive_seed(opts.seed, "dropout", 0);
  if (opts.tune) {
    cfg.beta = tune_beta(cfg, train_set, derive_seed(opts.seed, "holdout", 0));
    std::cerr << "selected beta " << format_double(cfg.beta) << "\n";
  }

  auto [params, history] = train(cfg, train_set);

  if (!model_out.empty()) save_params(params, model_out);
  if (!test_out.empty()) write_dataset(test, test_out);
  if (!history_out.empty()) {
    auto h = open_output(history_out);
    write_history(history, h);
  }
  write_metrics_csv(evaluate(params, test), std::cout);
  return 0;
}

int run_evaluate(const std::string& model, const std::string& data,
                 const std::string& out_path) {
  const ModelParams params = load_params(model);
  const Dataset d = read_dataset(data);
  const MetricsRecord m = evaluate(params, d);
  if (out_path.empty()) {
    write_metrics_csv(m, std::cout);
  } else {
    auto out = open_output(out_path);
    write_metrics_csv(m, out);
  }
  return 0;
}

int run_sweep(bool alpha_sweep, const std::string& data, const fs::path& out_path,
              const TrainOpts& opts, const std::vector<size_t>& labeled,
              const std::vector<std::string>& unlabeled,
              const std::vector<double>& alphas, int repeats, int jobs, bool timing) {
  SweepConfig sc;
  sc.labeled_counts = labeled;
  sc.unlabeled_counts = parse_unlabeled_list(unlabeled);
  sc.alphas = alphas;
  sc.repeats = repeats;
  sc.base_seed = opts.seed;
  sc.tune = opts.tune;
  sc.jobs = jobs;
  sc.base = opts.to_config();

  const Dataset full = read_dataset(data);
  const auto rows = alpha_sweep ? sweep_alpha(full, sc) : sweep_unlabeled(full, sc);
  auto out = open_output(out_path);
  write_results_csv(rows, out, timing);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-supervised fairness-regularized MLP: preprocessing, training and sweeps"};
  app.require_subcommand(1);

  // preprocess
  auto* pre = app.add_subcommand(
      "preprocess", "Encode the raw census files into one dataset file");
  std::string pre_data, pre_out;
  bool no_shape_check = false;
  pre->add_option("--data", pre_data,
                  "Directory holding adult.data and adult.test, or a comma-separated file list")
      ->required();
  pre->add_option("--out", pre_out, "Output dataset file")->required();
  pre->add_flag("--no-shape-check", no_shape_check,
                "Skip the 45222x112 shape assertion (for non-official inputs)");

  // train
  auto* tr = app.add_subcommand("train", "Train one model on a seeded 70/30 split");
  std::string tr_data, tr_model, tr_test, tr_history;
  TrainOpts tr_opts;
  long long tr_labeled = -1, tr_unlabeled = -1;
  bool tr_supervised = false;
  tr->add_option("--data", tr_data, "Dataset file from preprocess")->required();
  tr->add_option("--out", tr_model, "Write the model checkpoint here");
  tr->add_option("--out-test", tr_test, "Write the test split as a dataset file");
  tr->add_option("--history", tr_history, "Write per-epoch loss terms here (TSV)");
  tr->add_option("--labeled", tr_labeled,
                 "Keep ground truth on this many train rows, mask the rest (default: all)");
  tr->add_option("--unlabeled", tr_unlabeled,
                 "Keep this many unlabeled rows after masking (default: all)");
  tr->add_flag("--supervised-only", tr_supervised, "Drop unlabeled rows before training");
  tr_opts.add_to(tr, true);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Evaluate a checkpoint on a dataset file");
  std::string ev_model, ev_data, ev_out;
  ev->add_option("--model", ev_model, "Model checkpoint")->required();
  ev->add_option("--data", ev_data, "Fully labeled dataset file")->required();
  ev->add_option("--out", ev_out, "Metrics CSV path (default: stdout)");

  // shared sweep options
  std::string sa_data, sa_out, su_data, su_out;
  TrainOpts sa_opts, su_opts;
  int sa_repeats = 5, su_repeats = 5, sa_jobs = 1, su_jobs = 1;
  bool sa_timing = false, su_timing = false;

  // sweep-alpha
  auto* sa = app.add_subcommand(
      "sweep-alpha", "Accuracy/fairness trade-off vs the supervised-only baseline");
  std::vector<size_t> sa_labeled = {100, 200, 300};
  std::vector<double> sa_alphas = {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2,
                                   1e-1, 0.25, 0.5,  0.75, 0.9,  0.99, 1.0};
  sa->add_option("--data", sa_data, "Dataset file from preprocess")->required();
  sa->add_option("--out", sa_out, "Results CSV path")->required();
  sa->add_option("--labeled", sa_labeled, "Labeled counts")->delimiter(',');
  sa->add_option("--alpha", sa_alphas, "Alpha values")->delimiter(',');
  sa->add_option("--repeats", sa_repeats, "Seeded repeats per cell")->capture_default_str();
  sa->add_option("--jobs", sa_jobs, "Parallel worker slots")->capture_default_str();
  sa->add_flag("--timing", sa_timing, "Fill the seconds column (breaks byte-stable reruns)");
  sa_opts.add_to(sa, false);

  // sweep-unlabeled
  auto* su = app.add_subcommand(
      "sweep-unlabeled", "Accuracy/fairness vs the number of unlabeled samples");
  std::vector<size_t> su_labeled = {100};
  std::vector<std::string> su_unlabeled = {"0", "1000", "5000", "10000", "20000", "all"};
  std::vector<double> su_alphas = {0.001, 0.0025, 0.005};
  su->add_option("--data", su_data, "Dataset file from preprocess")->required();
  su->add_option("--out", su_out, "Results CSV path")->required();
  su->add_option("--labeled", su_labeled, "Labeled count (one value)")->delimiter(',');
  su->add_option("--unlabeled", su_unlabeled, "Unlabeled counts; 'all' = entire pool")
      ->delimiter(',');
  su->add_option("--alpha", su_alphas, "Alpha values")->delimiter(',');
  su->add_option("--repeats", su_repeats, "Seeded repeats per cell")->capture_default_str();
  su->add_option("--jobs", su_jobs, "Parallel worker slots")->capture_default_str();
  su->add_flag("--timing", su_timing, "Fill the seconds column (breaks byte-stable reruns)");
  su_opts.add_to(su, false);

  try {
    app.parse(argc, argv);

    if (pre->parsed()) return run_preprocess(pre_data, pre_out, !no_shape_check);
    if (tr->parsed())
      return run_train(tr_data, tr_opts, tr_labeled, tr_unlabeled, tr_supervised,
                       tr_model, tr_test, tr_history);
    if (ev->parsed()) return run_evaluate(ev_model, ev_data, ev_out);
    if (sa->parsed())
      return run_sweep(true, sa_data, sa_out, sa_opts, sa_labeled, {}, sa_alphas,
                       sa_repeats, sa_jobs, sa_timing);
    if (su->parsed())
      return run_sweep(false, su_data, su_out, su_opts, su_labeled, su_unlabeled,
                       su_alphas, su_repeats, su_jobs, su_timing);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits 0, any parse failure is a config error
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
