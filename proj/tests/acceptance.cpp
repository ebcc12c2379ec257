// Acceptance gate for the whole pipeline. Each numbered check prints exactly
// one PASS/FAIL line with its measured values; the process exits nonzero if
// any check fails. Usage: ssfair_acceptance <cli> <raw-data-dir> <scratch-dir>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ssfair/dataset.hpp"
#include "ssfair/errors.hpp"
#include "ssfair/losses.hpp"
#include "ssfair/metrics.hpp"
#include "ssfair/nn.hpp"
#include "ssfair/rng.hpp"
#include "ssfair/train.hpp"

namespace fs = std::filesystem;
using namespace ssfair;

namespace {

struct Context {
  std::string cli;
  fs::path data_dir;
  fs::path scratch;
  fs::path dataset;  // encoded dataset written by check 1
};

struct CmdResult {
  int code = -1;
  std::string out;
  double seconds = 0.0;
};

CmdResult run_cmd(const Context& ctx, const std::string& args) {
  const std::string full =
      "\"" + ctx.cli + "\" " + args + " 2>>\"" + (ctx.scratch / "cli_stderr.log").string() + "\"";
  const auto t0 = std::chrono::steady_clock::now();
  CmdResult r;
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

// Results-CSV access by the fixed column order.
struct CsvRow {
  std::vector<std::string> f;
  double num(size_t i) const { return std::stod(f[i]); }
};
constexpr size_t kMethod = 1, kFair = 2, kAlpha = 3, kNUnlabeled = 6, kRepeat = 7,
                 kAccuracy = 9, kFairValue = 10;

std::vector<CsvRow> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<CsvRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    CsvRow row;
    size_t start = 0;
    while (true) {
      const size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        row.f.push_back(line.substr(start));
        break;
      }
      row.f.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

const CsvRow* find_mean(const std::vector<CsvRow>& rows, const std::string& method,
                        double alpha, long long n_unlabeled = -1) {
  for (const auto& r : rows) {
    if (r.f[kRepeat] != "mean" || r.f[kMethod] != method) continue;
    if (std::fabs(r.num(kAlpha) - alpha) > 1e-15 * std::max(1.0, std::fabs(alpha))) continue;
    if (n_unlabeled >= 0 && r.f[kNUnlabeled] != std::to_string(n_unlabeled)) continue;
    return &r;
  }
  return nullptr;
}

bool report(int n, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << detail << "\n";
  std::cout.flush();
  return ok;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- check 1
bool check_preprocess(Context& ctx) {
  ctx.dataset = ctx.scratch / "adult.ds";
  CmdResult r = run_cmd(ctx, "preprocess --data \"" + ctx.data_dir.string() + "\" --out \"" +
                                 ctx.dataset.string() + "\"");
  const std::string shape = trim(r.out);
  const bool ok = r.code == 0 && shape == "45222 112" && r.seconds < 30.0;
  return report(1, ok, "preprocessing yields [" + shape + "] (want [45222 112]), exit " +
                           std::to_string(r.code) + ", " + fmt(r.seconds) + "s (< 30s)");
}

// ---------------------------------------------------------------- check 2
// Full-objective analytic gradients vs central finite differences on small
// random instances, all fairness kinds and both weighting modes, eval mode.
bool check_gradients() {
  const size_t D = 6, H = 4, B = 12;
  const double lambda = 0.9, h = 1e-6;
  Rng rng(20240817);
  double max_rel = 0.0;
  int trials_done = 0;

  const FairnessKind kinds[] = {FairnessKind::DP, FairnessKind::OPP, FairnessKind::ODD};
  const AlphaMode modes[] = {AlphaMode::Convex, AlphaMode::Additive};

  for (FairnessKind kind : kinds) {
    for (AlphaMode mode : modes) {
      int done = 0;
      int attempts = 0;
      while (done < 17 && attempts < 20000) {
        ++attempts;
        ModelParams params = init(D, H, rng.next_u64());
        for (auto& b : params.b1) b = rng.next_uniform(-0.3, 0.3);
        params.b2 = rng.next_uniform(-0.3, 0.3);
        std::vector<double> x(B * D);
        for (auto& v : x) v = rng.next_uniform(-1.5, 1.5);
        std::vector<int8_t> y(B);
        std::vector<uint8_t> prot(B);
        for (size_t i = 0; i < B; ++i) {
          const uint64_t roll = rng.next_below(4);
          y[i] = roll >= 2 ? kUnlabeled : static_cast<int8_t>(roll);
          prot[i] = static_cast<uint8_t>(rng.next_below(2));
        }

        TrainConfig cfg;
        cfg.fairness = kind;
        cfg.alpha_mode = mode;
        cfg.alpha = mode == AlphaMode::Convex ? rng.next_unit() : rng.next_uniform(0.0, 2.5);
        cfg.beta = rng.next_uniform(0.0, 0.05);
        cfg.lambda = lambda;

        // stay clear of every non-smooth point: gate band edges, the
        // pseudo-label flip, the ReLU kinks and the |.| ties
        auto cache = forward(params, x.data(), B, Mode::Eval);
        bool safe = true;
        for (size_t i = 0; i < B && safe; ++i) {
          const double p = cache.yhat[i];
          safe = std::fabs(p - 0.5) > 1e-4 && std::fabs(p - lambda) > 1e-4 &&
                 std::fabs(p - (1 - lambda)) > 1e-4 && p > 1e-9 && p < 1 - 1e-9;
        }
        for (size_t i = 0; i < B * H && safe; ++i) safe = std::fabs(cache.pre[i]) > 1e-4;
        if (safe) {
          GateResult gate = target_and_gate(y, cache.yhat, lambda);
          std::vector<int8_t> y_eff(B);
          for (size_t i = 0; i < B; ++i)
            y_eff[i] = y[i] != kUnlabeled ? y[i] : (gate.v[i] ? gate.q[i] : kExcluded);
          auto gap_of = [&](int k, bool all) {
            double sp = 0, sn = 0;
            size_t np = 0, nn = 0;
            for (size_t i = 0; i < B; ++i) {
              if (!all && y_eff[i] != k) continue;
              if (prot[i]) {
                sp += cache.yhat[i];
                ++np;
              } else {
                sn += cache.yhat[i];
                ++nn;
              }
            }
            if (np == 0 || nn == 0) return -1.0;  // empty side: resample
            return std::fabs(sp / static_cast<double>(np) - sn / static_cast<double>(nn));
          };
          if (kind == FairnessKind::DP) {
            const double g = gap_of(0, true);
            safe = g > 1e-4;
          } else if (kind == FairnessKind::OPP) {
            const double g = gap_of(1, false);
            safe = g > 1e-4;
          } else {
            const double g0 = gap_of(0, false), g1 = gap_of(1, false);
            safe = g0 > 1e-4 && g1 > 1e-4;
          }
        }
        if (!safe) continue;
        ++done;
        ++trials_done;

        ForwardCache scratch_cache;
        ParamGrads grads;
        loss_and_gradient(params, x.data(), B, y, prot, cfg, Mode::Eval, 0, scratch_cache,
                          grads);
        auto loss_at = [&]() {
          ForwardCache c;
          ParamGrads g;
          return loss_and_gradient(params, x.data(), B, y, prot, cfg, Mode::Eval, 0, c, g);
        };
        auto probe = [&](double* slot, double analytic) {
          const double orig = *slot;
          *slot = orig + h;
          const double up = loss_at();
          *slot = orig - h;
          const double dn = loss_at();
          *slot = orig;
          const double num = (up - dn) / (2 * h);
          const double rel =
              std::fabs(analytic - num) / std::max({1.0, std::fabs(analytic), std::fabs(num)});
          max_rel = std::max(max_rel, rel);
        };
        for (size_t i = 0; i < params.w1.size(); ++i) probe(&params.w1[i], grads.w1[i]);
        for (size_t i = 0; i < params.b1.size(); ++i) probe(&params.b1[i], grads.b1[i]);
        for (size_t i = 0; i < params.w2.size(); ++i) probe(&params.w2[i], grads.w2[i]);
        probe(&params.b2, grads.b2);
      }
    }
  }

  const bool ok = trials_done >= 100 && max_rel < 1e-5;
  return report(2, ok, "objective gradient vs finite differences: " +
                           std::to_string(trials_done) +
                           " trials, max relative error " + fmt(max_rel) + " (< 1e-5)");
}

// ---------------------------------------------------------------- check 3
// Group-gap losses vs a pairwise double-loop rewrite.
struct NaiveGap {
  double loss = 0;
  std::vector<double> grad;
  size_t events = 0;
};

NaiveGap naive_gap(const std::vector<double>& yhat, const std::vector<char>& in_p,
                   const std::vector<char>& in_n) {
  const size_t n = yhat.size();
  NaiveGap r;
  r.grad.assign(n, 0.0);
  size_t np = 0, nn = 0;
  for (size_t i = 0; i < n; ++i) {
    np += in_p[i] ? 1 : 0;
    nn += in_n[i] ? 1 : 0;
  }
  if (np == 0 || nn == 0) {
    r.events = 1;
    return r;
  }
  double acc = 0;
  for (size_t i = 0; i < n; ++i) {
    if (!in_p[i]) continue;
    for (size_t j = 0; j < n; ++j) {
      if (!in_n[j]) continue;
      acc += yhat[i] - yhat[j];
    }
  }
  const double scale = static_cast<double>(np) * static_cast<double>(nn);
  const double diff = acc / scale;
  const double s = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
  r.loss = std::fabs(diff);
  for (size_t i = 0; i < n; ++i) {
    if (!in_p[i]) continue;
    for (size_t j = 0; j < n; ++j) {
      if (!in_n[j]) continue;
      r.grad[i] += s / scale;
      r.grad[j] -= s / scale;
    }
  }
  return r;
}

bool check_fairness_oracle() {
  Rng rng(3141592);
  double max_abs = 0.0;
  auto track = [&](const FairnessResult& got, const NaiveGap& want) {
    max_abs = std::max(max_abs, std::fabs(got.loss - want.loss));
    for (size_t i = 0; i < got.grad.size(); ++i)
      max_abs = std::max(max_abs, std::fabs(got.grad[i] - want.grad[i]));
    if (got.empty_group_events != want.events) max_abs = std::max(max_abs, 1.0);
  };

  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 2 + rng.next_below(63);
    std::vector<double> yhat(n);
    std::vector<uint8_t> prot(n);
    std::vector<int8_t> y_eff(n);
    for (size_t i = 0; i < n; ++i) {
      yhat[i] = rng.next_unit();
      prot[i] = static_cast<uint8_t>(rng.next_below(2));
      y_eff[i] = static_cast<int8_t>(rng.next_below(3)) - 1;
    }

    std::vector<char> in_p(n), in_n(n);
    for (size_t i = 0; i < n; ++i) {
      in_p[i] = prot[i] != 0;
      in_n[i] = prot[i] == 0;
    }
    track(dp_loss(yhat, prot), naive_gap(yhat, in_p, in_n));

    for (int k = 0; k < 2; ++k) {
      for (size_t i = 0; i < n; ++i) {
        in_p[i] = prot[i] != 0 && y_eff[i] == k;
        in_n[i] = prot[i] == 0 && y_eff[i] == k;
      }
      track(opp_loss(yhat, prot, y_eff, k), naive_gap(yhat, in_p, in_n));
    }

    NaiveGap odd_want;
    odd_want.grad.assign(n, 0.0);
    for (int k = 0; k < 2; ++k) {
      for (size_t i = 0; i < n; ++i) {
        in_p[i] = prot[i] != 0 && y_eff[i] == k;
        in_n[i] = prot[i] == 0 && y_eff[i] == k;
      }
      const NaiveGap part = naive_gap(yhat, in_p, in_n);
      odd_want.loss += part.loss;
      odd_want.events += part.events;
      for (size_t i = 0; i < n; ++i) odd_want.grad[i] += part.grad[i];
    }
    track(odd_loss(yhat, prot, y_eff), odd_want);
  }

  const bool ok = max_abs <= 1e-12;
  return report(3, ok, "group-gap losses vs pairwise double-loop rewrite on 1000 batches, "
                       "max absolute difference " + fmt(max_abs) + " (<= 1e-12)");
}

// ---------------------------------------------------------------- check 4
bool check_unlabeled_benefit(Context& ctx) {
  const fs::path out = ctx.scratch / "unlabeled_curve.csv";
  CmdResult r = run_cmd(ctx, "sweep-unlabeled --data \"" + ctx.dataset.string() +
                                 "\" --out \"" + out.string() +
                                 "\" --labeled 100 --unlabeled 0,5000,20000 --alpha 0.0025 "
                                 "--fairness dp --repeats 5 --tune-beta --seed 42");
  if (r.code != 0)
    return report(4, false, "unlabeled-size sweep exited " + std::to_string(r.code));
  const auto rows = read_csv(out);
  const CsvRow* lo = find_mean(rows, "ssfair", 0.0025, 0);
  const CsvRow* hi = find_mean(rows, "ssfair", 0.0025, 20000);
  if (!lo || !hi) return report(4, false, "mean rows missing from the unlabeled-size sweep");
  const double acc0 = lo->num(kAccuracy), dp0 = lo->num(kFairValue);
  const double acc20 = hi->num(kAccuracy), dp20 = hi->num(kFairValue);
  const bool ok = dp20 < dp0 && acc20 > acc0;
  return report(4, ok, "5-repeat means from 0 to 20000 unlabeled: parity gap " + fmt(dp0) +
                           " -> " + fmt(dp20) + " (must drop), accuracy " + fmt(acc0) +
                           " -> " + fmt(acc20) + " (must rise), " + fmt(r.seconds) + "s");
}

// ---------------------------------------------------------------- check 5
bool curve_well_formed(const fs::path& csv, const std::string& fairness, size_t want_rows,
                       double fair_max, std::string& why) {
  const auto rows = read_csv(csv);
  if (rows.size() != want_rows) {
    why = fairness + " curve has " + std::to_string(rows.size()) + " rows, want " +
          std::to_string(want_rows);
    return false;
  }
  size_t means = 0;
  for (const auto& r : rows) {
    if (r.f.size() != 12 || r.f[kFair] != fairness) {
      why = fairness + " curve has a malformed row";
      return false;
    }
    const double acc = r.num(kAccuracy), fv = r.num(kFairValue);
    if (!(acc >= 0.0 && acc <= 1.0 && fv >= 0.0 && fv <= fair_max)) {
      why = fairness + " curve has out-of-range values";
      return false;
    }
    means += (r.f[kRepeat] == "mean");
  }
  if (means * 3 != want_rows) {  // one mean per cell of two repeats
    why = fairness + " curve is missing mean rows";
    return false;
  }
  return true;
}

// The trade-off curves sweep the accuracy weight over many decades, so they
// run in the additive weighting (alpha far past 1 is meaningful there).
const std::string kCurveAlphas = "1e-7,0.1,1.0,100,10000";
const double kCurveAlphaValues[] = {1e-7, 0.1, 1.0, 100.0, 10000.0};

bool check_semi_supervised_dominance(Context& ctx) {
  const fs::path dp_csv = ctx.scratch / "alpha_curve_dp.csv";
  CmdResult r = run_cmd(ctx, "sweep-alpha --data \"" + ctx.dataset.string() + "\" --out \"" +
                                 dp_csv.string() + "\" --labeled 100 --alpha " + kCurveAlphas +
                                 " --alpha-mode additive --fairness dp --repeats 5 --seed 42");
  if (r.code != 0) return report(5, false, "alpha sweep (dp) exited " + std::to_string(r.code));

  const auto rows = read_csv(dp_csv);
  int wins = 0;
  std::string pairs;
  for (double a : kCurveAlphaValues) {
    const CsvRow* semi = find_mean(rows, "ssfair", a);
    const CsvRow* base = find_mean(rows, "supervised", a);
    if (!semi || !base) return report(5, false, "mean rows missing from the alpha sweep");
    const bool win = semi->num(kAccuracy) > base->num(kAccuracy) &&
                     semi->num(kFairValue) <= base->num(kFairValue) + 0.02;
    wins += win;
    pairs += (pairs.empty() ? "" : " ") + fmt(semi->num(kAccuracy)) + (win ? ">" : "!>") +
             fmt(base->num(kAccuracy));
  }

  std::string why;
  bool opp_ok = false, odd_ok = false;
  const fs::path opp_csv = ctx.scratch / "alpha_curve_opp.csv";
  CmdResult ro = run_cmd(ctx, "sweep-alpha --data \"" + ctx.dataset.string() + "\" --out \"" +
                                  opp_csv.string() + "\" --labeled 100 --alpha " + kCurveAlphas +
                                  " --alpha-mode additive --fairness opp --repeats 2 --seed 42");
  opp_ok = ro.code == 0 && curve_well_formed(opp_csv, "opp", 5 * 2 * 3, 1.0, why);
  if (opp_ok) {
    const fs::path odd_csv = ctx.scratch / "alpha_curve_odd.csv";
    CmdResult rd = run_cmd(ctx, "sweep-alpha --data \"" + ctx.dataset.string() + "\" --out \"" +
                                    odd_csv.string() + "\" --labeled 100 --alpha " + kCurveAlphas +
                                    " --alpha-mode additive --fairness odd --repeats 2 --seed 42");
    odd_ok = rd.code == 0 && curve_well_formed(odd_csv, "odd", 5 * 2 * 3, 2.0, why);
  }

  const bool ok = wins >= 3 && opp_ok && odd_ok;
  return report(5, ok, "semi-supervised vs supervised 5-repeat mean accuracy at matched "
                       "fairness (dp, +0.02 slack): " + std::to_string(wins) +
                       "/5 alpha values won [" + pairs + "] (need >= 3); opp curve " +
                       (opp_ok ? "complete" : "broken") + ", odd curve " +
                       (odd_ok ? "complete" : "broken") +
                       (why.empty() ? "" : " (" + why + ")"));
}

// ---------------------------------------------------------------- check 6
// Endpoints of the convex weighting: alpha=1 is the pure-accuracy objective,
// alpha=1e-7 is (almost) the pure-fairness one.
bool check_tradeoff_direction(Context& ctx) {
  const fs::path csv = ctx.scratch / "alpha_endpoints_dp.csv";
  CmdResult r = run_cmd(ctx, "sweep-alpha --data \"" + ctx.dataset.string() + "\" --out \"" +
                                 csv.string() +
                                 "\" --labeled 100 --alpha 1e-7,1.0 --alpha-mode convex "
                                 "--fairness dp --repeats 5 --seed 42");
  if (r.code != 0)
    return report(6, false, "alpha endpoint sweep exited " + std::to_string(r.code));
  const auto rows = read_csv(csv);
  const CsvRow* lo = find_mean(rows, "ssfair", 1e-7);
  const CsvRow* hi = find_mean(rows, "ssfair", 1.0);
  if (!lo || !hi) return report(6, false, "alpha endpoint rows missing");
  const bool ok = hi->num(kAccuracy) >= lo->num(kAccuracy) &&
                  hi->num(kFairValue) >= lo->num(kFairValue);
  return report(6, ok, "alpha endpoints on 5-repeat means: accuracy " + fmt(lo->num(kAccuracy)) +
                           " -> " + fmt(hi->num(kAccuracy)) + " and parity gap " +
                           fmt(lo->num(kFairValue)) + " -> " + fmt(hi->num(kFairValue)) +
                           " must both be non-decreasing in alpha");
}

// ---------------------------------------------------------------- check 7
// Logistic-regression oracle: plain loops, full-batch Adam, same features.
double logistic_oracle_accuracy(const Dataset& train_set, const Dataset& test_set) {
  const size_t d = train_set.n_features, n = train_set.n_rows();
  std::vector<double> w(d, 0.0), m(d, 0.0), v(d, 0.0), grad(d);
  double b = 0, mb = 0, vb = 0;
  const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;

  auto sig = [](double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  };

  for (int it = 1; it <= 400; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double gb = 0;
    for (size_t i = 0; i < n; ++i) {
      const double* x = train_set.row(i);
      double z = b;
      for (size_t k = 0; k < d; ++k) z += w[k] * x[k];
      const double r = sig(z) - train_set.y[i];
      for (size_t k = 0; k < d; ++k) grad[k] += r * x[k];
      gb += r;
    }
    const double inv = 1.0 / static_cast<double>(n);
    const double mc = 1.0 / (1.0 - std::pow(b1, it));
    const double vc = 1.0 / (1.0 - std::pow(b2, it));
    for (size_t k = 0; k < d; ++k) {
      const double g = grad[k] * inv;
      m[k] = b1 * m[k] + (1 - b1) * g;
      v[k] = b2 * v[k] + (1 - b2) * g * g;
      w[k] -= lr * (m[k] * mc) / (std::sqrt(v[k] * vc) + eps);
    }
    const double g = gb * inv;
    mb = b1 * mb + (1 - b1) * g;
    vb = b2 * vb + (1 - b2) * g * g;
    b -= lr * (mb * mc) / (std::sqrt(vb * vc) + eps);
  }

  size_t correct = 0;
  for (size_t i = 0; i < test_set.n_rows(); ++i) {
    const double* x = test_set.row(i);
    double z = b;
    for (size_t k = 0; k < d; ++k) z += w[k] * x[k];
    correct += ((z >= 0 ? 1 : 0) == test_set.y[i]);
  }
  return static_cast<double>(correct) / static_cast<double>(test_set.n_rows());
}

bool check_supervision_floor(Context& ctx) {
  const Dataset full = read_dataset(ctx.dataset);
  auto [train_set, test_set] = split(full, {0.7, derive_seed(42, "split", 0)});

  TrainConfig cfg;
  cfg.alpha = 1.0;
  cfg.init_seed = derive_seed(42, "init", 0);
  cfg.shuffle_seed = derive_seed(42, "shuffle", 0);
  cfg.dropout_seed = derive_seed(42, "dropout", 0);
  cfg.beta = tune_beta(cfg, train_set, derive_seed(42, "holdout", 0));
  auto [params, history] = train(cfg, train_set);
  const double acc_mlp = evaluate(params, test_set).accuracy;

  const double acc_log = logistic_oracle_accuracy(train_set, test_set);
  const bool ok = acc_mlp >= acc_log - 0.01;
  return report(7, ok, "fully labeled accuracy " + fmt(acc_mlp) + " vs logistic oracle " +
                           fmt(acc_log) + " - 0.01 (selected beta " + fmt(cfg.beta) + ")");
}

// ---------------------------------------------------------------- check 8
bool check_determinism(Context& ctx) {
  std::string why;

  const fs::path ds2 = ctx.scratch / "adult_rerun.ds";
  CmdResult p = run_cmd(ctx, "preprocess --data \"" + ctx.data_dir.string() + "\" --out \"" +
                                 ds2.string() + "\"");
  if (p.code != 0 || read_bytes(ctx.dataset) != read_bytes(ds2))
    why = "preprocess rerun differs";

  const std::string ds = ctx.dataset.string();
  const std::string m1 = (ctx.scratch / "det_m1.bin").string();
  if (why.empty()) {
    const std::string m2 = (ctx.scratch / "det_m2.bin").string();
    const std::string h1 = (ctx.scratch / "det_h1.tsv").string();
    const std::string h2 = (ctx.scratch / "det_h2.tsv").string();
    const std::string t1 = (ctx.scratch / "det_test.ds").string();
    const std::string args = " --labeled 50 --unlabeled 200 --alpha 0.5 --fairness odd "
                             "--epochs 5 --batch-size 64 --seed 42";
    CmdResult a = run_cmd(ctx, "train --data \"" + ds + "\" --out " + m1 + " --history " + h1 +
                                   " --out-test " + t1 + args);
    CmdResult b = run_cmd(ctx, "train --data \"" + ds + "\" --out " + m2 + " --history " + h2 + args);
    if (a.code != 0 || b.code != 0 || a.out != b.out ||
        read_bytes(m1) != read_bytes(m2) || read_bytes(h1) != read_bytes(h2))
      why = "train rerun differs (model, history or metrics)";
  }
  if (why.empty()) {
    const std::string cmd = "evaluate --data \"" + (ctx.scratch / "det_test.ds").string() +
                            "\" --model " + m1;
    CmdResult a = run_cmd(ctx, cmd);
    CmdResult b = run_cmd(ctx, cmd);
    if (a.code != 0 || b.code != 0 || a.out.empty() || a.out != b.out)
      why = "evaluate rerun differs";
  }
  if (why.empty()) {
    const std::string c1 = (ctx.scratch / "det_sa1.csv").string();
    const std::string c2 = (ctx.scratch / "det_sa2.csv").string();
    const std::string args = " --labeled 40 --alpha 0.3,0.9 --repeats 2 --epochs 4 "
                             "--batch-size 64 --seed 42";
    CmdResult a = run_cmd(ctx, "sweep-alpha --data \"" + ds + "\" --out " + c1 + args);
    CmdResult b = run_cmd(ctx, "sweep-alpha --data \"" + ds + "\" --out " + c2 + args);
    if (a.code != 0 || b.code != 0 || read_bytes(c1) != read_bytes(c2))
      why = "sweep-alpha rerun differs";
  }
  if (why.empty()) {
    const std::string c1 = (ctx.scratch / "det_su1.csv").string();
    const std::string c2 = (ctx.scratch / "det_su2.csv").string();
    const std::string args = " --labeled 40 --unlabeled 0,50 --alpha 0.5 --repeats 2 "
                             "--epochs 4 --batch-size 64 --seed 42";
    CmdResult a = run_cmd(ctx, "sweep-unlabeled --data \"" + ds + "\" --out " + c1 + args);
    CmdResult b = run_cmd(ctx, "sweep-unlabeled --data \"" + ds + "\" --out " + c2 + args);
    if (a.code != 0 || b.code != 0 || read_bytes(c1) != read_bytes(c2))
      why = "sweep-unlabeled rerun differs";
  }

  return report(8, why.empty(),
                why.empty() ? "preprocess, train, evaluate, and both sweeps rerun byte-identically"
                            : why);
}

// ---------------------------------------------------------------- check 9
bool check_default_runtime(Context& ctx) {
  const Dataset full = read_dataset(ctx.dataset);
  auto [train_full, test_set] = split(full, {0.7, derive_seed(42, "split", 0)});
  Dataset masked = mask_labels(train_full, 100, derive_seed(42, "mask", 0));

  TrainConfig cfg;  // library defaults: 1000 epochs, batch 512, hidden 32
  cfg.alpha = 0.0025;
  cfg.init_seed = derive_seed(42, "init", 0);
  cfg.shuffle_seed = derive_seed(42, "shuffle", 0);
  cfg.dropout_seed = derive_seed(42, "dropout", 0);

  const auto t0 = std::chrono::steady_clock::now();
  auto [params, history] = train(cfg, masked);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double acc = evaluate(params, test_set).accuracy;
  const bool ok = seconds < 600.0 && history.size() == 1000;
  return report(9, ok, "default configuration (1000 epochs, batch 512, hidden 32) trains in " +
                           fmt(seconds) + "s (< 600s), test accuracy " + fmt(acc));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: ssfair_acceptance <cli> <raw-data-dir> <scratch-dir>\n";
    return 2;
  }
  Context ctx;
  ctx.cli = argv[1];
  ctx.data_dir = argv[2];
  ctx.scratch = argv[3];
  fs::create_directories(ctx.scratch);

  int failed = 0;
  auto guard = [&](int n, auto&& fn) {
    try {
      if (!fn()) ++failed;
    } catch (const std::exception& e) {
      report(n, false, std::string("unexpected error: ") + e.what());
      ++failed;
    }
  };

  guard(1, [&] { return check_preprocess(ctx); });
  guard(2, [] { return check_gradients(); });
  guard(3, [] { return check_fairness_oracle(); });
  guard(4, [&] { return check_unlabeled_benefit(ctx); });
  guard(5, [&] { return check_semi_supervised_dominance(ctx); });
  guard(6, [&] { return check_tradeoff_direction(ctx); });
  guard(7, [&] { return check_supervision_floor(ctx); });
  guard(8, [&] { return check_determinism(ctx); });
  guard(9, [&] { return check_default_runtime(ctx); });

  std::cout << (9 - failed) << "/9 checks passed\n";
  return failed == 0 ? 0 : 1;
}
