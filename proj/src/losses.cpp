#include "ssfair/losses.hpp"

#include <algorithm>
#include <cmath>

#include "ssfair/dataset.hpp"
#include "ssfair/errors.hpp"
#include "ssfair/kernels.hpp"

namespace ssfair {

namespace {

constexpr double kClamp = 1e-12;

double clamp_prob(double p) { return std::min(1.0 - kClamp, std::max(kClamp, p)); }

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Shared core of dp/opp: groups are index sets into yhat.
FairnessResult group_gap(const std::vector<double>& yhat,
                         const std::vector<size_t>& grp_p,
                         const std::vector<size_t>& grp_n) {
  FairnessResult r;
  r.grad.assign(yhat.size(), 0.0);
  if (grp_p.empty() || grp_n.empty()) {
    r.empty_group_events = 1;
    return r;
  }
  double sum_p = 0.0, sum_n = 0.0;
  for (size_t i : grp_p) sum_p += yhat[i];
  for (size_t i : grp_n) sum_n += yhat[i];
  const double np = static_cast<double>(grp_p.size());
  const double nn = static_cast<double>(grp_n.size());
  const double diff = sum_p / np - sum_n / nn;
  const double s = sign_of(diff);
  r.loss = std::abs(diff);
  for (size_t i : grp_p) r.grad[i] = s / np;
  for (size_t i : grp_n) r.grad[i] = -s / nn;
  return r;
}

}  // namespace

const char* fairness_name(FairnessKind k) {
  switch (k) {
    case FairnessKind::DP: return "dp";
    case FairnessKind::OPP: return "opp";
    case FairnessKind::ODD: return "odd";
  }
  return "?";
}

FairnessKind parse_fairness(const std::string& s) {
  if (s == "dp") return FairnessKind::DP;
  if (s == "opp") return FairnessKind::OPP;
  if (s == "odd") return FairnessKind::ODD;
  throw ConfigError("unknown fairness kind '" + s + "' (expected dp, opp or odd)");
}

const char* alpha_mode_name(AlphaMode m) {
  return m == AlphaMode::Convex ? "convex" : "additive";
}

AlphaMode parse_alpha_mode(const std::string& s) {
  if (s == "convex") return AlphaMode::Convex;
  if (s == "additive") return AlphaMode::Additive;
  throw ConfigError("unknown alpha mode '" + s + "' (expected convex or additive)");
}

GateResult target_and_gate(const std::vector<int8_t>& y,
                           const std::vector<double>& yhat, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ConfigError("lambda must be in [0,1]");
  if (y.size() != yhat.size())
    throw InternalError("target_and_gate: label/output size mismatch");

  GateResult g;
  g.q.resize(y.size());
  g.v.resize(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    if (y[i] != kUnlabeled) {
      g.q[i] = y[i];
      g.v[i] = 1;
      ++g.n_labeled;
    } else if (yhat[i] < 1.0 - lambda || yhat[i] > lambda) {
      g.q[i] = yhat[i] >= 0.5 ? 1 : 0;
      g.v[i] = 1;
      ++g.n_confident_unlabeled;
    } else {
      g.q[i] = 0;
      g.v[i] = 0;
      ++g.n_gated_out;
    }
  }
  return g;
}

ClassificationResult classification_loss(const std::vector<double>& yhat,
                                         const GateResult& gate) {
  if (gate.v.size() != yhat.size())
    throw InternalError("classification_loss: gate/output size mismatch");

  ClassificationResult r;
  r.grad.assign(yhat.size(), 0.0);
  for (size_t i = 0; i < yhat.size(); ++i) {
    if (!gate.v[i]) continue;
    const double p = clamp_prob(yhat[i]);
    const double q = gate.q[i];
    r.loss += -q * std::log(p) - (1.0 - q) * std::log(1.0 - p);
    r.grad[i] = (p - q) / (p * (1.0 - p));
  }
  return r;
}

FairnessResult dp_loss(const std::vector<double>& yhat,
                       const std::vector<uint8_t>& protected_attr) {
  if (protected_attr.size() != yhat.size())
    throw InternalError("dp_loss: group/output size mismatch");

  std::vector<size_t> grp_p, grp_n;
  for (size_t i = 0; i < yhat.size(); ++i)
    (protected_attr[i] ? grp_p : grp_n).push_back(i);
  return group_gap(yhat, grp_p, grp_n);
}

FairnessResult opp_loss(const std::vector<double>& yhat,
                        const std::vector<uint8_t>& protected_attr,
                        const std::vector<int8_t>& y_eff, int k) {
  if (protected_attr.size() != yhat.size() || y_eff.size() != yhat.size())
    throw InternalError("opp_loss: input size mismatch");

  std::vector<size_t> grp_p, grp_n;
  for (size_t i = 0; i < yhat.size(); ++i) {
    if (y_eff[i] != k) continue;
    (protected_attr[i] ? grp_p : grp_n).push_back(i);
  }
  return group_gap(yhat, grp_p, grp_n);
}

FairnessResult odd_loss(const std::vector<double>& yhat,
                        const std::vector<uint8_t>& protected_attr,
                        const std::vector<int8_t>& y_eff) {
  FairnessResult r0 = opp_loss(yhat, protected_attr, y_eff, 0);
  FairnessResult r1 = opp_loss(yhat, protected_attr, y_eff, 1);
  r0.loss += r1.loss;
  for (size_t i = 0; i < r0.grad.size(); ++i) r0.grad[i] += r1.grad[i];
  r0.empty_group_events += r1.empty_group_events;
  return r0;
}

std::pair<double, ParamGrads> regularization(const ModelParams& params) {
  const auto& k = kernels::ops();
  double reg = k.sumsq(params.w1.data(), params.w1.size()) +
               k.sumsq(params.b1.data(), params.b1.size()) +
               k.sumsq(params.w2.data(), params.w2.size()) +
               params.b2 * params.b2;

  ParamGrads g;
  g.resize_like(params);
  for (size_t i = 0; i < params.w1.size(); ++i) g.w1[i] = 2.0 * params.w1[i];
  for (size_t i = 0; i < params.b1.size(); ++i) g.b1[i] = 2.0 * params.b1[i];
  for (size_t i = 0; i < params.w2.size(); ++i) g.w2[i] = 2.0 * params.w2[i];
  g.b2 = 2.0 * params.b2;
  return {reg, std::move(g)};
}

CombinedResult combined_loss(const std::vector<double>& yhat,
                             const std::vector<int8_t>& y,
                             const std::vector<uint8_t>& protected_attr,
                             const ModelParams& params, double alpha,
                             AlphaMode alpha_mode, double beta,
                             FairnessKind kind, double lambda) {
  if (alpha_mode == AlphaMode::Convex && !(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("alpha must be in [0,1] in convex mode");
  if (alpha_mode == AlphaMode::Additive && !(alpha >= 0.0))
    throw ConfigError("alpha must be >= 0 in additive mode");
  if (beta < 0.0) throw ConfigError("beta must be >= 0");

  const GateResult gate = target_and_gate(y, yhat, lambda);
  const ClassificationResult cls = classification_loss(yhat, gate);

  FairnessResult fair;
  if (kind == FairnessKind::DP) {
    fair = dp_loss(yhat, protected_attr);
  } else {
    // Effective labels: ground truth where known, pseudo-label where the gate
    // kept the sample, excluded otherwise.
    std::vector<int8_t> y_eff(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
      if (y[i] != kUnlabeled)
        y_eff[i] = y[i];
      else
        y_eff[i] = gate.v[i] ? gate.q[i] : kExcluded;
    }
    fair = (kind == FairnessKind::OPP) ? opp_loss(yhat, protected_attr, y_eff, 1)
                                       : odd_loss(yhat, protected_attr, y_eff);
  }

  auto [reg, reg_grads] = regularization(params);

  const double wc = alpha;
  const double wf = (alpha_mode == AlphaMode::Convex) ? 1.0 - alpha : 1.0;

  CombinedResult out;
  out.breakdown.classification_term = cls.loss;
  out.breakdown.fairness_term = fair.loss;
  out.breakdown.regularization_term = reg;
  out.breakdown.total = wc * cls.loss + wf * fair.loss + beta * reg;
  out.breakdown.gate_labeled = gate.n_labeled;
  out.breakdown.gate_confident_unlabeled = gate.n_confident_unlabeled;
  out.breakdown.gate_gated_out = gate.n_gated_out;
  out.breakdown.empty_group_events = fair.empty_group_events;

  out.dl_dyhat.resize(yhat.size());
  for (size_t i = 0; i < yhat.size(); ++i)
    out.dl_dyhat[i] = wc * cls.grad[i] + wf * fair.grad[i];

  const auto& k = kernels::ops();
  k.scale(reg_grads.w1.data(), beta, reg_grads.w1.size());
  k.scale(reg_grads.b1.data(), beta, reg_grads.b1.size());
  k.scale(reg_grads.w2.data(), beta, reg_grads.w2.size());
  reg_grads.b2 *= beta;
  out.reg_grads = std::move(reg_grads);
  return out;
}

}  // namespace ssfair
