#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssfair/nn.hpp"

namespace ssfair {

enum class FairnessKind { DP, OPP, ODD };

const char* fairness_name(FairnessKind k);
FairnessKind parse_fairness(const std::string& s);

// Convex: total = alpha*J_C + (1-alpha)*J_F + beta*reg, alpha in [0,1].
// Additive: total = alpha*J_C + J_F + beta*reg, alpha >= 0 (covers sweeps
// where alpha runs far past 1).
enum class AlphaMode { Convex, Additive };

const char* alpha_mode_name(AlphaMode m);
AlphaMode parse_alpha_mode(const std::string& s);

// Per-sample effective targets q and keep flags v. Labeled samples are
// always kept with q = y. Unlabeled samples are kept only when the output
// clears the confidence band: yhat < 1-lambda or yhat > lambda; then
// q = 1{yhat >= 0.5}.
struct GateResult {
  std::vector<int8_t> q;    // effective target, meaningful where v = 1
  std::vector<uint8_t> v;   // 1 = sample participates in the loss
  size_t n_labeled = 0;
  size_t n_confident_unlabeled = 0;
  size_t n_gated_out = 0;
};

GateResult target_and_gate(const std::vector<int8_t>& y,
                           const std::vector<double>& yhat, double lambda);

// Sum over kept samples of -q*log(yhat) - (1-q)*log(1-yhat); yhat is clamped
// to [1e-12, 1-1e-12] at evaluation only. q is a constant during backprop,
// so the per-sample gradient is (yhat-q)/(yhat*(1-yhat)) for kept samples.
struct ClassificationResult {
  double loss = 0.0;
  std::vector<double> grad;  // dJ_C/dyhat per sample
};

ClassificationResult classification_loss(const std::vector<double>& yhat,
                                         const GateResult& gate);

// |mean(yhat over protected) - mean(yhat over unprotected)|. An empty group
// zeroes the loss and gradient and bumps empty_group_events. Subgradient of
// |.| at 0 is 0.
struct FairnessResult {
  double loss = 0.0;
  std::vector<double> grad;  // dJ_F/dyhat per sample
  size_t empty_group_events = 0;
};

FairnessResult dp_loss(const std::vector<double>& yhat,
                       const std::vector<uint8_t>& protected_attr);

// Same discrepancy restricted to samples whose effective label equals k.
// y_eff: 0/1 participate, kExcluded drops the sample from both groups.
inline constexpr int8_t kExcluded = -1;

FairnessResult opp_loss(const std::vector<double>& yhat,
                        const std::vector<uint8_t>& protected_attr,
                        const std::vector<int8_t>& y_eff, int k);

// opp_loss(k=0) + opp_loss(k=1), losses and gradients summed.
FairnessResult odd_loss(const std::vector<double>& yhat,
                        const std::vector<uint8_t>& protected_attr,
                        const std::vector<int8_t>& y_eff);

// Squared L2 norm over every weight and bias, gradient 2*theta.
std::pair<double, ParamGrads> regularization(const ModelParams& params);

struct LossBreakdown {
  double total = 0.0;
  double classification_term = 0.0;  // J_C, unweighted
  double fairness_term = 0.0;        // J_F, unweighted
  double regularization_term = 0.0;  // reg, unweighted
  size_t gate_labeled = 0;
  size_t gate_confident_unlabeled = 0;
  size_t gate_gated_out = 0;
  size_t empty_group_events = 0;
};

// Full objective over one batch's outputs. DP sees every batch sample;
// OPP/ODD see labeled samples (ground truth) plus confidently gated
// unlabeled samples (pseudo-label), with gated-out samples excluded.
// dl_dyhat carries the already-weighted affine combination of term
// gradients; reg_grads comes back scaled by beta.
struct CombinedResult {
  LossBreakdown breakdown;
  std::vector<double> dl_dyhat;
  ParamGrads reg_grads;
};

CombinedResult combined_loss(const std::vector<double>& yhat,
                             const std::vector<int8_t>& y,
                             const std::vector<uint8_t>& protected_attr,
                             const ModelParams& params, double alpha,
                             AlphaMode alpha_mode, double beta,
                             FairnessKind kind, double lambda);

}  // namespace ssfair
