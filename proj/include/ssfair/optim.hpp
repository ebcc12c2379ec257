#pragma once

#include <cstdint>

#include "ssfair/nn.hpp"

namespace ssfair {

// Adam with bias correction; epsilon sits outside the square root.
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  uint64_t t = 0;
  ParamGrads m;
  ParamGrads v;

  void init_like(const ModelParams& p);

  // theta <- theta - lr * m_hat / (sqrt(v_hat) + eps). Throws InternalError
  // naming the parameter block on any non-finite gradient entry.
  void step(ModelParams& params, const ParamGrads& grads);
};

}  // namespace ssfair
