#include "ssfair/optim.hpp"

#include <cmath>
#include <string>

#include "ssfair/errors.hpp"
#include "ssfair/kernels.hpp"

namespace ssfair {

namespace {

void check_finite(const double* g, size_t n, const char* block) {
  for (size_t i = 0; i < n; ++i)
    if (!std::isfinite(g[i]))
      throw InternalError(std::string("non-finite gradient in ") + block +
                          " at index " + std::to_string(i));
}

}  // namespace

void AdamState::init_like(const ModelParams& p) {
  m.resize_like(p);
  v.resize_like(p);
  m.zero();
  v.zero();
  t = 0;
}

void AdamState::step(ModelParams& params, const ParamGrads& grads) {
  if (m.w1.size() != params.w1.size())
    throw InternalError("adam state shape does not match params");
  check_finite(grads.w1.data(), grads.w1.size(), "w1");
  check_finite(grads.b1.data(), grads.b1.size(), "b1");
  check_finite(grads.w2.data(), grads.w2.size(), "w2");
  check_finite(&grads.b2, 1, "b2");

  ++t;
  const double mc = 1.0 / (1.0 - std::pow(beta1, static_cast<double>(t)));
  const double vc = 1.0 / (1.0 - std::pow(beta2, static_cast<double>(t)));

  const auto& k = kernels::ops();
  k.adam_update(params.w1.data(), grads.w1.data(), m.w1.data(), v.w1.data(),
                params.w1.size(), lr, beta1, beta2, epsilon, mc, vc);
  k.adam_update(params.b1.data(), grads.b1.data(), m.b1.data(), v.b1.data(),
                params.b1.size(), lr, beta1, beta2, epsilon, mc, vc);
  k.adam_update(params.w2.data(), grads.w2.data(), m.w2.data(), v.w2.data(),
                params.w2.size(), lr, beta1, beta2, epsilon, mc, vc);
  k.adam_update(&params.b2, &grads.b2, &m.b2, &v.b2, 1, lr, beta1, beta2,
                epsilon, mc, vc);
}

}  // namespace ssfair
