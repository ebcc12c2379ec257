#include <cmath>
#include <cstring>

#include "ssfair/kernels.hpp"

// Reference kernels. Plain loops, fixed accumulation order; the SIMD variants
// are tested against these.

namespace ssfair::kernels {
namespace scalar {

double dot(const double* a, const double* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* x, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sumsq(const double* x, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void axpy(double a, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double a, size_t n) {
  for (size_t i = 0; i < n; ++i) x[i] *= a;
}

void mul(double* y, const double* x, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] *= x[i];
}

void relu(double* x, size_t n) {
  for (size_t i = 0; i < n; ++i)
    if (x[i] < 0.0) x[i] = 0.0;
}

void relu_backward(double* g, const double* pre, size_t n) {
  for (size_t i = 0; i < n; ++i)
    if (!(pre[i] > 0.0)) g[i] = 0.0;
}

void linear_forward(const double* x, size_t batch, size_t in, size_t out,
                    const double* w, const double* b, double* y) {
  for (size_t i = 0; i < batch; ++i) {
    double* yi = y + i * out;
    const double* xi = x + i * in;
    std::memcpy(yi, b, out * sizeof(double));
    for (size_t k = 0; k < in; ++k) {
      const double xk = xi[k];
      const double* wk = w + k * out;
      for (size_t o = 0; o < out; ++o) yi[o] += xk * wk[o];
    }
  }
}

void linear_grad_weights(const double* x, const double* dy, size_t batch,
                         size_t in, size_t out, double* dw, double* db) {
  std::memset(dw, 0, in * out * sizeof(double));
  std::memset(db, 0, out * sizeof(double));
  for (size_t i = 0; i < batch; ++i) {
    const double* xi = x + i * in;
    const double* dyi = dy + i * out;
    for (size_t o = 0; o < out; ++o) db[o] += dyi[o];
    for (size_t k = 0; k < in; ++k) {
      const double xk = xi[k];
      double* dwk = dw + k * out;
      for (size_t o = 0; o < out; ++o) dwk[o] += xk * dyi[o];
    }
  }
}

void linear_grad_input(const double* dy, const double* w, size_t batch,
                       size_t in, size_t out, double* dx) {
  for (size_t i = 0; i < batch; ++i) {
    const double* dyi = dy + i * out;
    double* dxi = dx + i * in;
    for (size_t k = 0; k < in; ++k) {
      const double* wk = w + k * out;
      double acc = 0.0;
      for (size_t o = 0; o < out; ++o) acc += dyi[o] * wk[o];
      dxi[k] = acc;
    }
  }
}

void adam_update(double* p, const double* g, double* m, double* v, size_t n,
                 double lr, double b1, double b2, double eps, double mc, double vc) {
  for (size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    const double mhat = m[i] * mc;
    const double vhat = v[i] * vc;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace scalar

const Ops& scalar_ops() {
  static const Ops table = {
      scalar::dot,          scalar::sum,
      scalar::sumsq,        scalar::axpy,
      scalar::scale,        scalar::mul,
      scalar::relu,         scalar::relu_backward,
      scalar::linear_forward, scalar::linear_grad_weights,
      scalar::linear_grad_input, scalar::adam_update,
  };
  return table;
}

}  // namespace ssfair::kernels
