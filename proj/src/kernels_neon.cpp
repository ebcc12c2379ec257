#include <arm_neon.h>
#include <cmath>
#include <cstring>

#include "ssfair/kernels.hpp"

// NEON (aarch64) kernels, two float64 lanes per vector. Compiled only on
// aarch64 targets where NEON is baseline.

namespace ssfair::kernels {
namespace neon {

double dot(const double* a, const double* b, size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  for (; i + 2 <= n; i += 2)
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* x, size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sumsq(const double* x, size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vld1q_f64(x + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void axpy(double a, const double* x, double* y, size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double a, size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), va));
  for (; i < n; ++i) x[i] *= a;
}

void mul(double* y, const double* x, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vmulq_f64(vld1q_f64(y + i), vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] *= x[i];
}

void relu(double* x, size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmaxq_f64(vld1q_f64(x + i), zero));
  for (; i < n; ++i)
    if (x[i] < 0.0) x[i] = 0.0;
}

void relu_backward(double* g, const double* pre, size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    uint64x2_t keep = vcgtq_f64(vld1q_f64(pre + i), zero);
    vst1q_f64(g + i, vbslq_f64(keep, vld1q_f64(g + i), zero));
  }
  for (; i < n; ++i)
    if (!(pre[i] > 0.0)) g[i] = 0.0;
}

void linear_forward(const double* x, size_t batch, size_t in, size_t out,
                    const double* w, const double* b, double* y) {
  if (out == 1) {
    for (size_t i = 0; i < batch; ++i) y[i] = b[0] + dot(x + i * in, w, in);
    return;
  }
  for (size_t i = 0; i < batch; ++i) {
    const double* xi = x + i * in;
    double* yi = y + i * out;
    size_t o = 0;
    for (; o + 8 <= out; o += 8) {
      float64x2_t a0 = vld1q_f64(b + o);
      float64x2_t a1 = vld1q_f64(b + o + 2);
      float64x2_t a2 = vld1q_f64(b + o + 4);
      float64x2_t a3 = vld1q_f64(b + o + 6);
      for (size_t k = 0; k < in; ++k) {
        const float64x2_t xk = vdupq_n_f64(xi[k]);
        const double* wk = w + k * out + o;
        a0 = vfmaq_f64(a0, xk, vld1q_f64(wk));
        a1 = vfmaq_f64(a1, xk, vld1q_f64(wk + 2));
        a2 = vfmaq_f64(a2, xk, vld1q_f64(wk + 4));
        a3 = vfmaq_f64(a3, xk, vld1q_f64(wk + 6));
      }
      vst1q_f64(yi + o, a0);
      vst1q_f64(yi + o + 2, a1);
      vst1q_f64(yi + o + 4, a2);
      vst1q_f64(yi + o + 6, a3);
    }
    for (; o + 2 <= out; o += 2) {
      float64x2_t a0 = vld1q_f64(b + o);
      for (size_t k = 0; k < in; ++k)
        a0 = vfmaq_f64(a0, vdupq_n_f64(xi[k]), vld1q_f64(w + k * out + o));
      vst1q_f64(yi + o, a0);
    }
    for (; o < out; ++o) {
      double acc = b[o];
      for (size_t k = 0; k < in; ++k) acc += xi[k] * w[k * out + o];
      yi[o] = acc;
    }
  }
}

void linear_grad_weights(const double* x, const double* dy, size_t batch,
                         size_t in, size_t out, double* dw, double* db) {
  std::memset(dw, 0, in * out * sizeof(double));
  std::memset(db, 0, out * sizeof(double));
  if (out == 1) {
    for (size_t i = 0; i < batch; ++i) {
      db[0] += dy[i];
      axpy(dy[i], x + i * in, dw, in);
    }
    return;
  }
  for (size_t i = 0; i < batch; ++i) {
    const double* xi = x + i * in;
    const double* dyi = dy + i * out;
    axpy(1.0, dyi, db, out);
    for (size_t k = 0; k < in; ++k) {
      const float64x2_t xk = vdupq_n_f64(xi[k]);
      double* dwk = dw + k * out;
      size_t o = 0;
      for (; o + 2 <= out; o += 2)
        vst1q_f64(dwk + o, vfmaq_f64(vld1q_f64(dwk + o), xk, vld1q_f64(dyi + o)));
      for (; o < out; ++o) dwk[o] += xi[k] * dyi[o];
    }
  }
}

void linear_grad_input(const double* dy, const double* w, size_t batch,
                       size_t in, size_t out, double* dx) {
  if (out == 1) {
    for (size_t i = 0; i < batch; ++i) {
      const float64x2_t s = vdupq_n_f64(dy[i]);
      double* dxi = dx + i * in;
      size_t k = 0;
      for (; k + 2 <= in; k += 2)
        vst1q_f64(dxi + k, vmulq_f64(s, vld1q_f64(w + k)));
      for (; k < in; ++k) dxi[k] = dy[i] * w[k];
    }
    return;
  }
  for (size_t i = 0; i < batch; ++i) {
    const double* dyi = dy + i * out;
    double* dxi = dx + i * in;
    for (size_t k = 0; k < in; ++k) dxi[k] = dot(dyi, w + k * out, out);
  }
}

void adam_update(double* p, const double* g, double* m, double* v, size_t n,
                 double lr, double b1, double b2, double eps, double mc, double vc) {
  const float64x2_t vb1 = vdupq_n_f64(b1);
  const float64x2_t vb1c = vdupq_n_f64(1.0 - b1);
  const float64x2_t vb2 = vdupq_n_f64(b2);
  const float64x2_t vb2c = vdupq_n_f64(1.0 - b2);
  const float64x2_t vlr = vdupq_n_f64(lr);
  const float64x2_t veps = vdupq_n_f64(eps);
  const float64x2_t vmc = vdupq_n_f64(mc);
  const float64x2_t vvc = vdupq_n_f64(vc);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gi = vld1q_f64(g + i);
    float64x2_t mi = vfmaq_f64(vmulq_f64(vb1, vld1q_f64(m + i)), vb1c, gi);
    float64x2_t vi = vfmaq_f64(vmulq_f64(vb2, vld1q_f64(v + i)), vb2c, vmulq_f64(gi, gi));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t mhat = vmulq_f64(mi, vmc);
    const float64x2_t denom = vaddq_f64(vsqrtq_f64(vmulq_f64(vi, vvc)), veps);
    const float64x2_t step = vdivq_f64(vmulq_f64(vlr, mhat), denom);
    vst1q_f64(p + i, vsubq_f64(vld1q_f64(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] * mc) / (std::sqrt(v[i] * vc) + eps);
  }
}

}  // namespace neon

const Ops& neon_ops() {
  static const Ops table = {
      neon::dot,          neon::sum,
      neon::sumsq,        neon::axpy,
      neon::scale,        neon::mul,
      neon::relu,         neon::relu_backward,
      neon::linear_forward, neon::linear_grad_weights,
      neon::linear_grad_input, neon::adam_update,
  };
  return table;
}

}  // namespace ssfair::kernels
