#include <cmath>
#include <cstring>
#include <immintrin.h>

#include "ssfair/kernels.hpp"

// AVX2+FMA kernels. Accumulation order differs from the scalar reference, so
// results agree to rounding, not bit-for-bit.

namespace ssfair::kernels {
namespace avx2 {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot(const double* a, const double* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double sumsq(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void axpy(double a, const double* x, double* y, size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale(double* x, double a, size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  for (; i < n; ++i) x[i] *= a;
}

void mul(double* y, const double* x, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] *= x[i];
}

void relu(double* x, size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; ++i)
    if (x[i] < 0.0) x[i] = 0.0;
}

void relu_backward(double* g, const double* pre, size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d keep = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(g + i, _mm256_and_pd(_mm256_loadu_pd(g + i), keep));
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
    for (; o + 16 <= out; o += 16) {
      __m256d a0 = _mm256_loadu_pd(b + o);
      __m256d a1 = _mm256_loadu_pd(b + o + 4);
      __m256d a2 = _mm256_loadu_pd(b + o + 8);
      __m256d a3 = _mm256_loadu_pd(b + o + 12);
      for (size_t k = 0; k < in; ++k) {
        const __m256d xk = _mm256_set1_pd(xi[k]);
        const double* wk = w + k * out + o;
        a0 = _mm256_fmadd_pd(xk, _mm256_loadu_pd(wk), a0);
        a1 = _mm256_fmadd_pd(xk, _mm256_loadu_pd(wk + 4), a1);
        a2 = _mm256_fmadd_pd(xk, _mm256_loadu_pd(wk + 8), a2);
        a3 = _mm256_fmadd_pd(xk, _mm256_loadu_pd(wk + 12), a3);
      }
      _mm256_storeu_pd(yi + o, a0);
      _mm256_storeu_pd(yi + o + 4, a1);
      _mm256_storeu_pd(yi + o + 8, a2);
      _mm256_storeu_pd(yi + o + 12, a3);
    }
    for (; o + 4 <= out; o += 4) {
      __m256d a0 = _mm256_loadu_pd(b + o);
      for (size_t k = 0; k < in; ++k)
        a0 = _mm256_fmadd_pd(_mm256_set1_pd(xi[k]), _mm256_loadu_pd(w + k * out + o), a0);
      _mm256_storeu_pd(yi + o, a0);
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
      const __m256d xk = _mm256_set1_pd(xi[k]);
      double* dwk = dw + k * out;
      size_t o = 0;
      for (; o + 8 <= out; o += 8) {
        _mm256_storeu_pd(dwk + o, _mm256_fmadd_pd(xk, _mm256_loadu_pd(dyi + o),
                                                  _mm256_loadu_pd(dwk + o)));
        _mm256_storeu_pd(dwk + o + 4, _mm256_fmadd_pd(xk, _mm256_loadu_pd(dyi + o + 4),
                                                      _mm256_loadu_pd(dwk + o + 4)));
      }
      for (; o + 4 <= out; o += 4)
        _mm256_storeu_pd(dwk + o, _mm256_fmadd_pd(xk, _mm256_loadu_pd(dyi + o),
                                                  _mm256_loadu_pd(dwk + o)));
      for (; o < out; ++o) dwk[o] += xi[k] * dyi[o];
    }
  }
}

void linear_grad_input(const double* dy, const double* w, size_t batch,
                       size_t in, size_t out, double* dx) {
  if (out == 1) {
    for (size_t i = 0; i < batch; ++i) {
      const __m256d s = _mm256_set1_pd(dy[i]);
      double* dxi = dx + i * in;
      size_t k = 0;
      for (; k + 4 <= in; k += 4)
        _mm256_storeu_pd(dxi + k, _mm256_mul_pd(s, _mm256_loadu_pd(w + k)));
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
  const __m256d vb1 = _mm256_set1_pd(b1);
  const __m256d vb1c = _mm256_set1_pd(1.0 - b1);
  const __m256d vb2 = _mm256_set1_pd(b2);
  const __m256d vb2c = _mm256_set1_pd(1.0 - b2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vmc = _mm256_set1_pd(mc);
  const __m256d vvc = _mm256_set1_pd(vc);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gi = _mm256_loadu_pd(g + i);
    __m256d mi = _mm256_fmadd_pd(vb1c, gi, _mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)));
    __m256d vi = _mm256_fmadd_pd(vb2c, _mm256_mul_pd(gi, gi),
                                 _mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d mhat = _mm256_mul_pd(mi, vmc);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vi, vvc)), veps);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    p[i] -= lr * (m[i] * mc) / (std::sqrt(v[i] * vc) + eps);
  }
}

}  // namespace avx2

bool avx2_cpu_supported() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Ops& avx2_ops() {
  static const Ops table = {
      avx2::dot,          avx2::sum,
      avx2::sumsq,        avx2::axpy,
      avx2::scale,        avx2::mul,
      avx2::relu,         avx2::relu_backward,
      avx2::linear_forward, avx2::linear_grad_weights,
      avx2::linear_grad_input, avx2::adam_update,
  };
  return table;
}

}  // namespace ssfair::kernels
