#pragma once

#include <cstddef>

namespace ssfair::kernels {

// Dense-arithmetic inner loops used by the model and optimizer. A scalar
// reference implementation always exists; SIMD variants (AVX2 on x86-64,
// NEON on aarch64) are selected at runtime from CPU features and are
// equivalence-tested against the scalar kernels.
enum class Backend { Scalar, Avx2, Neon };

const char* backend_name(Backend b);
bool backend_supported(Backend b);

// Backend in use. Resolved once: SSFAIR_KERNELS=scalar|avx2|neon|auto wins,
// otherwise the widest supported SIMD variant.
Backend active_backend();

// Testing hook. Throws ConfigError if the backend is not supported here.
void force_backend(Backend b);

struct Ops {
  double (*dot)(const double* a, const double* b, size_t n);
  double (*sum)(const double* x, size_t n);
  double (*sumsq)(const double* x, size_t n);
  void (*axpy)(double a, const double* x, double* y, size_t n);  // y += a*x
  void (*scale)(double* x, double a, size_t n);
  void (*mul)(double* y, const double* x, size_t n);  // y *= x elementwise
  void (*relu)(double* x, size_t n);
  // g[i] = pre[i] > 0 ? g[i] : 0
  void (*relu_backward)(double* g, const double* pre, size_t n);
  // Dense layer, weights input-major: w[k*out + o].
  // y[i*out + o] = b[o] + sum_k x[i*in + k] * w[k*out + o]
  void (*linear_forward)(const double* x, size_t batch, size_t in, size_t out,
                         const double* w, const double* b, double* y);
  // dw[k*out + o] = sum_i x[i*in + k] * dy[i*out + o];  db[o] = sum_i dy[i*out + o]
  void (*linear_grad_weights)(const double* x, const double* dy, size_t batch,
                              size_t in, size_t out, double* dw, double* db);
  // dx[i*in + k] = sum_o dy[i*out + o] * w[k*out + o]
  void (*linear_grad_input)(const double* dy, const double* w, size_t batch,
                            size_t in, size_t out, double* dx);
  // m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g*g;
  // p -= lr * (m*mc) / (sqrt(v*vc) + eps)   with mc, vc the bias corrections
  void (*adam_update)(double* p, const double* g, double* m, double* v, size_t n,
                      double lr, double b1, double b2, double eps, double mc, double vc);
};

// Table for the active backend.
const Ops& ops();

// Table for a specific backend; throws ConfigError if unsupported.
const Ops& ops_for(Backend b);

}  // namespace ssfair::kernels
