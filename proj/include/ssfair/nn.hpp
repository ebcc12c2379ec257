#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ssfair {

// Two-layer perceptron: ReLU hidden layer, sigmoid output scalar.
// w1 is stored input-major (w1[k * hidden_dim + h]) so the forward pass
// walks it contiguously.
struct ModelParams {
  size_t in_dim = 0;
  size_t hidden_dim = 0;
  std::vector<double> w1;  // in_dim * hidden_dim
  std::vector<double> b1;  // hidden_dim
  std::vector<double> w2;  // hidden_dim
  double b2 = 0.0;

  size_t n_params() const { return w1.size() + b1.size() + w2.size() + 1; }
};

struct ParamGrads {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  void resize_like(const ModelParams& p);
  void zero();
  void add(const ParamGrads& other);
};

enum class Mode { Train, Eval };

inline constexpr double kDropoutRate = 0.2;

struct ForwardCache {
  size_t batch = 0;
  std::vector<double> x;        // batch * in_dim
  std::vector<double> pre;      // batch * hidden_dim, pre-activation
  std::vector<double> hidden;   // batch * hidden_dim, after ReLU (and mask)
  std::vector<double> mask;     // inverted-dropout multipliers; empty in eval
  std::vector<double> yhat;     // batch, sigmoid outputs
};

// Glorot-uniform weights (bound sqrt(6/(fan_in+fan_out)) per layer), zero
// biases. Deterministic per seed.
ModelParams init(size_t in_dim, size_t hidden_dim, uint64_t seed);

// Train mode draws an inverted-dropout mask (kept units scaled by 1/0.8)
// from dropout_seed; eval mode applies no mask. cache storage is reused.
void forward(const ModelParams& p, const double* x, size_t batch, Mode mode,
             uint64_t dropout_seed, ForwardCache& cache);
ForwardCache forward(const ModelParams& p, const double* x, size_t batch,
                     Mode mode, uint64_t dropout_seed = 0);

// Gradients of sum_i dl_dyhat[i] * yhat[i] through the network, reusing the
// dropout mask stored in the cache. Chain through the sigmoid is yhat(1-yhat).
void backward(const ModelParams& p, const ForwardCache& cache,
              const std::vector<double>& dl_dyhat, ParamGrads& out);
ParamGrads backward(const ModelParams& p, const ForwardCache& cache,
                    const std::vector<double>& dl_dyhat);

// Flat binary checkpoint: magic, dims, then w1/b1/w2/b2 as little-endian
// doubles. Byte-stable for identical params.
void save_params(const ModelParams& p, const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace ssfair
