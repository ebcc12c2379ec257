#include "ssfair/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "ssfair/errors.hpp"
#include "ssfair/kernels.hpp"
#include "ssfair/rng.hpp"

namespace ssfair {

namespace {

constexpr char kMagic[8] = {'S', 'S', 'F', 'M', 'D', 'L', '1', '\n'};

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void ParamGrads::resize_like(const ModelParams& p) {
  w1.resize(p.w1.size());
  b1.resize(p.b1.size());
  w2.resize(p.w2.size());
}

void ParamGrads::zero() {
  std::fill(w1.begin(), w1.end(), 0.0);
  std::fill(b1.begin(), b1.end(), 0.0);
  std::fill(w2.begin(), w2.end(), 0.0);
  b2 = 0.0;
}

void ParamGrads::add(const ParamGrads& other) {
  const auto& k = kernels::ops();
  k.axpy(1.0, other.w1.data(), w1.data(), w1.size());
  k.axpy(1.0, other.b1.data(), b1.data(), b1.size());
  k.axpy(1.0, other.w2.data(), w2.data(), w2.size());
  b2 += other.b2;
}

ModelParams init(size_t in_dim, size_t hidden_dim, uint64_t seed) {
  ModelParams p;
  p.in_dim = in_dim;
  p.hidden_dim = hidden_dim;
  p.w1.resize(in_dim * hidden_dim);
  p.b1.assign(hidden_dim, 0.0);
  p.w2.resize(hidden_dim);

  Rng rng(seed);
  const double bound1 = std::sqrt(6.0 / static_cast<double>(in_dim + hidden_dim));
  for (double& w : p.w1) w = rng.next_uniform(-bound1, bound1);
  const double bound2 = std::sqrt(6.0 / static_cast<double>(hidden_dim + 1));
  for (double& w : p.w2) w = rng.next_uniform(-bound2, bound2);
  return p;
}

void forward(const ModelParams& p, const double* x, size_t batch, Mode mode,
             uint64_t dropout_seed, ForwardCache& cache) {
  const auto& k = kernels::ops();
  const size_t h = p.hidden_dim;

  cache.batch = batch;
  cache.x.assign(x, x + batch * p.in_dim);
  cache.pre.resize(batch * h);
  cache.hidden.resize(batch * h);
  cache.yhat.resize(batch);

  k.linear_forward(cache.x.data(), batch, p.in_dim, h, p.w1.data(), p.b1.data(),
                   cache.pre.data());
  std::memcpy(cache.hidden.data(), cache.pre.data(), batch * h * sizeof(double));
  k.relu(cache.hidden.data(), batch * h);

  if (mode == Mode::Train) {
    cache.mask.resize(batch * h);
    Rng rng(dropout_seed);
    const double keep_scale = 1.0 / (1.0 - kDropoutRate);
    for (double& m : cache.mask)
      m = (rng.next_unit() < kDropoutRate) ? 0.0 : keep_scale;
    k.mul(cache.hidden.data(), cache.mask.data(), batch * h);
  } else {
    cache.mask.clear();
  }

  std::vector<double> z2(batch);
  k.linear_forward(cache.hidden.data(), batch, h, 1, p.w2.data(), &p.b2, z2.data());
  for (size_t i = 0; i < batch; ++i) cache.yhat[i] = sigmoid(z2[i]);
}

ForwardCache forward(const ModelParams& p, const double* x, size_t batch,
                     Mode mode, uint64_t dropout_seed) {
  ForwardCache cache;
  forward(p, x, batch, mode, dropout_seed, cache);
  return cache;
}

void backward(const ModelParams& p, const ForwardCache& cache,
              const std::vector<double>& dl_dyhat, ParamGrads& out) {
  if (dl_dyhat.size() != cache.batch)
    throw InternalError("backward: gradient length " + std::to_string(dl_dyhat.size()) +
                        " does not match batch " + std::to_string(cache.batch));

  const auto& k = kernels::ops();
  const size_t batch = cache.batch;
  const size_t h = p.hidden_dim;
  out.resize_like(p);

  std::vector<double> dz2(batch);
  for (size_t i = 0; i < batch; ++i) {
    const double yh = cache.yhat[i];
    dz2[i] = dl_dyhat[i] * yh * (1.0 - yh);
  }

  k.linear_grad_weights(cache.hidden.data(), dz2.data(), batch, h, 1,
                        out.w2.data(), &out.b2);

  std::vector<double> dh(batch * h);
  k.linear_grad_input(dz2.data(), p.w2.data(), batch, h, 1, dh.data());
  if (!cache.mask.empty()) k.mul(dh.data(), cache.mask.data(), batch * h);
  k.relu_backward(dh.data(), cache.pre.data(), batch * h);

  k.linear_grad_weights(cache.x.data(), dh.data(), batch, p.in_dim, h,
                        out.w1.data(), out.b1.data());
}

ParamGrads backward(const ModelParams& p, const ForwardCache& cache,
                    const std::vector<double>& dl_dyhat) {
  ParamGrads g;
  backward(p, cache, dl_dyhat, g);
  return g;
}

void save_params(const ModelParams& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());

  out.write(kMagic, sizeof(kMagic));
  const uint64_t dims[2] = {p.in_dim, p.hidden_dim};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(p.w1.data()),
            static_cast<std::streamsize>(p.w1.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(p.b1.data()),
            static_cast<std::streamsize>(p.b1.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(p.w2.data()),
            static_cast<std::streamsize>(p.w2.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(&p.b2), sizeof(double));
  if (!out) throw DataError("write failed for " + path.string());
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError(path.string() + " is not a model checkpoint");

  uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in) throw DataError(path.string() + ": truncated header");

  ModelParams p;
  p.in_dim = dims[0];
  p.hidden_dim = dims[1];
  p.w1.resize(p.in_dim * p.hidden_dim);
  p.b1.resize(p.hidden_dim);
  p.w2.resize(p.hidden_dim);
  in.read(reinterpret_cast<char*>(p.w1.data()),
          static_cast<std::streamsize>(p.w1.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(p.b1.data()),
          static_cast<std::streamsize>(p.b1.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(p.w2.data()),
          static_cast<std::streamsize>(p.w2.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(&p.b2), sizeof(double));
  if (!in) throw DataError(path.string() + ": truncated parameter data");
  return p;
}

}  // namespace ssfair
