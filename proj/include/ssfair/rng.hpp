#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ssfair {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent seed streams: every stochastic choice draws from a seed derived
// from (base seed, purpose tag, indices). Same inputs give the same stream.
inline uint64_t derive_seed(uint64_t base, std::string_view tag) {
  return splitmix64(base ^ fnv1a64(tag));
}

inline uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t i0) {
  return splitmix64(derive_seed(base, tag) ^ splitmix64(i0 ^ 0xd1b54a32d192ed03ULL));
}

inline uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t i0, uint64_t i1) {
  return splitmix64(derive_seed(base, tag, i0) ^ splitmix64(i1 ^ 0x8cb92ba72f3d8dd7ULL));
}

// mt19937_64 with explicit output mapping. The engine's output sequence is
// fixed by the standard; <random> distributions are not, so they are avoided.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1)
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // uniform integer in [0, n), n > 0
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

// Fisher-Yates. std::shuffle's draw sequence is implementation-defined; this
// one is reproducible everywhere.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

// First k elements of a seeded permutation of 0..n-1, in draw order.
inline std::vector<size_t> sample_without_replacement(size_t n, size_t k, Rng& rng) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  for (size_t i = 0; i < k && i + 1 < n; ++i) {
    size_t j = i + static_cast<size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace ssfair
