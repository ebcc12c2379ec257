#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "ssfair/errors.hpp"
#include "ssfair/kernels.hpp"
#include "ssfair/rng.hpp"

using namespace ssfair;
using kernels::Backend;
using kernels::Ops;

namespace {

std::vector<double> random_vec(Rng& rng, size_t n, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.next_uniform(lo, hi);
  return v;
}

// |a-b| within rounding slack; SIMD reassociates sums so bit equality is out.
bool close(double a, double b, double tol = 1e-12) {
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

bool all_close(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-12) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!close(a[i], b[i], tol)) return false;
  return true;
}

const size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 32, 33, 63, 64, 100, 129, 1000};

struct Shape {
  size_t batch, in, out;
};
const Shape kShapes[] = {{1, 1, 1},  {3, 5, 1},   {4, 8, 16},   {5, 7, 9},
                         {2, 3, 20}, {7, 33, 17}, {10, 112, 32}, {6, 32, 1},
                         {1, 112, 32}, {13, 19, 4}};

void compare_backends(const Ops& ref, const Ops& alt) {
  Rng rng(1234);
  for (size_t n : kSizes) {
    auto a = random_vec(rng, n);
    auto b = random_vec(rng, n);
    CHECK(close(ref.dot(a.data(), b.data(), n), alt.dot(a.data(), b.data(), n)));
    CHECK(close(ref.sum(a.data(), n), alt.sum(a.data(), n)));
    CHECK(close(ref.sumsq(a.data(), n), alt.sumsq(a.data(), n)));

    auto y1 = b, y2 = b;
    ref.axpy(0.37, a.data(), y1.data(), n);
    alt.axpy(0.37, a.data(), y2.data(), n);
    CHECK(all_close(y1, y2));

    auto s1 = a, s2 = a;
    ref.scale(s1.data(), -1.7, n);
    alt.scale(s2.data(), -1.7, n);
    CHECK(all_close(s1, s2));

    auto m1 = b, m2 = b;
    ref.mul(m1.data(), a.data(), n);
    alt.mul(m2.data(), a.data(), n);
    CHECK(all_close(m1, m2));

    auto r1 = a, r2 = a;
    ref.relu(r1.data(), n);
    alt.relu(r2.data(), n);
    CHECK(all_close(r1, r2));

    auto g1 = b, g2 = b;
    ref.relu_backward(g1.data(), a.data(), n);
    alt.relu_backward(g2.data(), a.data(), n);
    CHECK(all_close(g1, g2));
  }

  for (const Shape& sh : kShapes) {
    auto x = random_vec(rng, sh.batch * sh.in);
    auto w = random_vec(rng, sh.in * sh.out);
    auto bias = random_vec(rng, sh.out);
    std::vector<double> f1(sh.batch * sh.out), f2(sh.batch * sh.out);
    ref.linear_forward(x.data(), sh.batch, sh.in, sh.out, w.data(), bias.data(), f1.data());
    alt.linear_forward(x.data(), sh.batch, sh.in, sh.out, w.data(), bias.data(), f2.data());
    CHECK(all_close(f1, f2));

    auto dy = random_vec(rng, sh.batch * sh.out);
    std::vector<double> dw1(sh.in * sh.out), dw2(sh.in * sh.out), db1(sh.out), db2(sh.out);
    ref.linear_grad_weights(x.data(), dy.data(), sh.batch, sh.in, sh.out, dw1.data(), db1.data());
    alt.linear_grad_weights(x.data(), dy.data(), sh.batch, sh.in, sh.out, dw2.data(), db2.data());
    CHECK(all_close(dw1, dw2));
    CHECK(all_close(db1, db2));

    std::vector<double> dx1(sh.batch * sh.in), dx2(sh.batch * sh.in);
    ref.linear_grad_input(dy.data(), w.data(), sh.batch, sh.in, sh.out, dx1.data());
    alt.linear_grad_input(dy.data(), w.data(), sh.batch, sh.in, sh.out, dx2.data());
    CHECK(all_close(dx1, dx2));
  }

  for (size_t n : {1ul, 7ul, 32ul, 33ul, 100ul}) {
    auto g = random_vec(rng, n);
    auto p1 = random_vec(rng, n);
    auto p2 = p1;
    auto m1 = random_vec(rng, n, 0.0, 0.1), m2 = m1;
    auto v1 = random_vec(rng, n, 0.0, 0.1), v2 = v1;
    double mc = 1.0 / (1.0 - std::pow(0.9, 5));
    double vc = 1.0 / (1.0 - std::pow(0.999, 5));
    ref.adam_update(p1.data(), g.data(), m1.data(), v1.data(), n, 1e-3, 0.9, 0.999, 1e-8, mc, vc);
    alt.adam_update(p2.data(), g.data(), m2.data(), v2.data(), n, 1e-3, 0.9, 0.999, 1e-8, mc, vc);
    CHECK(all_close(p1, p2));
    CHECK(all_close(m1, m2));
    CHECK(all_close(v1, v2));
  }
}

}  // namespace

TEST_CASE("scalar backend is always supported") {
  CHECK(kernels::backend_supported(Backend::Scalar));
  CHECK(std::string(kernels::backend_name(Backend::Scalar)) == "scalar");
  CHECK(std::string(kernels::backend_name(Backend::Avx2)) == "avx2");
  CHECK(std::string(kernels::backend_name(Backend::Neon)) == "neon");
}

TEST_CASE("ops_for rejects unsupported backends") {
  for (Backend b : {Backend::Avx2, Backend::Neon}) {
    if (!kernels::backend_supported(b)) {
      CHECK_THROWS_AS((void)kernels::ops_for(b), ConfigError);
      CHECK_THROWS_AS(kernels::force_backend(b), ConfigError);
    }
  }
}

TEST_CASE("force_backend switches the active table") {
  Backend original = kernels::active_backend();
  kernels::force_backend(Backend::Scalar);
  CHECK(kernels::active_backend() == Backend::Scalar);
  CHECK(kernels::ops().dot == kernels::ops_for(Backend::Scalar).dot);
  kernels::force_backend(original);
  CHECK(kernels::active_backend() == original);
}

TEST_CASE("scalar kernels match a plain double loop") {
  const Ops& ref = kernels::ops_for(Backend::Scalar);
  Rng rng(99);
  auto x = random_vec(rng, 37);
  auto w = random_vec(rng, 37 * 5);
  auto b = random_vec(rng, 5);
  std::vector<double> got(5);
  ref.linear_forward(x.data(), 1, 37, 5, w.data(), b.data(), got.data());
  for (size_t o = 0; o < 5; ++o) {
    double want = b[o];
    for (size_t k = 0; k < 37; ++k) want += x[k] * w[k * 5 + o];
    CHECK(close(got[o], want));
  }
}

TEST_CASE("simd backends agree with the scalar reference") {
  const Ops& ref = kernels::ops_for(Backend::Scalar);
  bool any = false;
  for (Backend b : {Backend::Avx2, Backend::Neon}) {
    if (!kernels::backend_supported(b)) continue;
    any = true;
    compare_backends(ref, kernels::ops_for(b));
  }
  if (!any) MESSAGE("no SIMD backend available on this host; scalar-only run");
}

TEST_CASE("kernels are deterministic run to run") {
  const Ops& o = kernels::ops();
  Rng rng(5);
  auto a = random_vec(rng, 513);
  auto b = random_vec(rng, 513);
  double d1 = o.dot(a.data(), b.data(), 513);
  double d2 = o.dot(a.data(), b.data(), 513);
  CHECK(d1 == d2);
}
