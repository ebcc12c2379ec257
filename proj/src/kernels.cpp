#include "ssfair/kernels.hpp"

#include <cstdlib>
#include <string>

#include "ssfair/errors.hpp"

namespace ssfair::kernels {

const Ops& scalar_ops();
#if SSFAIR_HAVE_AVX2
const Ops& avx2_ops();
bool avx2_cpu_supported();
#endif
#if SSFAIR_HAVE_NEON
const Ops& neon_ops();
#endif

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if SSFAIR_HAVE_AVX2
      return avx2_cpu_supported();
#else
      return false;
#endif
    case Backend::Neon:
#if SSFAIR_HAVE_NEON
      return true;
#else
      return false;
#endif
  }
  return false;
}

namespace {

Backend parse_backend(const std::string& v) {
  if (v == "scalar") return Backend::Scalar;
  if (v == "avx2") return Backend::Avx2;
  if (v == "neon") return Backend::Neon;
  throw ConfigError("unknown SSFAIR_KERNELS value: '" + v + "' (expected scalar, avx2, neon, or auto)");
}

Backend resolve_default() {
  if (const char* env = std::getenv("SSFAIR_KERNELS")) {
    std::string v(env);
    if (!v.empty() && v != "auto") {
      Backend b = parse_backend(v);
      if (!backend_supported(b))
        throw ConfigError(std::string("SSFAIR_KERNELS requests '") + backend_name(b) +
                          "' but this build/CPU does not support it");
      return b;
    }
  }
#if SSFAIR_HAVE_AVX2
  if (avx2_cpu_supported()) return Backend::Avx2;
#endif
#if SSFAIR_HAVE_NEON
  return Backend::Neon;
#endif
  return Backend::Scalar;
}

Backend& current() {
  static Backend b = resolve_default();
  return b;
}

}  // namespace

Backend active_backend() { return current(); }

void force_backend(Backend b) {
  if (!backend_supported(b))
    throw ConfigError(std::string("kernel backend '") + backend_name(b) +
                      "' is not supported by this build/CPU");
  current() = b;
}

const Ops& ops_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return scalar_ops();
    case Backend::Avx2:
#if SSFAIR_HAVE_AVX2
      return avx2_ops();
#else
      break;
#endif
    case Backend::Neon:
#if SSFAIR_HAVE_NEON
      return neon_ops();
#else
      break;
#endif
  }
  throw ConfigError(std::string("kernel backend '") + backend_name(b) + "' not compiled in");
}

const Ops& ops() { return ops_for(current()); }

}  // namespace ssfair::kernels
