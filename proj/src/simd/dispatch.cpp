#include <cstdlib>
#include <string>

#include "kglit/simd/kernels.hpp"

namespace kglit::simd {
namespace {

Backend detect() {
  if (const char* env = std::getenv("KGLIT_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && backend_available(Backend::avx2)) return Backend::avx2;
  }
  return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

Backend g_backend = detect();

}  // namespace

bool backend_available(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() { return g_backend; }

const Kernels& active() {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_backend == Backend::avx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

std::string backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
  g_backend = backend_available(b) ? b : Backend::scalar;
}

}  // namespace kglit::simd
