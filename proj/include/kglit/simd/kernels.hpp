#pragma once

#include <cstddef>
#include <string>

namespace kglit::simd {

enum class Backend { scalar, avx2 };

/// Double-precision vector kernels. Every entry has a scalar reference
/// implementation and, on x86-64 with AVX2+FMA, a vectorized variant.
/// The active table is chosen once at startup (KGLIT_SIMD=scalar|avx2
/// overrides detection). All kernels are pure element/reduction ops:
/// a given output element is always computed from the same operands in
/// the same order, so results are reproducible run-to-run.
struct Kernels {
  // sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a*x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // z[i] = x[i]*y[i]
  void (*mul)(const double* x, const double* y, double* z, std::size_t n);
  // z[i] += x[i]*y[i]
  void (*mul_add)(const double* x, const double* y, double* z, std::size_t n);
  // x[i] *= a
  void (*scale)(double a, double* x, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  void (*exp)(const double* x, double* y, std::size_t n);
  void (*log)(const double* x, double* y, std::size_t n);
  void (*tanh)(const double* x, double* y, std::size_t n);
  void (*sigmoid)(const double* x, double* y, std::size_t n);
  // C (MxN, row stride ldc) = A (MxK, stride lda) * B^T (B is NxK, stride ldb)
  void (*gemm_nt)(const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                  std::size_t n, std::size_t k);
  // Adam: m = b1*m+(1-b1)*g; v = b2*v+(1-b2)*g^2;
  //       p -= lr * (m/bc1) / (sqrt(v/bc2)+eps)
  void (*adam_update)(double* p, double* m, double* v, const double* g,
                      std::size_t n, double lr, double beta1, double beta2,
                      double eps, double bc1, double bc2);
};

const Kernels& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const Kernels& avx2_kernels();
#endif

bool backend_available(Backend b);
Backend active_backend();
const Kernels& active();
std::string backend_name(Backend b);

/// Test hook: swap the dispatch table. Not thread safe; call before any
/// worker threads exist.
void force_backend(Backend b);

inline const Kernels& k() { return active(); }

}  // namespace kglit::simd
