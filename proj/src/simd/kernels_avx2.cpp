#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "kglit/simd/kernels.hpp"

// AVX2+FMA kernels. This TU is compiled with -mavx2 -mfma; callers must only
// reach it through the dispatch table after the CPU check.

namespace kglit::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void mul_avx2(const double* x, const double* y, double* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) z[i] = x[i] * y[i];
}

void mul_add_avx2(const double* x, const double* y, double* z, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vz = _mm256_loadu_pd(z + i);
    vz = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), vz);
    _mm256_storeu_pd(z + i, vz);
  }
  for (; i < n; ++i) z[i] += x[i] * y[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

// exp via the Cephes rational approximation: x = g + n*ln2 with |g| <= ln2/2,
// e^g = 1 + 2*g*P(g^2) / (Q(g^2) - g*P(g^2)), then scale by 2^n through the
// exponent bits. Inputs below the normal range flush to 0.
constexpr double kExpHi = 709.782712893383996843;
constexpr double kExpLo = -708.396418532264078749;

inline __m256d exp_core(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);

  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(kExpLo - 1.0)),
                             _mm256_set1_pd(kExpHi));
  __m256d nf = _mm256_floor_pd(_mm256_fmadd_pd(log2e, xc, _mm256_set1_pd(0.5)));
  __m256d g = _mm256_fnmadd_pd(nf, c1, xc);
  g = _mm256_fnmadd_pd(nf, c2, g);
  __m256d z = _mm256_mul_pd(g, g);

  __m256d p = _mm256_fmadd_pd(p0, z, p1);
  p = _mm256_fmadd_pd(p, z, p2);
  p = _mm256_mul_pd(p, g);
  __m256d q = _mm256_fmadd_pd(q0, z, q1);
  q = _mm256_fmadd_pd(q, z, q2);
  q = _mm256_fmadd_pd(q, z, q3);
  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  // 2^n: n is within [-1075, 1025], build the exponent field directly.
  __m128i n32 = _mm256_cvtpd_epi32(nf);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(bits));

  // Edges: overflow to inf, underflow to 0, NaN passes through.
  __m256d inf = _mm256_set1_pd(HUGE_VAL);
  r = _mm256_blendv_pd(r, inf, _mm256_cmp_pd(x, _mm256_set1_pd(kExpHi), _CMP_GT_OQ));
  r = _mm256_blendv_pd(r, _mm256_setzero_pd(),
                       _mm256_cmp_pd(x, _mm256_set1_pd(kExpLo), _CMP_LT_OQ));
  r = _mm256_blendv_pd(r, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return r;
}

void exp_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, exp_core(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = std::exp(x[i]);
}

// log via log(m) = 2*atanh(s), s = (m-1)/(m+1), m in [sqrt(1/2), sqrt(2)),
// plus e*ln2 recombined in two parts. Valid for normal positive doubles;
// nonpositive inputs yield -inf/NaN like std::log.
inline __m256d log_core(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half_sqrt2 = _mm256_set1_pd(0.70710678118654752440);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  const __m256i exp_bias = _mm256_set1_epi64x(1023);
  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);

  __m256i bits = _mm256_castpd_si256(x);
  __m256i expo = _mm256_sub_epi64(_mm256_srli_epi64(bits, 52), exp_bias);
  // int64 -> double via the 2^52 bias trick (|expo| is tiny)
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(
          _mm256_and_si256(_mm256_add_epi64(expo, _mm256_set1_epi64x(1LL << 31)),
                           _mm256_set1_epi64x(0xFFFFFFFFLL)),
          _mm256_castpd_si256(two52))),
      _mm256_add_pd(two52, _mm256_set1_pd(2147483648.0)));

  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  // fold m into [sqrt(1/2), sqrt(2))
  __m256d fold = _mm256_cmp_pd(m, _mm256_set1_pd(1.41421356237309504880), _CMP_GE_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), fold);
  e = _mm256_add_pd(e, _mm256_and_pd(fold, one));
  // m below sqrt(1/2) cannot occur from the bit split (m in [1,2)), but the
  // fold above only halves; rebase small m the same way for completeness.
  __m256d low = _mm256_cmp_pd(m, half_sqrt2, _CMP_LT_OQ);
  m = _mm256_blendv_pd(m, _mm256_add_pd(m, m), low);
  e = _mm256_sub_pd(e, _mm256_and_pd(low, one));

  __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  __m256d z = _mm256_mul_pd(s, s);
  __m256d w = _mm256_set1_pd(1.0 / 17.0);
  w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 15.0));
  w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 13.0));
  w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 11.0));
  w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 9.0));
  w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 7.0));
  w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 5.0));
  w = _mm256_fmadd_pd(w, z, _mm256_set1_pd(1.0 / 3.0));
  __m256d s2 = _mm256_add_pd(s, s);
  __m256d r = _mm256_fmadd_pd(_mm256_mul_pd(s2, z), w, _mm256_mul_pd(e, ln2_lo));
  r = _mm256_add_pd(r, s2);
  r = _mm256_fmadd_pd(e, ln2_hi, r);

  // Edge cases
  __m256d zero = _mm256_setzero_pd();
  __m256d nan = _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN());
  r = _mm256_blendv_pd(r, _mm256_set1_pd(-HUGE_VAL),
                       _mm256_cmp_pd(x, zero, _CMP_EQ_OQ));
  r = _mm256_blendv_pd(r, nan, _mm256_cmp_pd(x, zero, _CMP_LT_OQ));
  r = _mm256_blendv_pd(r, x, _mm256_cmp_pd(x, _mm256_set1_pd(HUGE_VAL), _CMP_EQ_OQ));
  r = _mm256_blendv_pd(r, nan, _mm256_cmp_pd(x, x, _CMP_NEQ_UQ));
  return r;
}

void log_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, log_core(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = std::log(x[i]);
}

// tanh(x) = sign(x) * (1-t)/(1+t) with t = exp(-2|x|); near zero the
// subtraction loses precision, so |x| < 1e-4 uses the odd series.
inline __m256d tanh_core(__m256d x) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d sign = _mm256_and_pd(x, sign_mask);
  __m256d ax = _mm256_andnot_pd(sign_mask, x);

  __m256d t = exp_core(_mm256_mul_pd(ax, _mm256_set1_pd(-2.0)));
  __m256d big = _mm256_div_pd(_mm256_sub_pd(one, t), _mm256_add_pd(one, t));

  __m256d x2 = _mm256_mul_pd(ax, ax);
  __m256d small = _mm256_fnmadd_pd(_mm256_mul_pd(x2, ax), _mm256_set1_pd(1.0 / 3.0), ax);

  __m256d use_small = _mm256_cmp_pd(ax, _mm256_set1_pd(1e-4), _CMP_LT_OQ);
  __m256d r = _mm256_blendv_pd(big, small, use_small);
  return _mm256_or_pd(r, sign);
}

void tanh_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, tanh_core(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = std::tanh(x[i]);
}

inline __m256d sigmoid_core(__m256d x) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d ax = _mm256_andnot_pd(sign_mask, x);
  __m256d t = exp_core(_mm256_sub_pd(_mm256_setzero_pd(), ax));
  __m256d denom = _mm256_add_pd(one, t);
  __m256d pos = _mm256_div_pd(one, denom);
  __m256d neg = _mm256_div_pd(t, denom);
  __m256d is_neg = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LT_OQ);
  return _mm256_blendv_pd(pos, neg, is_neg);
}

void sigmoid_avx2(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, sigmoid_core(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) {
    const double v = x[i];
    if (v >= 0.0) {
      y[i] = 1.0 / (1.0 + std::exp(-v));
    } else {
      const double t = std::exp(v);
      y[i] = t / (1.0 + t);
    }
  }
}

// C = A * B^T with A-row blocks kept hot in L2 and 4 B rows per inner pass.
void gemm_nt_avx2(const double* a, std::size_t lda, const double* b,
                  std::size_t ldb, double* c, std::size_t ldc, std::size_t m,
                  std::size_t n, std::size_t k) {
  constexpr std::size_t kRowBlock = 64;
  for (std::size_t i0 = 0; i0 < m; i0 += kRowBlock) {
    const std::size_t i1 = std::min(i0 + kRowBlock, m);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = b + j * ldb;
      const double* b1 = b0 + ldb;
      const double* b2 = b1 + ldb;
      const double* b3 = b2 + ldb;
      for (std::size_t i = i0; i < i1; ++i) {
        const double* ai = a + i * lda;
        __m256d s0 = _mm256_setzero_pd();
        __m256d s1 = _mm256_setzero_pd();
        __m256d s2 = _mm256_setzero_pd();
        __m256d s3 = _mm256_setzero_pd();
        std::size_t kk = 0;
        for (; kk + 4 <= k; kk += 4) {
          __m256d av = _mm256_loadu_pd(ai + kk);
          s0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b0 + kk), s0);
          s1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b1 + kk), s1);
          s2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b2 + kk), s2);
          s3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b3 + kk), s3);
        }
        double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
        for (; kk < k; ++kk) {
          const double av = ai[kk];
          r0 += av * b0[kk];
          r1 += av * b1[kk];
          r2 += av * b2[kk];
          r3 += av * b3[kk];
        }
        double* ci = c + i * ldc + j;
        ci[0] = r0;
        ci[1] = r1;
        ci[2] = r2;
        ci[3] = r3;
      }
    }
    for (; j < n; ++j) {
      for (std::size_t i = i0; i < i1; ++i) {
        c[i * ldc + j] = dot_avx2(a + i * lda, b + j * ldb, k);
      }
    }
  }
}

void adam_avx2(double* p, double* m, double* v, const double* g, std::size_t n,
               double lr, double beta1, double beta2, double eps, double bc1,
               double bc2) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vc1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d vc2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d ibc1 = _mm256_set1_pd(1.0 / bc1);
  const __m256d ibc2 = _mm256_set1_pd(1.0 / bc2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d gi = _mm256_loadu_pd(g + i);
    __m256d mi = _mm256_fmadd_pd(vb1, _mm256_loadu_pd(m + i), _mm256_mul_pd(vc1, gi));
    __m256d vi = _mm256_fmadd_pd(vb2, _mm256_loadu_pd(v + i),
                                 _mm256_mul_pd(vc2, _mm256_mul_pd(gi, gi)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    __m256d mhat = _mm256_mul_pd(mi, ibc1);
    __m256d vhat = _mm256_mul_pd(vi, ibc2);
    __m256d step =
        _mm256_div_pd(_mm256_mul_pd(vlr, mhat), _mm256_add_pd(_mm256_sqrt_pd(vhat), veps));
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    const double gi = g[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
    v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
    p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
  }
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels table = {
      dot_avx2,  axpy_avx2,    mul_avx2,  mul_add_avx2,
      scale_avx2, sum_avx2,    exp_avx2,  log_avx2,
      tanh_avx2, sigmoid_avx2, gemm_nt_avx2, adam_avx2,
  };
  return table;
}

}  // namespace kglit::simd

#endif  // x86-64
