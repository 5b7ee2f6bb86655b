#include "liftplan/kernels.hpp"

// AVX2 variants. Plain mul+add (no FMA) so each lane performs the exact IEEE
// operations of the scalar reference; the reduction tree is
// (a0+a2)+(a1+a3), the same combine the scalar kernel uses.

#if defined(LIFTPLAN_HAVE_AVX2)

#include <immintrin.h>

namespace liftplan::kern {
namespace {

inline double hadd_tree(__m256d acc) {
  const __m128d lo = _mm256_castpd256_pd128(acc);   // (a0, a1)
  const __m128d hi = _mm256_extractf128_pd(acc, 1);  // (a2, a3)
  const __m128d s = _mm_add_pd(lo, hi);              // (a0+a2, a1+a3)
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t(3);
  for (; i < n4; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vy));
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return hadd_tree(acc) + tail;
}

double sumsq_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t(3);
  for (; i < n4; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t(3);
  for (; i < n4; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void matvec_avx2(const double* m, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot_avx2(m + i * cols, x, cols);
}

void matvec_t_avx2(const double* m, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) axpy_avx2(x[i], m + i * cols, y, cols);
}

}  // namespace

const Kernels* avx2_kernels() {
#if defined(__GNUC__)
  if (!__builtin_cpu_supports("avx2")) return nullptr;
#endif
  static const Kernels k = {
      "avx2",     dot_avx2,   sumsq_avx2,  axpy_avx2,
      scale_avx2, matvec_avx2, matvec_t_avx2,
  };
  return &k;
}

}  // namespace liftplan::kern

#else  // !LIFTPLAN_HAVE_AVX2

namespace liftplan::kern {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace liftplan::kern

#endif
