#include "ftreg/kernels.hpp"

// Compiled with -mavx2 -mfma (see src/CMakeLists.txt); entered only after the
// dispatcher has confirmed the CPU supports both.

#if defined(__x86_64__) || defined(_M_X64)

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace ftreg::kernels::avx2 {

bool compiled_in() { return true; }

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  __m256d acc = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d sum2 = _mm_add_pd(lo, hi);
  double out = _mm_cvtsd_f64(_mm_add_sd(sum2, _mm_unpackhi_pd(sum2, sum2)));
  for (; i < n; ++i) out += a[i] * b[i];
  return out;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

}  // namespace ftreg::kernels::avx2

#else  // translation unit built without AVX2 flags

namespace ftreg::kernels::avx2 {
bool compiled_in() { return false; }
double dot(const double* a, const double* b, std::size_t n) { return ref::dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { ref::axpy(alpha, x, y, n); }
void scale(double alpha, double* x, std::size_t n) { ref::scale(alpha, x, n); }
}  // namespace ftreg::kernels::avx2

#endif
#endif  // x86-64
