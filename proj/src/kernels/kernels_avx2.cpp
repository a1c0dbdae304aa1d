// SPDX-License-Identifier: Apache-2.0
//
// Complex doubles are stored interleaved (re, im), so one __m256d holds two
// complex values. Compiled with -mavx2 -mfma; only reached through dispatch
// after a CPU feature check.
#include "ogsbi/kernels.hpp"

#include <immintrin.h>

namespace ogsbi::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// Lanes hold (ar*bi, ai*br, ...); the imaginary part of conj(a)*b is the
// alternating sum.
inline double halt(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_sub_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

inline cd conj_dot(const double* a, const double* b, std::size_t rows) {
  __m256d re0 = _mm256_setzero_pd();
  __m256d im0 = _mm256_setzero_pd();
  __m256d re1 = _mm256_setzero_pd();
  __m256d im1 = _mm256_setzero_pd();
  std::size_t m = 0;
  for (; m + 4 <= rows; m += 4) {
    const __m256d a0 = _mm256_loadu_pd(a + 2 * m);
    const __m256d b0 = _mm256_loadu_pd(b + 2 * m);
    const __m256d a1 = _mm256_loadu_pd(a + 2 * m + 4);
    const __m256d b1 = _mm256_loadu_pd(b + 2 * m + 4);
    re0 = _mm256_fmadd_pd(a0, b0, re0);
    im0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0b0101), im0);
    re1 = _mm256_fmadd_pd(a1, b1, re1);
    im1 = _mm256_fmadd_pd(a1, _mm256_permute_pd(b1, 0b0101), im1);
  }
  for (; m + 2 <= rows; m += 2) {
    const __m256d a0 = _mm256_loadu_pd(a + 2 * m);
    const __m256d b0 = _mm256_loadu_pd(b + 2 * m);
    re0 = _mm256_fmadd_pd(a0, b0, re0);
    im0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(b0, 0b0101), im0);
  }
  double re = hsum(_mm256_add_pd(re0, re1));
  double im = halt(_mm256_add_pd(im0, im1));
  if (m < rows) {
    const double ar = a[2 * m], ai = a[2 * m + 1];
    const double br = b[2 * m], bi = b[2 * m + 1];
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

}  // namespace

void conj_gram(const cd* w, std::size_t rows, std::size_t cols, cd* out) {
  const auto* base = reinterpret_cast<const double*>(w);
  for (std::size_t i = 0; i < cols; ++i) {
    const double* wi = base + 2 * i * rows;
    out[i + i * cols] = cd(conj_dot(wi, wi, rows).real(), 0.0);
    for (std::size_t j = i + 1; j < cols; ++j) {
      const cd g = conj_dot(wi, base + 2 * j * rows, rows);
      out[i + j * cols] = g;
      out[j + i * cols] = std::conj(g);
    }
  }
}

void column_norms2(const cd* w, std::size_t rows, std::size_t cols, double* out) {
  const auto* base = reinterpret_cast<const double*>(w);
  for (std::size_t j = 0; j < cols; ++j) {
    const double* col = base + 2 * j * rows;
    __m256d acc = _mm256_setzero_pd();
    std::size_t m = 0;
    for (; m + 2 <= rows; m += 2) {
      const __m256d x = _mm256_loadu_pd(col + 2 * m);
      acc = _mm256_fmadd_pd(x, x, acc);
    }
    double s = hsum(acc);
    if (m < rows) s += col[2 * m] * col[2 * m] + col[2 * m + 1] * col[2 * m + 1];
    out[j] = s;
  }
}

void accumulate_abs2(const cd* x, std::size_t n, double* acc) {
  const auto* p = reinterpret_cast<const double*>(x);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(p + 2 * i);
    const __m256d x1 = _mm256_loadu_pd(p + 2 * i + 4);
    // hadd of the squares pairs (re^2 + im^2) per complex entry, lanes end up
    // ordered (0, 2, 1, 3) and are fixed with a cross-lane permute.
    const __m256d s = _mm256_hadd_pd(_mm256_mul_pd(x0, x0), _mm256_mul_pd(x1, x1));
    const __m256d ordered = _mm256_permute4x64_pd(s, 0b11011000);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), ordered));
  }
  for (; i < n; ++i) acc[i] += p[2 * i] * p[2 * i] + p[2 * i + 1] * p[2 * i + 1];
}

}  // namespace ogsbi::kernels::avx2
