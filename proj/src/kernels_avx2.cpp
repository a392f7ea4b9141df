// AVX2 kernel lane. Every kernel mirrors the scalar reference element-for-
// element (same operations, same order, no FMA) so the two lanes agree
// bitwise. Compiled with -mavx2 only; callers go through active().

#include "cbf/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace cbf::kernels {

namespace {

void scale_v(double* dst, const double* x, double a, int64_t nn) {
  const __m256d va = _mm256_set1_pd(a);
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t)
    _mm256_storeu_pd(dst + 4 * t, _mm256_mul_pd(va, _mm256_loadu_pd(x + 4 * t)));
  for (int64_t i = 4 * nb; i < nn; ++i) dst[i] = a * x[i];
}

void axpy_v(double* dst, const double* x, double a, int64_t nn) {
  const __m256d va = _mm256_set1_pd(a);
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t) {
    __m256d d = _mm256_loadu_pd(dst + 4 * t);
    d = _mm256_add_pd(d, _mm256_mul_pd(va, _mm256_loadu_pd(x + 4 * t)));
    _mm256_storeu_pd(dst + 4 * t, d);
  }
  for (int64_t i = 4 * nb; i < nn; ++i) dst[i] = dst[i] + a * x[i];
}

void add_v(double* dst, const double* x, const double* y, int64_t nn) {
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t)
    _mm256_storeu_pd(dst + 4 * t, _mm256_add_pd(_mm256_loadu_pd(x + 4 * t),
                                                _mm256_loadu_pd(y + 4 * t)));
  for (int64_t i = 4 * nb; i < nn; ++i) dst[i] = x[i] + y[i];
}

void sub_v(double* dst, const double* x, const double* y, int64_t nn) {
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t)
    _mm256_storeu_pd(dst + 4 * t, _mm256_sub_pd(_mm256_loadu_pd(x + 4 * t),
                                                _mm256_loadu_pd(y + 4 * t)));
  for (int64_t i = 4 * nb; i < nn; ++i) dst[i] = x[i] - y[i];
}

void mul_v(double* dst, const double* x, const double* y, int64_t nn) {
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t)
    _mm256_storeu_pd(dst + 4 * t, _mm256_mul_pd(_mm256_loadu_pd(x + 4 * t),
                                                _mm256_loadu_pd(y + 4 * t)));
  for (int64_t i = 4 * nb; i < nn; ++i) dst[i] = x[i] * y[i];
}

void mul_add_v(double* dst, const double* x, const double* y, int64_t nn) {
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t) {
    __m256d d = _mm256_loadu_pd(dst + 4 * t);
    d = _mm256_add_pd(d, _mm256_mul_pd(_mm256_loadu_pd(x + 4 * t),
                                       _mm256_loadu_pd(y + 4 * t)));
    _mm256_storeu_pd(dst + 4 * t, d);
  }
  for (int64_t i = 4 * nb; i < nn; ++i) dst[i] = dst[i] + x[i] * y[i];
}

void mul_sub_v(double* dst, const double* x, const double* y, int64_t nn) {
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t) {
    __m256d d = _mm256_loadu_pd(dst + 4 * t);
    d = _mm256_sub_pd(d, _mm256_mul_pd(_mm256_loadu_pd(x + 4 * t),
                                       _mm256_loadu_pd(y + 4 * t)));
    _mm256_storeu_pd(dst + 4 * t, d);
  }
  for (int64_t i = 4 * nb; i < nn; ++i) dst[i] = dst[i] - x[i] * y[i];
}

void mul_axpy_v(double* dst, const double* x, const double* y, double a,
                int64_t nn) {
  const __m256d va = _mm256_set1_pd(a);
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t) {
    __m256d d = _mm256_loadu_pd(dst + 4 * t);
    const __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x + 4 * t),
                                     _mm256_loadu_pd(y + 4 * t));
    d = _mm256_add_pd(d, _mm256_mul_pd(va, xy));
    _mm256_storeu_pd(dst + 4 * t, d);
  }
  for (int64_t i = 4 * nb; i < nn; ++i) dst[i] = dst[i] + a * (x[i] * y[i]);
}

double combine4(__m256d acc) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum_v(const double* x, int64_t nn) {
  __m256d acc = _mm256_setzero_pd();
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t)
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + 4 * t));
  double r = combine4(acc);
  for (int64_t i = 4 * nb; i < nn; ++i) r += x[i];
  return r;
}

double dot_v(const double* x, const double* y, int64_t nn) {
  __m256d acc = _mm256_setzero_pd();
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + 4 * t),
                                           _mm256_loadu_pd(y + 4 * t)));
  double r = combine4(acc);
  for (int64_t i = 4 * nb; i < nn; ++i) r += x[i] * y[i];
  return r;
}

double max_abs_v(const double* x, int64_t nn) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t)
    acc = _mm256_max_pd(acc,
                        _mm256_andnot_pd(signmask, _mm256_loadu_pd(x + 4 * t)));
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double m = lane[0];
  if (lane[1] > m) m = lane[1];
  if (lane[2] > m) m = lane[2];
  if (lane[3] > m) m = lane[3];
  for (int64_t i = 4 * nb; i < nn; ++i) {
    const double v = std::fabs(x[i]);
    if (v > m) m = v;
  }
  return m;
}

void stencil_line_v(double* dst, const double* src, int64_t nline,
                    const double* w, int halo) {
  double v[2 * 8 + 1];
  if (nline == 1) {
    for (int k = 0; k <= 2 * halo; ++k) v[k] = src[0];
    dst[0] = stencil_combine(w, v, halo);
    return;
  }
  const int64_t lo = halo;
  const int64_t hi = nline - halo;
  const int64_t left_end = std::min(lo, nline);
  auto boundary = [&](int64_t i) {
    for (int k = -halo; k <= halo; ++k) {
      int64_t j = i + k;
      if (j < 0) j += nline;
      if (j >= nline) j -= nline;
      v[k + halo] = src[j];
    }
    dst[i] = stencil_combine(w, v, halo);
  };
  for (int64_t i = 0; i < left_end; ++i) boundary(i);
  for (int64_t i = std::max(hi, left_end); i < nline; ++i) boundary(i);
  if (hi <= lo) return;
  if (halo == 1) {
    const __m256d w0 = _mm256_set1_pd(w[0]);
    const __m256d w1 = _mm256_set1_pd(w[1]);
    const __m256d w2 = _mm256_set1_pd(w[2]);
    int64_t i = lo;
    for (; i + 4 <= hi; i += 4) {
      __m256d r = _mm256_mul_pd(w0, _mm256_loadu_pd(src + i - 1));
      r = _mm256_add_pd(r, _mm256_mul_pd(w1, _mm256_loadu_pd(src + i)));
      r = _mm256_add_pd(r, _mm256_mul_pd(w2, _mm256_loadu_pd(src + i + 1)));
      _mm256_storeu_pd(dst + i, r);
    }
    for (; i < hi; ++i)
      dst[i] = w[0] * src[i - 1] + w[1] * src[i] + w[2] * src[i + 1];
  } else if (halo == 2) {
    const __m256d w0 = _mm256_set1_pd(w[0]);
    const __m256d w1 = _mm256_set1_pd(w[1]);
    const __m256d w2 = _mm256_set1_pd(w[2]);
    const __m256d w3 = _mm256_set1_pd(w[3]);
    const __m256d w4 = _mm256_set1_pd(w[4]);
    int64_t i = lo;
    for (; i + 4 <= hi; i += 4) {
      __m256d a = _mm256_add_pd(_mm256_mul_pd(w0, _mm256_loadu_pd(src + i - 2)),
                                _mm256_mul_pd(w1, _mm256_loadu_pd(src + i - 1)));
      a = _mm256_add_pd(a, _mm256_mul_pd(w2, _mm256_loadu_pd(src + i)));
      const __m256d b =
          _mm256_add_pd(_mm256_mul_pd(w3, _mm256_loadu_pd(src + i + 1)),
                        _mm256_mul_pd(w4, _mm256_loadu_pd(src + i + 2)));
      _mm256_storeu_pd(dst + i, _mm256_add_pd(a, b));
    }
    for (; i < hi; ++i)
      dst[i] = ((w[0] * src[i - 2] + w[1] * src[i - 1]) + w[2] * src[i]) +
               (w[3] * src[i + 1] + w[4] * src[i + 2]);
  } else {
    for (int64_t i = lo; i < hi; ++i) {
      double acc = 0.0;
      for (int k = -halo; k <= halo; ++k) acc += w[k + halo] * src[i + k];
      dst[i] = acc;
    }
  }
}

const Table kAvx2 = {
    "avx2",     scale_v, axpy_v,    add_v, sub_v, mul_v,    mul_add_v,
    mul_sub_v,  mul_axpy_v, sum_v, dot_v, max_abs_v, stencil_line_v,
};

}  // namespace

bool avx2_supported() { return __builtin_cpu_supports("avx2"); }

const Table* avx2_table() { return avx2_supported() ? &kAvx2 : nullptr; }

}  // namespace cbf::kernels
