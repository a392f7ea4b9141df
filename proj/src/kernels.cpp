#include "cbf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>

namespace cbf::kernels {

namespace {

void scale_s(double* dst, const double* x, double a, int64_t nn) {
  for (int64_t i = 0; i < nn; ++i) dst[i] = a * x[i];
}

void axpy_s(double* dst, const double* x, double a, int64_t nn) {
  for (int64_t i = 0; i < nn; ++i) dst[i] = dst[i] + a * x[i];
}

void add_s(double* dst, const double* x, const double* y, int64_t nn) {
  for (int64_t i = 0; i < nn; ++i) dst[i] = x[i] + y[i];
}

void sub_s(double* dst, const double* x, const double* y, int64_t nn) {
  for (int64_t i = 0; i < nn; ++i) dst[i] = x[i] - y[i];
}

void mul_s(double* dst, const double* x, const double* y, int64_t nn) {
  for (int64_t i = 0; i < nn; ++i) dst[i] = x[i] * y[i];
}

void mul_add_s(double* dst, const double* x, const double* y, int64_t nn) {
  for (int64_t i = 0; i < nn; ++i) dst[i] = dst[i] + x[i] * y[i];
}

void mul_sub_s(double* dst, const double* x, const double* y, int64_t nn) {
  for (int64_t i = 0; i < nn; ++i) dst[i] = dst[i] - x[i] * y[i];
}

void mul_axpy_s(double* dst, const double* x, const double* y, double a,
                int64_t nn) {
  for (int64_t i = 0; i < nn; ++i) dst[i] = dst[i] + a * (x[i] * y[i]);
}

double sum_s(const double* x, int64_t nn) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t) {
    a0 += x[4 * t + 0];
    a1 += x[4 * t + 1];
    a2 += x[4 * t + 2];
    a3 += x[4 * t + 3];
  }
  double r = (a0 + a1) + (a2 + a3);
  for (int64_t i = 4 * nb; i < nn; ++i) r += x[i];
  return r;
}

double dot_s(const double* x, const double* y, int64_t nn) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  const int64_t nb = nn / 4;
  for (int64_t t = 0; t < nb; ++t) {
    a0 += x[4 * t + 0] * y[4 * t + 0];
    a1 += x[4 * t + 1] * y[4 * t + 1];
    a2 += x[4 * t + 2] * y[4 * t + 2];
    a3 += x[4 * t + 3] * y[4 * t + 3];
  }
  double r = (a0 + a1) + (a2 + a3);
  for (int64_t i = 4 * nb; i < nn; ++i) r += x[i] * y[i];
  return r;
}

double max_abs_s(const double* x, int64_t nn) {
  double m = 0.0;
  for (int64_t i = 0; i < nn; ++i) {
    const double v = std::fabs(x[i]);
    if (v > m) m = v;
  }
  return m;
}

void stencil_line_s(double* dst, const double* src, int64_t nline,
                    const double* w, int halo) {
  double v[2 * 8 + 1];
  if (nline == 1) {
    for (int k = 0; k <= 2 * halo; ++k) v[k] = src[0];
    dst[0] = stencil_combine(w, v, halo);
    return;
  }
  const int64_t lo = halo;
  const int64_t hi = nline - halo;
  // wrapped boundaries: gather, then the canonical combine
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
    const double w0 = w[0], w1 = w[1], w2 = w[2];
    for (int64_t i = lo; i < hi; ++i)
      dst[i] = w0 * src[i - 1] + w1 * src[i] + w2 * src[i + 1];
  } else if (halo == 2) {
    const double w0 = w[0], w1 = w[1], w2 = w[2], w3 = w[3], w4 = w[4];
    for (int64_t i = lo; i < hi; ++i)
      dst[i] = ((w0 * src[i - 2] + w1 * src[i - 1]) + w2 * src[i]) +
               (w3 * src[i + 1] + w4 * src[i + 2]);
  } else {
    for (int64_t i = lo; i < hi; ++i) {
      double acc = 0.0;
      for (int k = -halo; k <= halo; ++k) acc += w[k + halo] * src[i + k];
      dst[i] = acc;
    }
  }
}

const Table kScalar = {
    "scalar",   scale_s, axpy_s,    add_s, sub_s, mul_s,    mul_add_s,
    mul_sub_s,  mul_axpy_s, sum_s, dot_s, max_abs_s, stencil_line_s,
};

}  // namespace

const Table& scalar_table() { return kScalar; }

#if !defined(CBF_HAVE_AVX2)
bool avx2_supported() { return false; }
const Table* avx2_table() { return nullptr; }
#endif

const Table& active() {
  static const Table* chosen = [] {
    const char* env = std::getenv("CBF_SIMD");
    std::string mode = env ? env : "auto";
    if (mode == "scalar") return &kScalar;
    if (mode == "avx2") {
      if (!avx2_supported())
        throw std::runtime_error("CBF_SIMD=avx2 requested but AVX2 unavailable");
      return avx2_table();
    }
    return avx2_supported() ? avx2_table() : &kScalar;
  }();
  return *chosen;
}

}  // namespace cbf::kernels
