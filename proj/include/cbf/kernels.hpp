#pragma once

#include <cstdint>

// Low-level contiguous-array kernels. Two lanes: a scalar reference and an
// AVX2 variant selected at runtime. Both lanes follow the exact same
// per-element evaluation order (no FMA), so results are bit-identical; the
// unit tests enforce this.
//
// Reductions use a fixed 4-way interleaved accumulator scheme in both lanes:
//   acc[j] = sum of x[4t+j], combined as (acc0+acc1)+(acc2+acc3), tail in order.
// This keeps every reduction independent of lane choice and of thread count
// (callers split work into fixed-size chunks and combine chunk results in
// index order).

namespace cbf::kernels {

using std::int64_t;

struct Table {
  const char* name;
  // dst = a*x
  void (*scale)(double* dst, const double* x, double a, int64_t nn);
  // dst += a*x
  void (*axpy)(double* dst, const double* x, double a, int64_t nn);
  // dst = x + y
  void (*add)(double* dst, const double* x, const double* y, int64_t nn);
  // dst = x - y
  void (*sub)(double* dst, const double* x, const double* y, int64_t nn);
  // dst = x * y
  void (*mul)(double* dst, const double* x, const double* y, int64_t nn);
  // dst += x * y
  void (*mul_add)(double* dst, const double* x, const double* y, int64_t nn);
  // dst -= x * y
  void (*mul_sub)(double* dst, const double* x, const double* y, int64_t nn);
  // dst += a * x * y
  void (*mul_axpy)(double* dst, const double* x, const double* y, double a,
                   int64_t nn);
  double (*sum)(const double* x, int64_t nn);
  double (*dot)(const double* x, const double* y, int64_t nn);
  double (*max_abs)(const double* x, int64_t nn);
  // Periodic stencil along a contiguous line of length nline:
  //   dst[i] = sum_{k=-halo..halo} w[k+halo] * src[(i+k) mod nline]
  void (*stencil_line)(double* dst, const double* src, int64_t nline,
                       const double* w, int halo);
};

const Table& scalar_table();
bool avx2_supported();              // compiled in and CPU reports AVX2
const Table* avx2_table();          // nullptr when not available
// Lane picked once per process: CBF_SIMD=scalar|avx2|auto (default auto).
const Table& active();

// Canonical grouping of a stencil dot product. Every point of stencil_line
// (wrapped boundary or interior, either lane) evaluates exactly this tree,
// which is what makes translation equivariance bit-exact.
inline double stencil_combine(const double* w, const double* v, int halo) {
  if (halo == 1) return (w[0] * v[0] + w[1] * v[1]) + w[2] * v[2];
  if (halo == 2)
    return ((w[0] * v[0] + w[1] * v[1]) + w[2] * v[2]) +
           (w[3] * v[3] + w[4] * v[4]);
  double acc = 0.0;
  for (int k = 0; k <= 2 * halo; ++k) acc += w[k] * v[k];
  return acc;
}

}  // namespace cbf::kernels
