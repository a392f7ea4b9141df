#include "cbf/mesh_ops.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "cbf/kernels.hpp"
#include "cbf/parallel.hpp"

namespace cbf {

namespace {
constexpr int64_t kChunk = int64_t{1} << 14;

int64_t nchunks_for(int64_t nn) { return (nn + kChunk - 1) / kChunk; }
}  // namespace

double chunked_sum(const double* x, int64_t nn) {
  const auto& k = kernels::active();
  return par::ordered_sum(nchunks_for(nn), [&](int64_t c) {
    const int64_t lo = c * kChunk;
    return k.sum(x + lo, std::min(kChunk, nn - lo));
  });
}

double chunked_dot(const double* x, const double* y, int64_t nn) {
  const auto& k = kernels::active();
  return par::ordered_sum(nchunks_for(nn), [&](int64_t c) {
    const int64_t lo = c * kChunk;
    return k.dot(x + lo, y + lo, std::min(kChunk, nn - lo));
  });
}

double chunked_max_abs(const double* x, int64_t nn) {
  const auto& k = kernels::active();
  return par::ordered_max(nchunks_for(nn), [&](int64_t c) {
    const int64_t lo = c * kChunk;
    return k.max_abs(x + lo, std::min(kChunk, nn - lo));
  });
}

int stencil_halo(int order) { return order == 2 ? 1 : 2; }

void stencil_weights(int order, double h, double* w) {
  assert(order == 2 || order == 4);
  if (order == 2) {
    w[0] = -1.0 / (2.0 * h);
    w[1] = 0.0;
    w[2] = 1.0 / (2.0 * h);
    return;
  }
  w[0] = 1.0 / (12.0 * h);
  w[1] = -8.0 / (12.0 * h);
  w[2] = 0.0;
  w[3] = 8.0 / (12.0 * h);
  w[4] = -1.0 / (12.0 * h);
  static const bool corrupt = [] {
    const char* e = std::getenv("CBF_DEBUG_CORRUPT_STENCIL");
    return e && e[0] == '1';
  }();
  if (corrupt) w[4] *= 1.0 + 1e-3;
}

void apply_stencil_plane(double* dst, const double* src, const Grid& grid,
                         int axis, int order) {
  const int64_t np = grid.npoints();
  const int64_t na = grid.size(axis);
  if (na == 1) {
    std::memset(dst, 0, sizeof(double) * static_cast<size_t>(np));
    return;
  }
  const int halo = stencil_halo(order);
  double w[5];
  stencil_weights(order, grid.spacing(axis), w);
  const auto& k = kernels::active();
  if (axis == grid.dim() - 1) {
    const int64_t nlines = np / na;
    par::parallel_for(nlines, [&](int64_t lb, int64_t le) {
      for (int64_t l = lb; l < le; ++l)
        k.stencil_line(dst + l * na, src + l * na, na, w, halo);
    });
    return;
  }
  // Non-last axis: view the plane as blocks x na x inner and shift whole
  // slabs. Every point accumulates its taps in ascending-offset order
  // (zero weights skipped), the same at every position, so translation
  // equivariance is bit-exact.
  const int64_t inner = grid.stride(axis);
  const int64_t block = na * inner;
  const int64_t nblocks = np / block;
  par::parallel_for(nblocks, [&](int64_t bb, int64_t be) {
    for (int64_t b = bb; b < be; ++b) {
      double* d = dst + b * block;
      const double* s = src + b * block;
      std::memset(d, 0, sizeof(double) * static_cast<size_t>(block));
      for (int off = -halo; off <= halo; ++off) {
        const double wk = w[off + halo];
        if (wk == 0.0) continue;
        // rows i take src row (i+off) mod na: one straight span, one wrapped
        if (off > 0) {
          const int64_t m = na - off;
          k.axpy(d, s + off * inner, wk, m * inner);
          k.axpy(d + m * inner, s, wk, off * inner);
        } else {
          const int64_t m = na + off;  // off < 0 here
          k.axpy(d, s + (na + off) * inner, wk, -off * inner);
          k.axpy(d + (-off) * inner, s, wk, m * inner);
        }
      }
    }
  });
}

TensorField partial_derivative(const TensorField& f, int axis,
                               int stencil_order) {
  TensorField out = TensorField::zeros(f.grid(), f.rank(), f.sym());
  const Grid& grid = *f.grid();
  for (int64_t c = 0; c < f.ncomp(); ++c)
    apply_stencil_plane(out.comp(c), f.comp(c), grid, axis, stencil_order);
  return out;
}

TensorField coordinate_gradient(const TensorField& f, int stencil_order) {
  TensorField out = TensorField::zeros(f.grid(), f.rank() + 1, Sym::none);
  const Grid& grid = *f.grid();
  const int64_t nc = f.ncomp();
  for (int a = 0; a < f.dim(); ++a)
    for (int64_t c = 0; c < nc; ++c)
      apply_stencil_plane(out.comp(a * nc + c), f.comp(c), grid, a,
                          stencil_order);
  return out;
}

double integrate(const TensorField& f, const MetricField& g) {
  assert(f.rank() == 0);
  assert(f.grid() == g.grid());
  const int64_t np = f.npoints();
  const double total = chunked_dot(f.comp(0), g.sqrt_det(), np);
  double vol = 1.0;
  for (double L : f.grid()->periods()) vol *= L;
  return (total / static_cast<double>(np)) * vol;
}

TensorField raise_slot(const TensorField& T, const MetricField& g, int slot) {
  const int r = T.rank();
  const int n = T.dim();
  assert(slot >= 0 && slot < r);
  TensorField out = TensorField::zeros(T.grid(), r, Sym::none);
  const int64_t np = T.npoints();
  int64_t stride = 1;
  for (int s = r - 1; s > slot; --s) stride *= n;
  const int64_t nouter = out.ncomp() / (stride * n);
  const auto& k = kernels::active();
  for (int64_t pre = 0; pre < nouter; ++pre)
    for (int i = 0; i < n; ++i)
      for (int64_t post = 0; post < stride; ++post) {
        double* dst = out.comp((pre * n + i) * stride + post);
        for (int j = 0; j < n; ++j) {
          const double* src = T.comp((pre * n + j) * stride + post);
          k.mul_add(dst, g.ginv().at(i, j), src, np);
        }
      }
  return out;
}

TensorField pointwise_norm_sq(const TensorField& T, const MetricField& g) {
  TensorField out = TensorField::zeros(T.grid(), 0, Sym::none);
  const int64_t np = T.npoints();
  const auto& k = kernels::active();
  if (T.rank() == 0) {
    k.mul_add(out.comp(0), T.comp(0), T.comp(0), np);
    return out;
  }
  TensorField up = raise_slot(T, g, 0);
  for (int s = 1; s < T.rank(); ++s) up = raise_slot(up, g, s);
  for (int64_t c = 0; c < T.ncomp(); ++c)
    k.mul_add(out.comp(0), up.comp(c), T.comp(c), np);
  return out;
}

Norms norms(const TensorField& T, const MetricField& g) {
  const TensorField nsq = pointwise_norm_sq(T, g);
  Norms r;
  r.sup = std::sqrt(chunked_max_abs(nsq.comp(0), nsq.npoints()));
  r.l2 = std::sqrt(std::max(0.0, integrate(nsq, g)));
  return r;
}

}  // namespace cbf
