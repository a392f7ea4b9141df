#include "cbf/tensor_field.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>

#include "cbf/kernels.hpp"
#include "cbf/parallel.hpp"

namespace cbf {

TensorField TensorField::zeros(GridPtr grid, int rank, Sym sym) {
  TensorField t;
  t.grid_ = std::move(grid);
  t.rank_ = rank;
  t.sym_ = sym;
  t.ncomp_ = 1;
  for (int r = 0; r < rank; ++r) t.ncomp_ *= t.grid_->dim();
  t.data_.assign(static_cast<size_t>(t.ncomp_ * t.grid_->npoints()), 0.0);
  return t;
}

void TensorField::fill_from_canonical() {
  const int n = dim();
  const int64_t np = npoints();
  if (sym_ == Sym::sym_pair && rank_ >= 2) {
    int64_t nhead = 1;
    for (int r = 0; r < rank_ - 2; ++r) nhead *= n;
    for (int64_t h = 0; h < nhead; ++h)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) {
          const int64_t src = (h * n + j) * n + i;  // canonical j <= i? use i<=j
          const int64_t dst = (h * n + i) * n + j;
          std::memcpy(comp(dst), comp(src), sizeof(double) * np);
        }
    return;
  }
  if (sym_ == Sym::riemann) {
    assert(rank_ == 4);
    // canonical: i<j, k<l, (i,j) <= (k,l) lexicographically
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const int64_t c = cidx(i, j, k, l);
            if (i == j || k == l) {
              std::memset(comp(c), 0, sizeof(double) * np);
              continue;
            }
            int a = i, b = j, cc = k, dd = l;
            double s = 1.0;
            if (a > b) { std::swap(a, b); s = -s; }
            if (cc > dd) { std::swap(cc, dd); s = -s; }
            if (a * n + b > cc * n + dd) { std::swap(a, cc); std::swap(b, dd); }
            const int64_t canon = cidx(a, b, cc, dd);
            if (canon == c) continue;
            if (s == 1.0) {
              std::memcpy(comp(c), comp(canon), sizeof(double) * np);
            } else {
              kernels::active().scale(comp(c), comp(canon), -1.0, np);
            }
          }
    return;
  }
}

namespace {
constexpr int64_t kChunk = 1 << 14;

void apply2(TensorField& dst, const TensorField& x,
            void (*op)(double*, const double*, double, int64_t), double a) {
  const int64_t nn = dst.nvalues();
  par::parallel_for((nn + kChunk - 1) / kChunk, [&](int64_t b, int64_t e) {
    for (int64_t c = b; c < e; ++c) {
      const int64_t lo = c * kChunk;
      const int64_t len = std::min(kChunk, nn - lo);
      op(dst.data() + lo, x.data() + lo, a, len);
    }
  });
}
}  // namespace

void field_scale(TensorField& dst, const TensorField& x, double a) {
  assert(dst.nvalues() == x.nvalues());
  apply2(dst, x, kernels::active().scale, a);
}

void field_axpy(TensorField& dst, const TensorField& x, double a) {
  assert(dst.nvalues() == x.nvalues());
  apply2(dst, x, kernels::active().axpy, a);
}

void field_add(TensorField& dst, const TensorField& x, const TensorField& y) {
  const int64_t nn = dst.nvalues();
  par::parallel_for((nn + kChunk - 1) / kChunk, [&](int64_t b, int64_t e) {
    for (int64_t c = b; c < e; ++c) {
      const int64_t lo = c * kChunk;
      const int64_t len = std::min(kChunk, nn - lo);
      kernels::active().add(dst.data() + lo, x.data() + lo, y.data() + lo, len);
    }
  });
}

void field_sub(TensorField& dst, const TensorField& x, const TensorField& y) {
  const int64_t nn = dst.nvalues();
  par::parallel_for((nn + kChunk - 1) / kChunk, [&](int64_t b, int64_t e) {
    for (int64_t c = b; c < e; ++c) {
      const int64_t lo = c * kChunk;
      const int64_t len = std::min(kChunk, nn - lo);
      kernels::active().sub(dst.data() + lo, x.data() + lo, y.data() + lo, len);
    }
  });
}

double field_max_abs(const TensorField& x) {
  const int64_t nn = x.nvalues();
  const int64_t nchunks = (nn + kChunk - 1) / kChunk;
  return par::ordered_max(nchunks, [&](int64_t c) {
    const int64_t lo = c * kChunk;
    const int64_t len = std::min(kChunk, nn - lo);
    return kernels::active().max_abs(x.data() + lo, len);
  });
}

}  // namespace cbf
