#pragma once

#include <cstdint>
#include <vector>

#include "cbf/grid.hpp"

namespace cbf {

// Declared index symmetry of a TensorField. Constructors that claim a
// symmetry fill mirror components from canonical ones, so the declaration
// holds bitwise.
//   sym_pair: symmetric under swap of the last two indices (rank >= 2);
//   riemann:  rank 4 with R_{ijkl} = -R_{jikl} = -R_{ijlk} = R_{klij}.
enum class Sym : std::uint8_t { none, sym_pair, riemann };

// Dense tensor field over a grid, component-major: component c occupies the
// contiguous plane data[c*npoints .. (c+1)*npoints). Component index is the
// base-n flattening of the tensor indices (first index slowest).
class TensorField {
 public:
  TensorField() = default;
  static TensorField zeros(GridPtr grid, int rank, Sym sym = Sym::none);

  int rank() const { return rank_; }
  int dim() const { return grid_->dim(); }
  Sym sym() const { return sym_; }
  void set_sym(Sym s) { sym_ = s; }
  const GridPtr& grid() const { return grid_; }
  int64_t npoints() const { return grid_->npoints(); }
  int64_t ncomp() const { return ncomp_; }

  double* comp(int64_t c) { return data_.data() + c * npoints(); }
  const double* comp(int64_t c) const { return data_.data() + c * npoints(); }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  int64_t nvalues() const { return static_cast<int64_t>(data_.size()); }

  template <typename... I>
  int64_t cidx(I... idx) const {
    int64_t c = 0;
    ((c = c * dim() + idx), ...);
    return c;
  }
  template <typename... I>
  double* at(I... idx) {
    return comp(cidx(idx...));
  }
  template <typename... I>
  const double* at(I... idx) const {
    return comp(cidx(idx...));
  }

  // Copies canonical components onto their symmetry images (with sign for
  // riemann pairs) so the declared symmetry holds bitwise.
  void fill_from_canonical();

 private:
  GridPtr grid_;
  int rank_ = 0;
  Sym sym_ = Sym::none;
  int64_t ncomp_ = 1;
  std::vector<double> data_;
};

// Elementwise helpers over whole fields (shape-checked by assert only).
void field_scale(TensorField& dst, const TensorField& x, double a);
void field_axpy(TensorField& dst, const TensorField& x, double a);
void field_add(TensorField& dst, const TensorField& x, const TensorField& y);
void field_sub(TensorField& dst, const TensorField& x, const TensorField& y);
double field_max_abs(const TensorField& x);

}  // namespace cbf
