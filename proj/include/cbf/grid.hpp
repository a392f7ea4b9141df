#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace cbf {

using std::int64_t;

// Uniform periodic grid on a flat torus: axis a has size[a] nodes spaced
// h[a] = period[a]/size[a], node coordinates x_a = i*h[a]. Row-major point
// order (last axis fastest).
class Grid {
 public:
  static std::shared_ptr<const Grid> create(std::vector<int64_t> sizes,
                                            std::vector<double> periods);

  int dim() const { return dim_; }
  int64_t size(int axis) const { return sizes_[axis]; }
  const std::vector<int64_t>& sizes() const { return sizes_; }
  double period(int axis) const { return periods_[axis]; }
  const std::vector<double>& periods() const { return periods_; }
  double spacing(int axis) const { return h_[axis]; }
  double min_spacing() const;
  int64_t stride(int axis) const { return strides_[axis]; }
  int64_t npoints() const { return npoints_; }
  double coord(int axis, int64_t i) const { return h_[axis] * i; }
  double volume_factor() const { return vol_factor_; }  // prod(L_a)/npoints

  void decompose(int64_t p, int64_t* idx) const {
    for (int a = dim_ - 1; a >= 0; --a) {
      idx[a] = p % sizes_[a];
      p /= sizes_[a];
    }
  }
  void point_coords(int64_t p, double* x) const {
    for (int a = dim_ - 1; a >= 0; --a) {
      x[a] = h_[a] * (p % sizes_[a]);
      p /= sizes_[a];
    }
  }

 private:
  Grid() = default;
  int dim_ = 0;
  std::vector<int64_t> sizes_, strides_;
  std::vector<double> periods_, h_;
  int64_t npoints_ = 0;
  double vol_factor_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace cbf
