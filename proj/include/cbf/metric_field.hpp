#pragma once

#include <vector>

#include "cbf/tensor_field.hpp"

namespace cbf {

// Riemannian metric on a grid with cached inverse, sqrt(det g) and the
// per-point eigenvalue range. Construction validates symmetry of the input
// and enforces the SPD guard: lambda_min > eps_spd * lambda_max at every
// node (throws SingularMetric otherwise).
class MetricField {
 public:
  static constexpr double kDefaultEpsSpd = 1e-10;

  MetricField() = default;
  static MetricField from_components(TensorField g,
                                     double eps_spd = kDefaultEpsSpd);

  const GridPtr& grid() const { return g_.grid(); }
  int dim() const { return g_.dim(); }
  int64_t npoints() const { return g_.npoints(); }
  const TensorField& g() const { return g_; }
  const TensorField& ginv() const { return ginv_; }
  const double* sqrt_det() const { return sqrt_det_.data(); }
  const double* eig_min() const { return eig_min_.data(); }
  const double* eig_max() const { return eig_max_.data(); }
  double global_eig_min() const { return global_eig_min_; }

 private:
  TensorField g_, ginv_;
  std::vector<double> sqrt_det_, eig_min_, eig_max_;
  double global_eig_min_ = 0.0;
};

namespace smallmat {
// Cyclic Jacobi eigensolver for symmetric n x n (n <= 8), row-major a.
// Returns eigenvalues in w (unordered) and, when v != nullptr, orthonormal
// eigenvectors in columns of v.
void sym_eigen(int n, const double* a, double* w, double* v);
}  // namespace smallmat

}  // namespace cbf
