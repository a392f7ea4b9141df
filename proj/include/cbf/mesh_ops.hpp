#pragma once

#include "cbf/metric_field.hpp"
#include "cbf/tensor_field.hpp"

// Finite-difference substrate: periodic central stencils (order 2 or 4),
// metric-weighted integrals and tensor norms. All reductions run over
// fixed-size chunks combined in index order, so results do not depend on
// the thread count or SIMD lane.

namespace cbf {

inline constexpr int kDefaultStencilOrder = 4;

int stencil_halo(int order);
// w[k+halo], k = -halo..halo. Honors the CBF_DEBUG_CORRUPT_STENCIL hook
// (order 4 only): set to "1" to mis-weight one tap for fault-injection tests.
void stencil_weights(int order, double h, double* w);

// One component plane: dst = d src / d x_axis. Exact zeros when the axis
// has a single node.
void apply_stencil_plane(double* dst, const double* src, const Grid& grid,
                         int axis, int order);

// Same-rank derivative of every component.
TensorField partial_derivative(const TensorField& f, int axis,
                               int stencil_order = kDefaultStencilOrder);

// Rank r -> r+1, derivative index first: out(a, c...) = d_a f(c...).
TensorField coordinate_gradient(const TensorField& f,
                                int stencil_order = kDefaultStencilOrder);

// Midpoint rule: sum_points f * sqrt(det g) * prod h_a. f scalar.
double integrate(const TensorField& f, const MetricField& g);

// Scalar field |T|^2_g: every slot contracted with g^{-1}.
TensorField pointwise_norm_sq(const TensorField& T, const MetricField& g);

struct Norms {
  double sup = 0.0;
  double l2 = 0.0;
};
Norms norms(const TensorField& T, const MetricField& g);

// Contract slot `slot` of T with g^{-1} (raise one index).
TensorField raise_slot(const TensorField& T, const MetricField& g, int slot);

// Deterministic chunked reductions over contiguous arrays.
double chunked_sum(const double* x, int64_t nn);
double chunked_dot(const double* x, const double* y, int64_t nn);
double chunked_max_abs(const double* x, int64_t nn);

}  // namespace cbf
