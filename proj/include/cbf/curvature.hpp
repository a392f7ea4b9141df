#pragma once

#include "cbf/mesh_ops.hpp"
#include "cbf/metric_field.hpp"
#include "cbf/tensor_field.hpp"

// Grid curvature pipeline. Conventions:
//   - Rc_ij = g^{kl} R_ikjl with the Riemann sign fixed so S > 0 on
//     positively curved metrics (same pinning as the jet oracle).
//   - Covariant derivatives prepend the derivative index.
// The Riemann assembly uses the fully lowered coordinate formula with
// second-derivative planes shared between symmetric index slots, which makes
// the algebraic symmetries of Rm hold bitwise while the first Bianchi sum
// cancels to rounding.

namespace cbf {

enum class BundleLevel { base, weyl, cotton, bach };

// Curvature of one metric on one grid, component layouts:
//   gamma: rank 3, Gamma^k_ij at (k,i,j), bitwise symmetric in (i,j)
//   rm   : rank 4, R_ijkl, bitwise Riemann symmetries
//   rc, a: rank 2 symmetric; s: rank 0
//   w    : rank 4 Weyl          (level >= weyl)
//   c    : rank 3 Cotton C_ijk  (level >= cotton), antisymmetric in (j,k)
//   b, b_alt: rank 2 Bach via the two routes (level >= bach)
struct CurvatureBundle {
  BundleLevel level = BundleLevel::base;
  int stencil_order = kDefaultStencilOrder;
  TensorField gamma, rm, rc, s, a, w, c, b, b_alt;
};

TensorField christoffel(const MetricField& g,
                        int stencil_order = kDefaultStencilOrder);

TensorField riemann(const MetricField& g, const TensorField& gamma,
                    int stencil_order = kDefaultStencilOrder);

void ricci_scalar_schouten(const MetricField& g, const TensorField& rm,
                           TensorField& rc, TensorField& s, TensorField& a);

TensorField weyl(const MetricField& g, const TensorField& rm,
                 const TensorField& a);

// Levi-Civita covariant derivative, rank r -> r+1, derivative index first.
// Scalars reduce to the coordinate gradient.
TensorField covariant_derivative(const TensorField& T, const MetricField& g,
                                 const TensorField& gamma,
                                 int stencil_order = kDefaultStencilOrder);

TensorField cotton(const MetricField& g, const TensorField& a,
                   const TensorField& gamma,
                   int stencil_order = kDefaultStencilOrder);

// Both Bach routes; bundle must hold gamma, rm, rc, a, w.
void bach(const MetricField& g, const CurvatureBundle& bundle, TensorField& b,
          TensorField& b_alt, int stencil_order = kDefaultStencilOrder);

// Pointwise |div B_i - ((n-4)/(n-2)) C_jki R^jk|_g as a scalar field
// (in dim 4 just |div B|_g). Bundle must hold gamma, rc, c, b.
TensorField bach_divergence_residual(const MetricField& g,
                                     const CurvatureBundle& bundle,
                                     int stencil_order = kDefaultStencilOrder);

CurvatureBundle make_bundle(const MetricField& g, BundleLevel level,
                            int stencil_order = kDefaultStencilOrder);

// First variation of Rm along g_dot = h (needs gamma + rm in bundle).
TensorField curvature_variation(const MetricField& g,
                                const CurvatureBundle& bundle,
                                const TensorField& h,
                                int stencil_order = kDefaultStencilOrder);

// T(Hess p)_ijkl = g_jl Hess_ik - g_jk Hess_il - g_il Hess_jk + g_ik Hess_jl.
TensorField t_tensor(const MetricField& g, const TensorField& gamma,
                     const TensorField& p,
                     int stencil_order = kDefaultStencilOrder);

}  // namespace cbf
