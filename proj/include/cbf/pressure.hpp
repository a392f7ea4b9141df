#pragma once

#include <cstdint>

#include "cbf/curvature.hpp"
#include "cbf/mesh_ops.hpp"
#include "cbf/metric_field.hpp"
#include "cbf/tensor_field.hpp"

// The elliptic pressure problem ((n-1) Lap_g + s0) p = RHS.
//
// Lap_g is discretized in divergence form (1/rho) D_i (rho g^{ij} D_j f)
// with rho = sqrt(det g), which makes the discrete operator exactly
// self-adjoint in the discrete measure rho * prod(h_a). The solve runs
// MINRES on the symmetrized operator D^{1/2} L D^{-1/2}, D = diag(rho):
// matrix-free, suited to the indefinite case s0 > 0, optional Jacobi
// (diagonal) preconditioning.
//
// Invertibility is monitored through a Rayleigh-quotient margin
// min|Ritz| / max|Ritz| of the symmetrized operator; margins below eps_inv
// raise NearSingularOperator instead of returning a near-garbage solution.

namespace cbf {

struct PressureOptions {
  std::int64_t max_iterations = 0;  // 0 = 10 * npoints
  double tol = 1e-10;               // relative residual target
  bool project_kernel = true;       // s0 == 0: project constants out of
                                    // RHS and solution (minimal-norm)
  bool jacobi = false;              // diagonal (Jacobi) preconditioning
  double eps_inv = 1e-8;            // relative Rayleigh-quotient floor
  double compat_tol = 1e-3;         // s0 == 0: |mean_mu(RHS)| above this
                                    // fraction of RMS_mu(RHS) raises
                                    // IncompatibleRHS (smaller means are
                                    // projected out and reported)
  std::int64_t margin_steps = 0;    // > 0: refine the margin with this many
                                    // fully reorthogonalized Lanczos steps
                                    // (capped at npoints) before solving
  const TensorField* initial_guess = nullptr;  // warm start (not owned)
};

struct EllipticProblem {
  const MetricField& g;
  double s0 = 0.0;
  const TensorField& rhs;  // scalar field on g's grid
  PressureOptions options;
};

struct PressureSolution {
  TensorField p;
  std::int64_t iterations = 0;
  double rel_residual = 0.0;     // ||((n-1)Lap + s0)p - RHS||_2 / ||RHS||_2
  double rayleigh_margin = 1.0;  // min|Ritz| / max|Ritz| estimate
  double compat_defect = 0.0;    // |mean_mu(RHS)| (s0 == 0 only)
};

// Divergence-form Laplace-Beltrami of a scalar field.
TensorField laplace_beltrami(const MetricField& g, const TensorField& f,
                             int stencil_order = kDefaultStencilOrder);

// -(n-2) A_ij B_ij + div div B from a complete curvature bundle.
TensorField pressure_rhs(const MetricField& g, const CurvatureBundle& bundle,
                         int stencil_order = kDefaultStencilOrder);

// Throws PressureError (NoConvergence / NearSingularOperator /
// IncompatibleRHS); returns the solution with the residual contract
// ||((n-1)Lap + s0)p - RHS||_2 <= tol * ||RHS||_2 on success.
PressureSolution solve_pressure(const EllipticProblem& problem,
                                int stencil_order = kDefaultStencilOrder);
PressureSolution solve_pressure(const MetricField& g, double s0,
                                const TensorField& rhs,
                                const PressureOptions& options = {},
                                int stencil_order = kDefaultStencilOrder);

// General self-adjoint solve (alpha Lap_g + V(x)) f = RHS with a variable
// potential (same machinery, no constant-kernel handling); used by the
// constant-scalar-curvature projector's Newton step. Throws PressureError.
PressureSolution solve_helmholtz(const MetricField& g, double alpha,
                                 const TensorField& potential,
                                 const TensorField& rhs,
                                 const PressureOptions& options = {},
                                 int stencil_order = kDefaultStencilOrder);

}  // namespace cbf
