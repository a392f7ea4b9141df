#pragma once

#include <vector>

#include "cbf/metric_field.hpp"

// Analytic metric families and their exact pointwise curvature, evaluated
// through jet arithmetic (cbf/jet.hpp) straight from the defining formulas.
// No grids, no stencils: this is the ground truth the finite-difference
// pipeline is measured against, plus a second, hand-derived closed-form
// route for the conformally flat family so the oracle itself is
// cross-checked.

namespace cbf {

struct WaveMode {
  std::vector<int> k;  // integer wavenumber per axis
  double amp = 0.0;
  double phase = 0.0;
};

struct AnalyticFamily {
  enum class Tag {
    flat,
    constant_diagonal,
    conformally_flat,
    doubly_warped,
    off_diagonal_perturbation,
  };
  Tag tag = Tag::flat;
  int n = 4;
  std::vector<double> periods;     // size n
  double scale = 1.0;              // constant multiplier on the whole metric
  std::vector<double> diag;        // constant_diagonal entries
  std::vector<WaveMode> u_modes;   // conformally_flat u; doubly_warped u
  std::vector<WaveMode> v_modes;   // doubly_warped v
  int split = 2;                   // doubly_warped: axes < split get e^{2u}
  int offd_i = 0, offd_j = 1;      // off-diagonal pair
  std::vector<WaveMode> offd_modes;

  void validate() const;  // throws ConfigError on SPD-violating parameters
};

// sum of modes: u(x) = sum amp * sin(2*pi*sum_a k_a x_a / L_a + phase)
double mode_sum(const std::vector<WaveMode>& modes, const double* x,
                const std::vector<double>& periods);

// plain-double metric values at a point (row-major n x n)
void family_metric_values(const AnalyticFamily& fam, const double* x,
                          double* g_out);

MetricField sample_to_grid(const AnalyticFamily& fam, GridPtr grid);

struct OracleOptions {
  bool alt_bach = true;   // evaluate the Weyl-divergence Bach expression too
  bool derivs = false;    // covariant dRm, d2Rm
  bool divergence = false;  // Bach-divergence identity pieces (order >= 5)
  bool rhs = false;         // pressure right-hand side (order >= 6)
  int order = 0;            // 0 = minimal for the requested pieces
};

// Everything row-major, lowered indices, derivative indices first.
struct PointBundle {
  int n = 0;
  std::vector<double> g, ginv;   // n^2
  std::vector<double> gamma;     // n^3: gamma[(k*n+i)*n+j] = Gamma^k_ij
  std::vector<double> rm;        // n^4: R_ijkl
  std::vector<double> rc;        // n^2
  double s = 0.0;
  std::vector<double> a_sch;     // n^2
  std::vector<double> w;         // n^4
  std::vector<double> c;         // n^3: C_ijk
  std::vector<double> b;         // n^2 (Schouten-form expression)
  std::vector<double> b_alt;     // n^2 (Weyl-divergence expression)
  std::vector<double> drm;       // n^5: (a, ijkl)
  std::vector<double> d2rm;      // n^6: (b, a, ijkl)
  std::vector<double> div_b;     // n: contracted nabla^j B_ij
  std::vector<double> cotton_rc; // n: C_jki R^jk (the Lemma correction term)
  std::vector<double> div_w_c;   // n^3: (n-2)/(n-3) * nabla^l W_lijk
  double pressure_rhs = 0.0;
};

PointBundle oracle_bundle_at(const AnalyticFamily& fam, const double* x,
                             const OracleOptions& opt = {});

// Hand-derived conformally-flat closed forms (independent of the jet
// pipeline): Gamma^k_ij = d_j u delta^k_i + d_i u delta^k_j - d_k u delta_ij,
// Rc = -(n-2)(Hess u - du du) - (Lap u + (n-2)|du|^2) delta,
// S = e^{-2u}(-2(n-1) Lap u - (n-1)(n-2)|du|^2).
// Valid for tag == conformally_flat (scale folded into u as a constant).
void conformal_closed_forms(const AnalyticFamily& fam, const double* x,
                            std::vector<double>& gamma_out,
                            std::vector<double>& rc_out, double& s_out);

}  // namespace cbf
