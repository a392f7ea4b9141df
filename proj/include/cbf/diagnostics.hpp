#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbf/curvature.hpp"
#include "cbf/metric_field.hpp"
#include "cbf/pressure.hpp"
#include "cbf/tensor_field.hpp"

// Monitored quantities for a flow trajectory: constraint drift, curvature
// identity residuals, Weyl energy, Shi-type derivative ratios, f_m, and the
// extension-criterion status (curvature+pressure bound and operator
// invertibility margin). Monitors report raw ratios; boundedness is asserted
// only by the test suites, never silently enforced here.

namespace cbf {

struct MonitorThresholds {
  double k_bound = 0.0;        // sup(|Rm|+|p|) bound; 0 disables the check
  double margin_floor = 1e-8;  // invertibility-margin floor
};

struct ExtensionStatus {
  double k_observed = 0.0;  // running sup over the trajectory of |Rm|+|p|
  double margin = 1.0;      // latest pressure-operator margin
  bool within_bounds = true;
};

// One diagnostics row. shi_l2/shi_ptwise hold m = 1..m_max in order.
struct DiagnosticsRecord {
  std::int64_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  double s_drift_sup = 0.0;     // sup|S - s0|
  double bach_trace_rel = 0.0;  // sup|g^{ij}B_ij| / sup|B|_g
  double bach_div_sup = 0.0;    // sup of the divergence-identity residual
  double cotton_weyl_rel = 0.0; // sup|div W + (n-3)C|_g / sup|C|_g
  double weyl_energy = 0.0;     // integral of |W|^2 dmu
  double rm_sup = 0.0;
  double p_sup = 0.0;
  double rm_l2 = 0.0;
  double p_l2 = 0.0;
  std::vector<double> shi_l2;      // t^{m/2} integral |grad^m Rm|^2 dmu
  std::vector<double> shi_ptwise;  // sup|grad^m Rm| / (K + t^{-1/2})^{1+m/2}
  double f_m_sup = 0.0;            // sup of f_{m_max}
  double metric_eig_min = 0.0;
  std::int64_t pressure_iterations = 0;
  double pressure_residual = 0.0;
  double pressure_margin = 1.0;
  bool extension_ok = true;
};

// t^{m/2} * integral |grad^m Rm|^2 dmu  (m >= 1; bundle supplies gamma, rm).
double shi_l2_monitor(const MetricField& g, const CurvatureBundle& bundle,
                      int m, double t,
                      int stencil_order = kDefaultStencilOrder);

// sup|grad^m Rm| / (K + t^{-1/2})^{1+m/2}; returns 0 at t = 0.
double shi_pointwise_monitor(const MetricField& g,
                             const CurvatureBundle& bundle, int m, double t,
                             double K,
                             int stencil_order = kDefaultStencilOrder);

// f_m = sum_{j=1..m} |grad^j Rm|^{2/(2+j)} as a scalar field.
TensorField f_m_field(const MetricField& g, const CurvatureBundle& bundle,
                      int m, int stencil_order = kDefaultStencilOrder);

// integral |W|^2 dmu (bundle level >= weyl).
double weyl_energy(const MetricField& g, const CurvatureBundle& bundle);

// Extension criterion: k_observed = max(k_observed_prev, rm_sup + p_sup)
// must stay within thresholds.k_bound (when nonzero) and the pressure
// margin above thresholds.margin_floor.
ExtensionStatus extension_monitor(double k_observed_prev, double rm_sup,
                                  double p_sup, double pressure_margin,
                                  const MonitorThresholds& thresholds);

// Everything needed to assemble one record. p/psol may be null (variants
// without a pressure). shi_k <= 0 selects this record's rm_sup + p_sup as K
// (the run captures K from its first record and passes it from then on).
struct RecordInputs {
  const MetricField& g;
  const CurvatureBundle& bundle;  // level bach
  double s0 = 0.0;
  std::int64_t step = 0;
  double t = 0.0;
  double dt = 0.0;
  const TensorField* p = nullptr;
  const PressureSolution* psol = nullptr;
  int m_max = 2;
  double shi_k = 0.0;
  double k_observed_prev = 0.0;
  MonitorThresholds thresholds;
};

DiagnosticsRecord compute_record(const RecordInputs& in);

// CSV schema: fixed column order matching DiagnosticsRecord declaration,
// one header row, floats with 17 significant digits.
std::string csv_header(int m_max);
std::string csv_row(const DiagnosticsRecord& r);

}  // namespace cbf
