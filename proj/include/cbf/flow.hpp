#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cbf/curvature.hpp"
#include "cbf/diagnostics.hpp"
#include "cbf/metric_field.hpp"
#include "cbf/pressure.hpp"
#include "cbf/tensor_field.hpp"

namespace cbf {

// Conformal Bach flow and its companions. All variants evolve the metric by
// an explicit Runge-Kutta step whose velocity is built from the Bach tensor;
// the conformal variants couple a pressure field chosen so the scalar
// curvature stays at its initial constant value s0.
enum class FlowVariant { cbf, modified_cbf, deturck_cbf, bh_bach };

const char* to_string(FlowVariant v);
FlowVariant flow_variant_from_string(const std::string& name);

enum class TimeScheme { rk2, rk4 };

const char* to_string(TimeScheme s);
TimeScheme time_scheme_from_string(const std::string& name);

// A point on a trajectory. For the pressure-coupled variants `p` holds the
// pressure solved at this state's own metric (self-consistent); for bh_bach
// it stays empty.
struct FlowState {
  double t = 0.0;
  std::int64_t step = 0;
  MetricField g;
  TensorField p;
  double s0 = 0.0;
  FlowVariant variant = FlowVariant::cbf;
  // Fixed reference metric for the DeTurck gauge; unused by other variants.
  std::shared_ptr<const MetricField> background;
};

// Time stepping controls. The step size follows the parabolic scaling of a
// fourth-order operator: dt = c_cfl * h_min^4 / max(1, sup |Rm|), clipped so
// the run lands exactly on t_end.
struct StepPolicy {
  TimeScheme scheme = TimeScheme::rk2;
  double c_cfl = 0.05;
  double t_end = 0.0;
  std::int64_t max_steps = 0;  // 0 means no step cap
  PressureOptions pressure;
  int stencil_order = kDefaultStencilOrder;
};

// ---- flow velocities -------------------------------------------------------
//
// Each velocity is the right-hand side of dg/dt for one variant, evaluated
// from a bach-level bundle at g. `p` must be the pressure solved at g.

// 2(n-2) (B + p g)
TensorField velocity_cbf(const MetricField& g, const CurvatureBundle& bundle,
                         const TensorField& p);

// 2(n-2) (B + (lap S) g / (2(n-1)(n-2)) + p g)
TensorField velocity_modified_cbf(const MetricField& g,
                                  const CurvatureBundle& bundle,
                                  const TensorField& p,
                                  int stencil_order = kDefaultStencilOrder);

// B + (lap S) g / (2(n-1)(n-2)), no pressure coupling
TensorField velocity_bh_bach(const MetricField& g,
                             const CurvatureBundle& bundle,
                             int stencil_order = kDefaultStencilOrder);

// W^k = -g^{ij} lap(Gamma^k_ij(g) - Gamma^k_ij(bg)) + (n-2)/(2(n-1)) grad^k S,
// with lap the rough Laplacian acting on the connection difference.
TensorField deturck_vector_field(const MetricField& g,
                                 const CurvatureBundle& bundle,
                                 const MetricField& background,
                                 int stencil_order = kDefaultStencilOrder);

// modified velocity plus the Lie-derivative term grad_i W_j + grad_j W_i
TensorField velocity_deturck_cbf(const MetricField& g,
                                 const CurvatureBundle& bundle,
                                 const TensorField& p,
                                 const MetricField& background,
                                 int stencil_order = kDefaultStencilOrder);

// Velocity for `state.variant` from a precomputed bundle at state.g.
TensorField flow_velocity(const FlowState& state,
                          const CurvatureBundle& bundle, int stencil_order);

// Pressure for `g` within a flow: solves the constraint equation with the
// variant's right-hand side. Returns an empty field for bh_bach.
TensorField flow_pressure(const MetricField& g, const CurvatureBundle& bundle,
                          double s0, FlowVariant variant,
                          const PressureOptions& options, int stencil_order,
                          PressureSolution* info = nullptr);

// ---- stepping --------------------------------------------------------------

struct StepResult {
  FlowState state;          // advanced state, pressure re-solved at state.g
  CurvatureBundle bundle;   // bach-level bundle at state.g, reusable
  PressureSolution pressure;  // info from the final pressure solve
  double dt = 0.0;          // step actually taken
};

// One explicit RK step. The overload taking `bundle` expects a bach-level
// bundle at state.g (e.g. the previous StepResult's) and skips recomputing
// it. Pressure is re-solved at every stage; stage one reuses state.p. Throws
// SingularMetric or PressureError if a stage leaves the admissible set.
StepResult step(const FlowState& state, const StepPolicy& policy);
StepResult step(const FlowState& state, const StepPolicy& policy,
                const CurvatureBundle& bundle);

// ---- trajectories ----------------------------------------------------------

struct RunOptions {
  StepPolicy policy;
  std::int64_t record_every = 1;  // diagnostics cadence in steps
  int m_max = 2;
  double shi_k = 0.0;  // 0: take K from the first record's rm_sup + p_sup
  double k_observed0 = 0.0;  // running curvature+pressure max carried in
                             // from the rows before a resume
  bool emit_initial_record = true;  // false when resuming mid-trajectory
  MonitorThresholds thresholds;
};

struct RunSinks {
  // Called on every diagnostics record, including the t = 0 record.
  std::function<void(const DiagnosticsRecord&)> on_record;
  // Called every checkpoint_every accepted steps, and at termination.
  std::function<void(const FlowState&)> on_checkpoint;
  std::int64_t checkpoint_every = 0;  // 0 means never
};

struct Trajectory {
  std::vector<DiagnosticsRecord> records;
  FlowState final_state;
  bool completed = false;   // reached t_end or max_steps without error
  std::string error;        // exception name + message when !completed
  std::string error_kind;   // exception name, empty when completed
};

// Integrate from `initial` until policy.t_end or policy.max_steps. The t = 0
// record is always emitted. A terminal SingularMetric/PressureError stops the
// run and is reported in the trajectory (with a final record at the last
// admissible state) rather than rethrown.
Trajectory run(const FlowState& initial, const RunOptions& options,
               const RunSinks& sinks = {});

// ---- conformal projection --------------------------------------------------

struct ProjectionOptions {
  double tol = 1e-10;       // target for sup |S(g_out) - s0|
  int max_iterations = 40;
  PressureOptions linear;   // inner linear-solver controls
  int stencil_order = kDefaultStencilOrder;
};

// Conformal change g_out = e^{2u} g with S(g_out) = s0 (constant), by a
// damped Newton iteration on the conformal factor. Throws ProjectionDiverged
// when no admissible factor is found (e.g. s0 = +1 in a scalar-flat
// conformal class on the torus).
MetricField project_constant_scalar(const MetricField& g, double s0,
                                    const ProjectionOptions& options = {});
MetricField project_constant_scalar(const MetricField& g, double s0,
                                    double tol);

}  // namespace cbf
