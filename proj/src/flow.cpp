#include "cbf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cbf/errors.hpp"
#include "cbf/kernels.hpp"
#include "cbf/mesh_ops.hpp"
#include "cbf/parallel.hpp"

namespace cbf {
namespace {

const kernels::Table& K() { return kernels::active(); }

bool needs_pressure(FlowVariant v) { return v != FlowVariant::bh_bach; }

bool valid_scalar(const TensorField& p, std::int64_t np) {
  return p.nvalues() == np && p.rank() == 0;
}

void check_bundle(const CurvatureBundle& bundle, const MetricField& g,
                  const char* who) {
  if (bundle.level != BundleLevel::bach || bundle.b.rank() != 2 ||
      bundle.b.grid().get() != g.grid().get())
    throw std::invalid_argument(std::string(who) +
                                ": needs a bach-level bundle at g");
}

// v_ij += coef * f * g_ij over the canonical triangle.
void add_scalar_times_metric(TensorField& v, const TensorField& f,
                             const MetricField& g, double coef) {
  const int n = g.dim();
  const std::int64_t np = g.npoints();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      K().mul_axpy(v.at(i, j), f.comp(0), g.g().at(i, j), coef, np);
}

// Lowered DeTurck field W_l = -g^{ij} (lap D)_{lij} + (n-2)/(2(n-1)) d_l S,
// where D_{lij} = g_{lk} (Gamma^k_ij(g) - Gamma^k_ij(bg)) and lap is the
// rough Laplacian g^{ab} grad_a grad_b acting on D as a covariant 3-tensor.
TensorField deturck_w_low(const MetricField& g, const CurvatureBundle& bundle,
                          const MetricField& background, int so) {
  const int n = g.dim();
  const std::int64_t np = g.npoints();
  if (background.grid().get() != g.grid().get())
    throw std::invalid_argument(
        "deturck_vector_field: background must share g's grid");

  TensorField diff = christoffel(background, so);
  field_sub(diff, bundle.gamma, diff);

  TensorField dlow = TensorField::zeros(g.grid(), 3);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double* d = dlow.at(l, i, j);
        for (int k = 0; k < n; ++k)
          K().mul_add(d, g.g().at(l, k), diff.at(k, i, j), np);
      }
  diff = TensorField();

  TensorField d1 = covariant_derivative(dlow, g, bundle.gamma, so);
  dlow = TensorField();
  TensorField d2 = covariant_derivative(d1, g, bundle.gamma, so);
  d1 = TensorField();

  TensorField lap = TensorField::zeros(g.grid(), 3);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double* d = lap.at(l, i, j);
        for (int b = 0; b < n; ++b)
          for (int a = 0; a < n; ++a)
            K().mul_add(d, g.ginv().at(b, a), d2.at(b, a, l, i, j), np);
      }
  d2 = TensorField();

  TensorField w = TensorField::zeros(g.grid(), 1);
  for (int l = 0; l < n; ++l) {
    double* d = w.comp(l);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        K().mul_add(d, g.ginv().at(i, j), lap.at(l, i, j), np);
    K().scale(d, d, -1.0, np);
  }
  const TensorField ds = coordinate_gradient(bundle.s, so);
  const double cs = (n - 2) / (2.0 * (n - 1));
  for (int l = 0; l < n; ++l) K().axpy(w.comp(l), ds.comp(l), cs, np);
  return w;
}

TensorField variant_velocity(const MetricField& g,
                             const CurvatureBundle& bundle,
                             const TensorField& p, FlowVariant variant,
                             const MetricField* background, int so) {
  switch (variant) {
    case FlowVariant::cbf:
      return velocity_cbf(g, bundle, p);
    case FlowVariant::modified_cbf:
      return velocity_modified_cbf(g, bundle, p, so);
    case FlowVariant::bh_bach:
      return velocity_bh_bach(g, bundle, so);
    case FlowVariant::deturck_cbf:
      if (!background)
        throw std::invalid_argument(
            "deturck_cbf requires a background metric");
      return velocity_deturck_cbf(g, bundle, p, *background, so);
  }
  throw std::invalid_argument("unknown flow variant");
}

MetricField advance_metric(const MetricField& g0, const TensorField& v,
                           double coef) {
  TensorField comps = g0.g();
  field_axpy(comps, v, coef);
  return MetricField::from_components(std::move(comps));
}

double active_min_spacing(const Grid& grid) {
  double h = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.dim(); ++a)
    if (grid.size(a) > 1) h = std::min(h, grid.spacing(a));
  return std::isfinite(h) ? h : grid.min_spacing();
}

}  // namespace

const char* to_string(FlowVariant v) {
  switch (v) {
    case FlowVariant::cbf: return "cbf";
    case FlowVariant::modified_cbf: return "modified_cbf";
    case FlowVariant::deturck_cbf: return "deturck_cbf";
    case FlowVariant::bh_bach: return "bh_bach";
  }
  return "cbf";
}

FlowVariant flow_variant_from_string(const std::string& name) {
  if (name == "cbf") return FlowVariant::cbf;
  if (name == "modified_cbf") return FlowVariant::modified_cbf;
  if (name == "deturck_cbf") return FlowVariant::deturck_cbf;
  if (name == "bh_bach") return FlowVariant::bh_bach;
  throw std::invalid_argument("unknown flow variant: " + name);
}

const char* to_string(TimeScheme s) {
  return s == TimeScheme::rk4 ? "rk4" : "rk2";
}

TimeScheme time_scheme_from_string(const std::string& name) {
  if (name == "rk2") return TimeScheme::rk2;
  if (name == "rk4") return TimeScheme::rk4;
  throw std::invalid_argument("unknown time scheme: " + name);
}

TensorField velocity_cbf(const MetricField& g, const CurvatureBundle& bundle,
                         const TensorField& p) {
  check_bundle(bundle, g, "velocity_cbf");
  const int n = g.dim();
  const std::int64_t np = g.npoints();
  if (!valid_scalar(p, np))
    throw std::invalid_argument("velocity_cbf: scalar pressure field required");
  TensorField v = TensorField::zeros(g.grid(), 2, Sym::sym_pair);
  const double c = 2.0 * (n - 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) K().axpy(v.at(i, j), bundle.b.at(i, j), c, np);
  add_scalar_times_metric(v, p, g, c);
  v.fill_from_canonical();
  return v;
}

TensorField velocity_modified_cbf(const MetricField& g,
                                  const CurvatureBundle& bundle,
                                  const TensorField& p, int stencil_order) {
  TensorField v = velocity_cbf(g, bundle, p);
  const TensorField lap_s = laplace_beltrami(g, bundle.s, stencil_order);
  add_scalar_times_metric(v, lap_s, g, 1.0 / (g.dim() - 1));
  v.fill_from_canonical();
  return v;
}

TensorField velocity_bh_bach(const MetricField& g,
                             const CurvatureBundle& bundle,
                             int stencil_order) {
  check_bundle(bundle, g, "velocity_bh_bach");
  const int n = g.dim();
  const std::int64_t np = g.npoints();
  TensorField v = TensorField::zeros(g.grid(), 2, Sym::sym_pair);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      K().axpy(v.at(i, j), bundle.b.at(i, j), 1.0, np);
  const TensorField lap_s = laplace_beltrami(g, bundle.s, stencil_order);
  add_scalar_times_metric(v, lap_s, g, 1.0 / (2.0 * (n - 1) * (n - 2)));
  v.fill_from_canonical();
  return v;
}

TensorField deturck_vector_field(const MetricField& g,
                                 const CurvatureBundle& bundle,
                                 const MetricField& background,
                                 int stencil_order) {
  check_bundle(bundle, g, "deturck_vector_field");
  return raise_slot(deturck_w_low(g, bundle, background, stencil_order), g, 0);
}

TensorField velocity_deturck_cbf(const MetricField& g,
                                 const CurvatureBundle& bundle,
                                 const TensorField& p,
                                 const MetricField& background,
                                 int stencil_order) {
  TensorField v = velocity_modified_cbf(g, bundle, p, stencil_order);
  const TensorField wlow = deturck_w_low(g, bundle, background, stencil_order);
  const TensorField dw =
      covariant_derivative(wlow, g, bundle.gamma, stencil_order);
  const int n = g.dim();
  const std::int64_t np = g.npoints();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double* d = v.at(i, j);
      K().axpy(d, dw.at(i, j), 1.0, np);
      K().axpy(d, dw.at(j, i), 1.0, np);
    }
  v.fill_from_canonical();
  return v;
}

TensorField flow_velocity(const FlowState& state,
                          const CurvatureBundle& bundle, int stencil_order) {
  return variant_velocity(state.g, bundle, state.p, state.variant,
                          state.background.get(), stencil_order);
}

TensorField flow_pressure(const MetricField& g, const CurvatureBundle& bundle,
                          double s0, FlowVariant variant,
                          const PressureOptions& options, int stencil_order,
                          PressureSolution* info) {
  if (!needs_pressure(variant)) {
    if (info) *info = PressureSolution{};
    return TensorField();
  }
  check_bundle(bundle, g, "flow_pressure");
  const TensorField rhs = pressure_rhs(g, bundle, stencil_order);
  // On the constraint manifold the continuum right-hand side is compatible
  // by construction, so at s0 = 0 the discrete mean is truncation noise:
  // project it out and report it instead of policing the ratio.
  PressureOptions po = options;
  po.compat_tol = std::numeric_limits<double>::infinity();
  PressureSolution sol = solve_pressure(g, s0, rhs, po, stencil_order);
  if (info) {
    info->iterations = sol.iterations;
    info->rel_residual = sol.rel_residual;
    info->rayleigh_margin = sol.rayleigh_margin;
    info->compat_defect = sol.compat_defect;
    info->p = TensorField();
  }
  return std::move(sol.p);
}

StepResult step(const FlowState& state, const StepPolicy& policy) {
  return step(state, policy,
              make_bundle(state.g, BundleLevel::bach, policy.stencil_order));
}

StepResult step(const FlowState& state, const StepPolicy& policy,
                const CurvatureBundle& bundle) {
  const MetricField& g0 = state.g;
  check_bundle(bundle, g0, "step");
  const int so = policy.stencil_order;
  const std::int64_t np = g0.npoints();
  const bool with_p = needs_pressure(state.variant);
  if (with_p && !valid_scalar(state.p, np))
    throw std::invalid_argument(
        "step: state.p must hold the pressure solved at state.g");

  const double rm_sup = norms(bundle.rm, g0).sup;
  const double h = active_min_spacing(*g0.grid());
  double dt = policy.c_cfl * h * h * h * h / std::max(1.0, rm_sup);
  bool clipped = false;
  if (policy.t_end > 0.0) {
    const double rem = policy.t_end - state.t;
    if (rem <= 0.0)
      throw std::invalid_argument("step: state.t is already at t_end");
    if (dt >= rem) {
      dt = rem;
      clipped = true;
    }
  }

  const MetricField* bg = state.background.get();
  PressureOptions po = policy.pressure;
  PressureSolution info{};

  MetricField g_new;
  TensorField p_new;
  CurvatureBundle b_new;

  auto stage = [&](const MetricField& gs, const TensorField& p_warm,
                   CurvatureBundle& bs, TensorField& ps) {
    bs = make_bundle(gs, BundleLevel::bach, so);
    po.initial_guess = with_p && valid_scalar(p_warm, np) ? &p_warm : nullptr;
    ps = flow_pressure(gs, bs, state.s0, state.variant, po, so, nullptr);
  };

  if (policy.scheme == TimeScheme::rk2) {
    const TensorField k1 =
        variant_velocity(g0, bundle, state.p, state.variant, bg, so);
    const MetricField g_mid = advance_metric(g0, k1, 0.5 * dt);
    CurvatureBundle b_mid;
    TensorField p_mid;
    stage(g_mid, state.p, b_mid, p_mid);
    const TensorField k2 =
        variant_velocity(g_mid, b_mid, p_mid, state.variant, bg, so);
    g_new = advance_metric(g0, k2, dt);
    b_new = make_bundle(g_new, BundleLevel::bach, so);
    po.initial_guess = with_p ? &p_mid : nullptr;
    p_new = flow_pressure(g_new, b_new, state.s0, state.variant, po, so, &info);
  } else {
    const TensorField k1 =
        variant_velocity(g0, bundle, state.p, state.variant, bg, so);
    TensorField sum = k1;  // k1 + 2 k2 + 2 k3 + k4 accumulates here

    MetricField gs = advance_metric(g0, k1, 0.5 * dt);
    CurvatureBundle bs;
    TensorField ps;
    stage(gs, state.p, bs, ps);
    TensorField k = variant_velocity(gs, bs, ps, state.variant, bg, so);
    field_axpy(sum, k, 2.0);

    gs = advance_metric(g0, k, 0.5 * dt);
    TensorField p_prev = std::move(ps);
    stage(gs, p_prev, bs, ps);
    k = variant_velocity(gs, bs, ps, state.variant, bg, so);
    field_axpy(sum, k, 2.0);

    gs = advance_metric(g0, k, dt);
    p_prev = std::move(ps);
    stage(gs, p_prev, bs, ps);
    k = variant_velocity(gs, bs, ps, state.variant, bg, so);
    field_axpy(sum, k, 1.0);
    bs = CurvatureBundle{};

    g_new = advance_metric(g0, sum, dt / 6.0);
    b_new = make_bundle(g_new, BundleLevel::bach, so);
    po.initial_guess = with_p ? &ps : nullptr;
    p_new = flow_pressure(g_new, b_new, state.s0, state.variant, po, so, &info);
  }

  StepResult out;
  out.state.t = clipped ? policy.t_end : state.t + dt;
  out.state.step = state.step + 1;
  out.state.g = std::move(g_new);
  out.state.p = std::move(p_new);
  out.state.s0 = state.s0;
  out.state.variant = state.variant;
  out.state.background = state.background;
  out.bundle = std::move(b_new);
  out.pressure = std::move(info);
  out.dt = dt;
  return out;
}

Trajectory run(const FlowState& initial, const RunOptions& options,
               const RunSinks& sinks) {
  const StepPolicy& policy = options.policy;
  const int so = policy.stencil_order;
  Trajectory traj;
  FlowState st = initial;
  CurvatureBundle bundle = make_bundle(st.g, BundleLevel::bach, so);
  PressureSolution cur_psol{};

  if (needs_pressure(st.variant) && !valid_scalar(st.p, st.g.npoints()))
    st.p = flow_pressure(st.g, bundle, st.s0, st.variant, policy.pressure, so,
                         &cur_psol);

  double shi_k = options.shi_k;
  double k_obs = options.k_observed0;
  std::int64_t last_recorded = -1;
  double last_dt = 0.0;

  auto emit = [&](bool force) {
    if (!force && last_recorded == st.step) return;
    RecordInputs in{st.g,
                    bundle,
                    st.s0,
                    st.step,
                    st.t,
                    last_dt,
                    needs_pressure(st.variant) ? &st.p : nullptr,
                    &cur_psol,
                    options.m_max,
                    shi_k,
                    k_obs,
                    options.thresholds};
    DiagnosticsRecord rec = compute_record(in);
    if (shi_k <= 0.0) shi_k = rec.rm_sup + rec.p_sup;
    k_obs = std::max(k_obs, rec.rm_sup + rec.p_sup);
    last_recorded = st.step;
    traj.records.push_back(rec);
    if (sinks.on_record) sinks.on_record(rec);
  };

  if (options.emit_initial_record)
    emit(true);
  else if (shi_k <= 0.0)
    throw std::invalid_argument(
        "run: resuming without an initial record requires an explicit shi_k");

  std::int64_t taken = 0;
  bool done = (policy.t_end <= 0.0 && policy.max_steps <= 0) ||
              (policy.t_end > 0.0 && st.t >= policy.t_end);
  traj.completed = true;
  while (!done) {
    try {
      StepResult sr = step(st, policy, bundle);
      st = std::move(sr.state);
      bundle = std::move(sr.bundle);
      cur_psol = std::move(sr.pressure);
      last_dt = sr.dt;
      ++taken;
    } catch (const SingularMetric& e) {
      traj.completed = false;
      traj.error = e.what();
      traj.error_kind = SingularMetric::name();
    } catch (const PressureError& e) {
      traj.completed = false;
      traj.error = e.what();
      traj.error_kind = e.name();
    }
    if (!traj.completed) break;
    done = (policy.t_end > 0.0 && st.t >= policy.t_end) ||
           (policy.max_steps > 0 && taken >= policy.max_steps);
    if (done || options.record_every <= 0 ||
        taken % options.record_every == 0)
      emit(false);
    if (sinks.on_checkpoint && sinks.checkpoint_every > 0 &&
        (done || taken % sinks.checkpoint_every == 0))
      sinks.on_checkpoint(st);
  }
  // terminal error: make sure the last admissible state has a row
  if (!traj.completed) {
    emit(false);
    if (sinks.on_checkpoint && sinks.checkpoint_every > 0)
      sinks.on_checkpoint(st);
  }
  traj.final_state = std::move(st);
  return traj;
}

// ---- conformal projection --------------------------------------------------

namespace {

// Substitute-equation residual F(w) = -c lap w + S w - s0 w^q on g_in,
// with q = (n+2)/(n-2), c = 4(n-1)/(n-2).
TensorField yamabe_residual(const MetricField& g, const TensorField& s_base,
                            const TensorField& w, double s0, double c,
                            double q, int so) {
  const std::int64_t np = g.npoints();
  TensorField f = laplace_beltrami(g, w, so);
  double* fd = f.comp(0);
  K().scale(fd, fd, -c, np);
  K().mul_add(fd, s_base.comp(0), w.comp(0), np);
  const double* wd = w.comp(0);
  par::parallel_for(np, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p)
      fd[p] -= s0 * std::pow(wd[p], q);
  });
  return f;
}

MetricField conformal_metric(const MetricField& g, const TensorField& w,
                             double expo) {
  const int n = g.dim();
  const std::int64_t np = g.npoints();
  const double* wd = w.comp(0);
  std::vector<double> factor(np);
  par::parallel_for(np, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p)
      factor[p] = std::pow(wd[p], expo);
  });
  TensorField comps = TensorField::zeros(g.grid(), 2, Sym::sym_pair);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      K().mul(comps.at(i, j), factor.data(), g.g().at(i, j), np);
  comps.fill_from_canonical();
  return MetricField::from_components(std::move(comps));
}

double sup_drift(const MetricField& g_out, double s0, int so) {
  const TensorField gamma = christoffel(g_out, so);
  const TensorField rm = riemann(g_out, gamma, so);
  TensorField rc, s, a;
  ricci_scalar_schouten(g_out, rm, rc, s, a);
  const std::int64_t np = g_out.npoints();
  const double* sd = s.comp(0);
  std::vector<double> drift(np);
  par::parallel_for(np, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p) drift[p] = sd[p] - s0;
  });
  return chunked_max_abs(drift.data(), np);
}

}  // namespace

MetricField project_constant_scalar(const MetricField& g, double s0,
                                    const ProjectionOptions& options) {
  if (!(options.tol > 0.0))
    throw std::invalid_argument("project_constant_scalar: tol must be > 0");
  const int n = g.dim();
  if (n < 3)
    throw std::invalid_argument(
        "project_constant_scalar: needs dimension >= 3");
  const int so = options.stencil_order;
  const std::int64_t np = g.npoints();
  const double c = 4.0 * (n - 1) / (n - 2);
  const double q = double(n + 2) / (n - 2);
  const double expo = 4.0 / (n - 2);  // g_out = w^expo * g

  // base scalar curvature
  TensorField s_base;
  {
    const TensorField gamma = christoffel(g, so);
    const TensorField rm = riemann(g, gamma, so);
    TensorField rc, a;
    ricci_scalar_schouten(g, rm, rc, s_base, a);
  }

  // start from the constant best matching the mean curvature when the signs
  // allow it, otherwise from w = 1
  TensorField w = TensorField::zeros(g.grid(), 0);
  {
    double w0 = 1.0;
    if (s0 != 0.0) {
      TensorField one = TensorField::zeros(g.grid(), 0);
      std::fill(one.comp(0), one.comp(0) + np, 1.0);
      const double s_mean = integrate(s_base, g) / integrate(one, g);
      if (s_mean / s0 > 0.0) w0 = std::pow(s_mean / s0, 1.0 / (q - 1.0));
    }
    std::fill(w.comp(0), w.comp(0) + np, w0);
  }

  TensorField resid = yamabe_residual(g, s_base, w, s0, c, q, so);
  double res_sup = chunked_max_abs(resid.comp(0), np);
  const double res_scale = std::max(
      {res_sup, std::abs(s0), chunked_max_abs(s_base.comp(0), np), 1e-30});
  MetricField g_out = conformal_metric(g, w, expo);
  double drift = sup_drift(g_out, s0, so);
  if (drift <= options.tol) return g_out;

  double best_drift = drift;
  for (int it = 1; it <= options.max_iterations; ++it) {
    // stagnation at the substitute equation's rounding floor
    if (res_sup <= 1e-13 * res_scale) break;

    // Newton direction: (-c lap + V) delta = -F, V = S - q s0 w^{q-1}
    TensorField pot = TensorField::zeros(g.grid(), 0);
    {
      double* vd = pot.comp(0);
      const double* sd = s_base.comp(0);
      const double* wd = w.comp(0);
      par::parallel_for(np, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t p = lo; p < hi; ++p)
          vd[p] = sd[p] - q * s0 * std::pow(wd[p], q - 1.0);
      });
    }
    TensorField rhs = TensorField::zeros(g.grid(), 0);
    K().scale(rhs.comp(0), resid.comp(0), -1.0, np);
    PressureSolution lin;
    try {
      lin = solve_helmholtz(g, -c, pot, rhs, options.linear, so);
    } catch (const PressureError& e) {
      throw ProjectionDiverged(
          std::string("constant-scalar projection: Newton linear solve "
                      "failed (") +
              e.name() + "): " + e.what(),
          it, drift);
    }

    // damped update keeping w > 0 and the substitute residual decreasing
    double lambda = 1.0;
    TensorField w_try = TensorField::zeros(g.grid(), 0);
    bool accepted = false;
    for (int half = 0; half < 14; ++half, lambda *= 0.5) {
      K().scale(w_try.comp(0), lin.p.comp(0), lambda, np);
      K().axpy(w_try.comp(0), w.comp(0), 1.0, np);
      const double* wd = w_try.comp(0);
      const double wmin = *std::min_element(wd, wd + np);
      if (!(wmin > 0.0)) continue;
      TensorField r_try = yamabe_residual(g, s_base, w_try, s0, c, q, so);
      const double r_sup = chunked_max_abs(r_try.comp(0), np);
      if (r_sup < res_sup || r_sup <= 1e-13 * res_scale) {
        w = std::move(w_try);
        resid = std::move(r_try);
        res_sup = r_sup;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw ProjectionDiverged(
          "constant-scalar projection: damped Newton failed to reduce the "
          "residual (no admissible conformal factor found at this "
          "resolution)",
          it, drift);

    g_out = conformal_metric(g, w, expo);
    drift = sup_drift(g_out, s0, so);
    best_drift = std::min(best_drift, drift);
    if (drift <= options.tol) return g_out;
  }

  if (drift <= options.tol) return g_out;
  throw ProjectionDiverged(
      "constant-scalar projection: converged to sup|S - s0| = " +
          std::to_string(best_drift) + " > tol",
      options.max_iterations, best_drift);
}

MetricField project_constant_scalar(const MetricField& g, double s0,
                                    double tol) {
  ProjectionOptions opt;
  opt.tol = tol;
  return project_constant_scalar(g, s0, opt);
}

}  // namespace cbf
