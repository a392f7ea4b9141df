#include "cbf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cbf/kernels.hpp"
#include "cbf/mesh_ops.hpp"
#include "cbf/parallel.hpp"

namespace cbf {
namespace {

const kernels::Table& K() { return kernels::active(); }

void check_shi_args(const CurvatureBundle& bundle, int m, double t) {
  if (m < 1) throw std::invalid_argument("shi monitor: m must be >= 1");
  if (t < 0.0) throw std::invalid_argument("shi monitor: t must be >= 0");
  if (bundle.rm.rank() != 4 || bundle.gamma.rank() != 3)
    throw std::invalid_argument("shi monitor: bundle lacks gamma/rm");
}

// |grad^m Rm|^2 as a scalar field (chain of covariant derivatives).
TensorField grad_m_rm_norm_sq(const MetricField& g,
                              const CurvatureBundle& bundle, int m, int so) {
  TensorField T = bundle.rm;
  for (int j = 0; j < m; ++j) T = covariant_derivative(T, g, bundle.gamma, so);
  return pointwise_norm_sq(T, g);
}

double field_max(const TensorField& f) {
  return chunked_max_abs(f.comp(0), f.npoints());
}

}  // namespace

double shi_l2_monitor(const MetricField& g, const CurvatureBundle& bundle,
                      int m, double t, int stencil_order) {
  check_shi_args(bundle, m, t);
  const TensorField nsq = grad_m_rm_norm_sq(g, bundle, m, stencil_order);
  return std::pow(t, 0.5 * m) * integrate(nsq, g);
}

double shi_pointwise_monitor(const MetricField& g,
                             const CurvatureBundle& bundle, int m, double t,
                             double K, int stencil_order) {
  check_shi_args(bundle, m, t);
  if (K <= 0.0)
    throw std::invalid_argument("shi_pointwise_monitor: K must be > 0");
  if (t == 0.0) return 0.0;
  const TensorField nsq = grad_m_rm_norm_sq(g, bundle, m, stencil_order);
  const double sup = std::sqrt(field_max(nsq));
  return sup / std::pow(K + 1.0 / std::sqrt(t), 1.0 + 0.5 * m);
}

TensorField f_m_field(const MetricField& g, const CurvatureBundle& bundle,
                      int m, int stencil_order) {
  check_shi_args(bundle, m, 0.0);
  TensorField out = TensorField::zeros(g.grid(), 0);
  double* o = out.comp(0);
  const int64_t np = g.npoints();
  TensorField T = bundle.rm;
  for (int j = 1; j <= m; ++j) {
    T = covariant_derivative(T, g, bundle.gamma, stencil_order);
    const TensorField nsq = pointwise_norm_sq(T, g);
    const double* q = nsq.comp(0);
    const double expo = 1.0 / (2.0 + j);
    par::parallel_for(np, [&](int64_t lo, int64_t hi) {
      for (int64_t p = lo; p < hi; ++p) o[p] += std::pow(q[p], expo);
    });
  }
  return out;
}

double weyl_energy(const MetricField& g, const CurvatureBundle& bundle) {
  if (bundle.w.rank() != 4)
    throw std::invalid_argument("weyl_energy: bundle lacks the Weyl tensor");
  return integrate(pointwise_norm_sq(bundle.w, g), g);
}

ExtensionStatus extension_monitor(double k_observed_prev, double rm_sup,
                                  double p_sup, double pressure_margin,
                                  const MonitorThresholds& thresholds) {
  ExtensionStatus st;
  st.k_observed = std::max(k_observed_prev, rm_sup + p_sup);
  st.margin = pressure_margin;
  st.within_bounds =
      (thresholds.k_bound <= 0.0 || st.k_observed <= thresholds.k_bound) &&
      pressure_margin >= thresholds.margin_floor;
  return st;
}

DiagnosticsRecord compute_record(const RecordInputs& in) {
  const MetricField& g = in.g;
  const CurvatureBundle& bu = in.bundle;
  if (bu.level != BundleLevel::bach)
    throw std::invalid_argument("compute_record: bundle level must be bach");
  const int n = g.dim();
  const int64_t np = g.npoints();

  DiagnosticsRecord r;
  r.step = in.step;
  r.t = in.t;
  r.dt = in.dt;

  {
    const double* s = bu.s.comp(0);
    std::vector<double> drift(np);
    par::parallel_for(np, [&](int64_t lo, int64_t hi) {
      for (int64_t p = lo; p < hi; ++p) drift[p] = s[p] - in.s0;
    });
    r.s_drift_sup = chunked_max_abs(drift.data(), np);
  }

  {
    std::vector<double> tr(np, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        K().mul_add(tr.data(), g.ginv().at(i, j), bu.b.at(i, j), np);
    const double tr_sup = chunked_max_abs(tr.data(), np);
    const double b_sup = norms(bu.b, g).sup;
    r.bach_trace_rel = b_sup > 0.0 ? tr_sup / b_sup : 0.0;
  }

  r.bach_div_sup = field_max(bach_divergence_residual(g, bu, bu.stencil_order));

  {
    // div W + (n-3) C, derivative contracted on the first Weyl slot
    TensorField dw = covariant_derivative(bu.w, g, bu.gamma, bu.stencil_order);
    TensorField res = TensorField::zeros(g.grid(), 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double* d = res.at(i, j, k);
          for (int a = 0; a < n; ++a)
            for (int l = 0; l < n; ++l)
              K().mul_add(d, g.ginv().at(a, l), dw.at(a, l, i, j, k), np);
          K().axpy(d, bu.c.at(i, j, k), static_cast<double>(n - 3), np);
        }
    const double res_sup = norms(res, g).sup;
    const double c_sup = norms(bu.c, g).sup;
    r.cotton_weyl_rel = c_sup > 0.0 ? res_sup / c_sup : 0.0;
  }

  r.weyl_energy = weyl_energy(g, bu);

  const Norms rm_n = norms(bu.rm, g);
  r.rm_sup = rm_n.sup;
  r.rm_l2 = rm_n.l2;
  if (in.p && in.p->rank() == 0 && in.p->npoints() == np) {
    const Norms p_n = norms(*in.p, g);
    r.p_sup = p_n.sup;
    r.p_l2 = p_n.l2;
  }

  const double K_shi = in.shi_k > 0.0 ? in.shi_k : r.rm_sup + r.p_sup;
  TensorField T = bu.rm;
  TensorField fm = TensorField::zeros(g.grid(), 0);
  double* fmd = fm.comp(0);
  for (int m = 1; m <= in.m_max; ++m) {
    T = covariant_derivative(T, g, bu.gamma, bu.stencil_order);
    const TensorField nsq = pointwise_norm_sq(T, g);
    const double nsq_sup = field_max(nsq);
    r.shi_l2.push_back(std::pow(in.t, 0.5 * m) * integrate(nsq, g));
    r.shi_ptwise.push_back(
        in.t > 0.0 && K_shi > 0.0
            ? std::sqrt(nsq_sup) /
                  std::pow(K_shi + 1.0 / std::sqrt(in.t), 1.0 + 0.5 * m)
            : 0.0);
    const double* q = nsq.comp(0);
    const double expo = 1.0 / (2.0 + m);
    par::parallel_for(np, [&](int64_t lo, int64_t hi) {
      for (int64_t p = lo; p < hi; ++p) fmd[p] += std::pow(q[p], expo);
    });
  }
  T = TensorField();
  r.f_m_sup = field_max(fm);

  r.metric_eig_min = g.global_eig_min();

  if (in.psol) {
    r.pressure_iterations = in.psol->iterations;
    r.pressure_residual = in.psol->rel_residual;
    r.pressure_margin = in.psol->rayleigh_margin;
  }

  const ExtensionStatus st = extension_monitor(
      in.k_observed_prev, r.rm_sup, r.p_sup, r.pressure_margin, in.thresholds);
  r.extension_ok = st.within_bounds;
  return r;
}

std::string csv_header(int m_max) {
  std::string h = "step,t,dt,s_drift_sup,bach_trace_rel,bach_div_sup,"
                  "cotton_weyl_rel,weyl_energy,rm_sup,p_sup,rm_l2,p_l2";
  char buf[48];
  for (int m = 1; m <= m_max; ++m) {
    std::snprintf(buf, sizeof buf, ",shi_l2_%d", m);
    h += buf;
  }
  for (int m = 1; m <= m_max; ++m) {
    std::snprintf(buf, sizeof buf, ",shi_ptwise_%d", m);
    h += buf;
  }
  h += ",f_m_sup,metric_eig_min,pressure_iterations,pressure_residual,"
       "pressure_margin,extension_ok";
  return h;
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::string out;
  char buf[40];
  auto add_i = [&](long long v) {
    std::snprintf(buf, sizeof buf, "%lld", v);
    if (!out.empty()) out += ',';
    out += buf;
  };
  auto add_d = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += ',';
    out += buf;
  };
  add_i(r.step);
  add_d(r.t);
  add_d(r.dt);
  add_d(r.s_drift_sup);
  add_d(r.bach_trace_rel);
  add_d(r.bach_div_sup);
  add_d(r.cotton_weyl_rel);
  add_d(r.weyl_energy);
  add_d(r.rm_sup);
  add_d(r.p_sup);
  add_d(r.rm_l2);
  add_d(r.p_l2);
  for (double v : r.shi_l2) add_d(v);
  for (double v : r.shi_ptwise) add_d(v);
  add_d(r.f_m_sup);
  add_d(r.metric_eig_min);
  add_i(r.pressure_iterations);
  add_d(r.pressure_residual);
  add_d(r.pressure_margin);
  add_i(r.extension_ok ? 1 : 0);
  return out;
}

}  // namespace cbf
