#include "cbf/oracle.hpp"

#include <cmath>
#include <cstring>

#include "cbf/errors.hpp"
#include "cbf/jet.hpp"
#include "cbf/parallel.hpp"

namespace cbf {

namespace {

constexpr double kTau = 6.2831853071795864769;  // 2*pi

double mode_angular(const WaveMode& m, int a, const std::vector<double>& L) {
  return kTau * m.k[a] / L[a];
}

Jet mode_sum_jet(const std::vector<WaveMode>& modes, const double* x,
                 const std::vector<double>& L, const JetContext* ctx) {
  const int n = ctx->n();
  Jet u(ctx);
  for (const WaveMode& m : modes) {
    Jet l = Jet::constant(ctx, m.phase);
    for (int a = 0; a < n; ++a)
      if (m.k[a] != 0) l += Jet::variable(ctx, a, x[a]) * mode_angular(m, a, L);
    u += jsin(l) * m.amp;
  }
  return u;
}

std::vector<Jet> metric_jets(const AnalyticFamily& fam, const double* x,
                             const JetContext* ctx) {
  const int n = fam.n;
  std::vector<Jet> g(n * n, Jet(ctx));
  switch (fam.tag) {
    case AnalyticFamily::Tag::flat:
      for (int i = 0; i < n; ++i) g[i * n + i] = Jet::constant(ctx, fam.scale);
      break;
    case AnalyticFamily::Tag::constant_diagonal:
      for (int i = 0; i < n; ++i)
        g[i * n + i] = Jet::constant(ctx, fam.scale * fam.diag[i]);
      break;
    case AnalyticFamily::Tag::conformally_flat: {
      Jet f = jexp(mode_sum_jet(fam.u_modes, x, fam.periods, ctx) * 2.0);
      f *= fam.scale;
      for (int i = 0; i < n; ++i) g[i * n + i] = f;
      break;
    }
    case AnalyticFamily::Tag::doubly_warped: {
      Jet fu = jexp(mode_sum_jet(fam.u_modes, x, fam.periods, ctx) * 2.0);
      Jet fv = jexp(mode_sum_jet(fam.v_modes, x, fam.periods, ctx) * 2.0);
      fu *= fam.scale;
      fv *= fam.scale;
      for (int i = 0; i < n; ++i) g[i * n + i] = (i < fam.split) ? fu : fv;
      break;
    }
    case AnalyticFamily::Tag::off_diagonal_perturbation: {
      Jet p = mode_sum_jet(fam.offd_modes, x, fam.periods, ctx);
      p *= fam.scale;
      for (int i = 0; i < n; ++i) g[i * n + i] = Jet::constant(ctx, fam.scale);
      g[fam.offd_i * n + fam.offd_j] = p;
      g[fam.offd_j * n + fam.offd_i] = p;
      break;
    }
  }
  return g;
}

// lowered rank-r tensor -> rank r+1, derivative index first:
// out[a, c...] = d_a T_c - sum_slots Gamma^p_{a i_s} T_{c|i_s->p}
std::vector<Jet> covd(const std::vector<Jet>& T, int rank,
                      const std::vector<Jet>& gamma, int n,
                      const JetContext* ctx) {
  int64_t nc = 1;
  for (int r = 0; r < rank; ++r) nc *= n;
  std::vector<Jet> out(n * nc, Jet(ctx));
  for (int a = 0; a < n; ++a)
    for (int64_t c = 0; c < nc; ++c) {
      Jet v = jderiv(T[c], a);
      int64_t stride = nc / n;
      for (int s = 0; s < rank; ++s) {
        const int is = static_cast<int>((c / stride) % n);
        const int64_t base = c - is * stride;
        for (int p = 0; p < n; ++p)
          jmul_sub(v, gamma[(p * n + a) * n + is], T[base + p * stride]);
        stride /= n;
      }
      out[a * nc + c] = std::move(v);
    }
  return out;
}

void extract(const std::vector<Jet>& src, std::vector<double>& dst) {
  dst.resize(src.size());
  for (size_t i = 0; i < src.size(); ++i) dst[i] = src[i].value();
}

}  // namespace

double mode_sum(const std::vector<WaveMode>& modes, const double* x,
                const std::vector<double>& periods) {
  double u = 0.0;
  for (const WaveMode& m : modes) {
    double l = m.phase;
    for (size_t a = 0; a < periods.size(); ++a)
      l += mode_angular(m, static_cast<int>(a), periods) * x[a];
    u += m.amp * std::sin(l);
  }
  return u;
}

void AnalyticFamily::validate() const {
  if (n < 4 || n > 8) throw ConfigError("family dimension must be in [4, 8]");
  if (static_cast<int>(periods.size()) != n)
    throw ConfigError("family periods must have one entry per axis");
  for (double L : periods)
    if (!(L > 0.0)) throw ConfigError("family periods must be positive");
  if (!(scale > 0.0)) throw ConfigError("family scale must be positive");
  auto check_modes = [&](const std::vector<WaveMode>& ms, const char* name) {
    for (const WaveMode& m : ms)
      if (static_cast<int>(m.k.size()) != n)
        throw ConfigError(std::string(name) +
                          " mode needs one wavenumber per axis");
  };
  check_modes(u_modes, "u");
  check_modes(v_modes, "v");
  check_modes(offd_modes, "off-diagonal");
  switch (tag) {
    case Tag::flat:
      break;
    case Tag::constant_diagonal:
      if (static_cast<int>(diag.size()) != n)
        throw ConfigError("constant_diagonal needs n diagonal entries");
      for (double d : diag)
        if (!(d > 0.0)) throw ConfigError("diagonal entries must be positive");
      break;
    case Tag::conformally_flat:
      break;
    case Tag::doubly_warped:
      if (split < 1 || split >= n)
        throw ConfigError("doubly_warped split must satisfy 1 <= split < n");
      break;
    case Tag::off_diagonal_perturbation: {
      if (offd_i < 0 || offd_j < 0 || offd_i >= n || offd_j >= n ||
          offd_i == offd_j)
        throw ConfigError("off-diagonal pair must be two distinct axes");
      double total = 0.0;
      for (const WaveMode& m : offd_modes) total += std::fabs(m.amp);
      if (total > 0.5)
        throw ConfigError(
            "off-diagonal amplitude bound |amp| <= 0.5 violated (SPD)");
      break;
    }
  }
}

void family_metric_values(const AnalyticFamily& fam, const double* x,
                          double* g_out) {
  const int n = fam.n;
  std::memset(g_out, 0, sizeof(double) * n * n);
  switch (fam.tag) {
    case AnalyticFamily::Tag::flat:
      for (int i = 0; i < n; ++i) g_out[i * n + i] = fam.scale;
      break;
    case AnalyticFamily::Tag::constant_diagonal:
      for (int i = 0; i < n; ++i) g_out[i * n + i] = fam.scale * fam.diag[i];
      break;
    case AnalyticFamily::Tag::conformally_flat: {
      const double f =
          fam.scale * std::exp(2.0 * mode_sum(fam.u_modes, x, fam.periods));
      for (int i = 0; i < n; ++i) g_out[i * n + i] = f;
      break;
    }
    case AnalyticFamily::Tag::doubly_warped: {
      const double fu =
          fam.scale * std::exp(2.0 * mode_sum(fam.u_modes, x, fam.periods));
      const double fv =
          fam.scale * std::exp(2.0 * mode_sum(fam.v_modes, x, fam.periods));
      for (int i = 0; i < n; ++i)
        g_out[i * n + i] = (i < fam.split) ? fu : fv;
      break;
    }
    case AnalyticFamily::Tag::off_diagonal_perturbation: {
      const double p = fam.scale * mode_sum(fam.offd_modes, x, fam.periods);
      for (int i = 0; i < n; ++i) g_out[i * n + i] = fam.scale;
      g_out[fam.offd_i * n + fam.offd_j] = p;
      g_out[fam.offd_j * n + fam.offd_i] = p;
      break;
    }
  }
}

MetricField sample_to_grid(const AnalyticFamily& fam, GridPtr grid) {
  fam.validate();
  if (fam.n != grid->dim())
    throw ConfigError("family dimension does not match the grid");
  for (int a = 0; a < fam.n; ++a)
    if (fam.periods[a] != grid->period(a))
      throw ConfigError("family periods must match the grid periods");
  const int n = fam.n;
  TensorField g = TensorField::zeros(grid, 2, Sym::sym_pair);
  const int64_t np = grid->npoints();
  par::parallel_for(np, [&](int64_t pb, int64_t pe) {
    double x[8];
    std::vector<double> gv(n * n);
    for (int64_t p = pb; p < pe; ++p) {
      grid->point_coords(p, x);
      family_metric_values(fam, x, gv.data());
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) g.at(i, j)[p] = gv[i * n + j];
    }
  });
  g.fill_from_canonical();
  return MetricField::from_components(std::move(g));
}

PointBundle oracle_bundle_at(const AnalyticFamily& fam, const double* x,
                             const OracleOptions& opt) {
  fam.validate();
  const int n = fam.n;
  int order = 4;
  if (opt.divergence) order = 5;
  if (opt.rhs) order = 6;
  if (opt.order > order) order = opt.order;
  const JetContext* ctx = &JetContext::get(n, order);

  PointBundle out;
  out.n = n;

  // metric, inverse, first derivatives
  std::vector<Jet> g = metric_jets(fam, x, ctx);
  std::vector<Jet> ginv(n * n, Jet(ctx));
  jmat_inverse(n, g.data(), ginv.data());
  std::vector<Jet> dg(n * n * n, Jet(ctx));
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dg[(a * n + i) * n + j] = jderiv(g[i * n + j], a);

  // Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
  std::vector<Jet> gamma(n * n * n, Jet(ctx));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet acc(ctx);
        for (int l = 0; l < n; ++l) {
          Jet t = dg[(i * n + j) * n + l];
          t += dg[(j * n + i) * n + l];
          t -= dg[(l * n + i) * n + j];
          jmul_acc(acc, ginv[k * n + l], t);
        }
        acc *= 0.5;
        gamma[(k * n + j) * n + i] = acc;
        gamma[(k * n + i) * n + j] = std::move(acc);
      }

  // R^m_ijk = d_j Gamma^m_ik - d_i Gamma^m_jk + Gamma^m_jp Gamma^p_ik
  //           - Gamma^m_ip Gamma^p_jk, lowered with g_lm.  Sign fixed so
  //   Rc_ij = g^{kl} R_ikjl gives S > 0 on positively curved metrics and
  //   the conformal closed-form scalar curvature comes out with its
  //   standard sign.
  std::vector<Jet> rup(n * n * n * n, Jet(ctx));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          Jet v = jderiv(gamma[(m * n + i) * n + k], j) -
                  jderiv(gamma[(m * n + j) * n + k], i);
          for (int p = 0; p < n; ++p) {
            jmul_acc(v, gamma[(m * n + j) * n + p], gamma[(p * n + i) * n + k]);
            jmul_sub(v, gamma[(m * n + i) * n + p], gamma[(p * n + j) * n + k]);
          }
          rup[((m * n + i) * n + j) * n + k] = std::move(v);
        }
  std::vector<Jet> rm(n * n * n * n, Jet(ctx));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Jet v(ctx);
          for (int m = 0; m < n; ++m)
            jmul_acc(v, g[l * n + m], rup[((m * n + i) * n + j) * n + k]);
          rm[((i * n + j) * n + k) * n + l] = std::move(v);
        }
  rup.clear();
  rup.shrink_to_fit();

  // Rc_ij = g^{kl} R_ikjl, S, Schouten
  std::vector<Jet> rc(n * n, Jet(ctx));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet v(ctx);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          jmul_acc(v, ginv[k * n + l], rm[((i * n + k) * n + j) * n + l]);
      rc[i * n + j] = std::move(v);
    }
  Jet s(ctx);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jmul_acc(s, ginv[i * n + j], rc[i * n + j]);
  std::vector<Jet> A(n * n, Jet(ctx));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet v = rc[i * n + j];
      Jet sg(ctx);
      jmul_acc(sg, s, g[i * n + j]);
      v -= sg * (1.0 / (2.0 * (n - 1)));
      A[i * n + j] = v * (1.0 / (n - 2));
    }

  // W_ijkl = R_ijkl - (A_ik g_jl + A_jl g_ik - A_il g_jk - A_jk g_il)
  std::vector<Jet> W(n * n * n * n, Jet(ctx));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Jet v = rm[((i * n + j) * n + k) * n + l];
          jmul_sub(v, A[i * n + k], g[j * n + l]);
          jmul_sub(v, A[j * n + l], g[i * n + k]);
          jmul_acc(v, A[i * n + l], g[j * n + k]);
          jmul_acc(v, A[j * n + k], g[i * n + l]);
          W[((i * n + j) * n + k) * n + l] = std::move(v);
        }

  // Cotton C_ijk = nabla_k A_ij - nabla_j A_ik
  std::vector<Jet> dA = covd(A, 2, gamma, n, ctx);
  std::vector<Jet> C(n * n * n, Jet(ctx));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        C[(i * n + j) * n + k] =
            dA[(k * n + i) * n + j] - dA[(j * n + i) * n + k];

  // Bach, Schouten form: Lap A_ij - nabla^k nabla_i A_jk + A^{kl} W_ikjl.
  // The W index pattern is pinned by requiring nabla^j B_ij = 0 in dim 4;
  // the other last-pair order flips the quadratic term's sign and fails.
  std::vector<Jet> ddA = covd(dA, 3, gamma, n, ctx);
  std::vector<Jet> a_up(n * n, Jet(ctx));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      Jet v(ctx);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          Jet t(ctx);
          jmul_acc(t, ginv[k * n + a], ginv[l * n + b]);
          jmul_acc(v, t, A[a * n + b]);
        }
      a_up[k * n + l] = std::move(v);
    }
  std::vector<Jet> bpre(n * n, Jet(ctx));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet v(ctx);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          // Laplacian term: g^{ab} nabla_a nabla_b A_ij
          jmul_acc(v, ginv[a * n + b], ddA[((a * n + b) * n + i) * n + j]);
        }
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          // - nabla^k nabla_i A_jk: outer deriv a contracted with slot b
          Jet t(ctx);
          jmul_acc(t, ginv[a * n + b], ddA[((a * n + i) * n + j) * n + b]);
          v -= t;
        }
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          jmul_acc(v, a_up[k * n + l], W[((i * n + k) * n + j) * n + l]);
      bpre[i * n + j] = std::move(v);
    }
  std::vector<Jet> B(n * n, Jet(ctx));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      B[i * n + j] = (bpre[i * n + j] + bpre[j * n + i]) * 0.5;

  // Bach, Weyl form: (1/(n-3)) nabla^k nabla^l W_ikjl + (1/(n-2)) R^{kl} W_ikjl
  // (same last-pair pattern as the Schouten-form quadratic term)
  std::vector<Jet> dW;
  if (opt.alt_bach || opt.divergence) dW = covd(W, 4, gamma, n, ctx);
  if (opt.alt_bach) {
    std::vector<Jet> Q(n * n * n, Jet(ctx));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          Jet v(ctx);
          for (int a = 0; a < n; ++a)
            for (int l = 0; l < n; ++l)
              jmul_acc(v, ginv[a * n + l],
                       dW[((((int64_t)a * n + i) * n + k) * n + j) * n + l]);
          Q[(i * n + k) * n + j] = std::move(v);
        }
    std::vector<Jet> dQ = covd(Q, 3, gamma, n, ctx);
    std::vector<Jet> rc_up(n * n, Jet(ctx));
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        Jet v(ctx);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            Jet t(ctx);
            jmul_acc(t, ginv[k * n + a], ginv[l * n + b]);
            jmul_acc(v, t, rc[a * n + b]);
          }
        rc_up[k * n + l] = std::move(v);
      }
    std::vector<Jet> balt(n * n, Jet(ctx));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Jet v(ctx);
        for (int b = 0; b < n; ++b)
          for (int k = 0; k < n; ++k)
            jmul_acc(v, ginv[b * n + k], dQ[((b * n + i) * n + k) * n + j]);
        v *= 1.0 / (n - 3);
        Jet q(ctx);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            jmul_acc(q, rc_up[k * n + l], W[((i * n + k) * n + j) * n + l]);
        v += q * (1.0 / (n - 2));
        balt[i * n + j] = std::move(v);
      }
    out.b_alt.resize(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.b_alt[i * n + j] =
            0.5 * (balt[i * n + j].value() + balt[j * n + i].value());
  }

  if (opt.divergence) {
    // nabla^j B_ij and the Lemma correction C_jki R^jk
    std::vector<Jet> dB = covd(B, 2, gamma, n, ctx);
    std::vector<Jet> rc_up(n * n, Jet(ctx));
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        Jet v(ctx);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            Jet t(ctx);
            jmul_acc(t, ginv[k * n + a], ginv[l * n + b]);
            jmul_acc(v, t, rc[a * n + b]);
          }
        rc_up[k * n + l] = std::move(v);
      }
    out.div_b.resize(n);
    out.cotton_rc.resize(n);
    for (int i = 0; i < n; ++i) {
      Jet v(ctx);
      for (int a = 0; a < n; ++a)
        for (int j = 0; j < n; ++j)
          jmul_acc(v, ginv[a * n + j], dB[(a * n + i) * n + j]);
      out.div_b[i] = v.value();
      Jet c(ctx);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          jmul_acc(c, rc_up[j * n + k], C[(j * n + k) * n + i]);
      out.cotton_rc[i] = c.value();
    }
    // (n-2)/(n-3) nabla^l W_lijk in Cotton index order
    out.div_w_c.resize(n * n * n);
    const double cw = static_cast<double>(n - 2) / (n - 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          Jet v(ctx);
          for (int l = 0; l < n; ++l)
            for (int a = 0; a < n; ++a)
              jmul_acc(v, ginv[l * n + a],
                       dW[((((int64_t)a * n + l) * n + i) * n + j) * n + k]);
          out.div_w_c[(i * n + j) * n + k] = cw * v.value();
        }
  }

  if (opt.rhs) {
    // -(n-2) A.B + nabla_i nabla_j B^{ij}
    std::vector<Jet> dB = covd(B, 2, gamma, n, ctx);
    std::vector<Jet> d1(n, Jet(ctx));
    for (int i = 0; i < n; ++i) {
      Jet v(ctx);
      for (int a = 0; a < n; ++a)
        for (int j = 0; j < n; ++j)
          jmul_acc(v, ginv[a * n + j], dB[(a * n + i) * n + j]);
      d1[i] = std::move(v);
    }
    std::vector<Jet> dd1 = covd(d1, 1, gamma, n, ctx);
    Jet rhs2(ctx);
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i)
        jmul_acc(rhs2, ginv[b * n + i], dd1[b * n + i]);
    Jet ab(ctx);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        jmul_acc(ab, a_up[i * n + j], B[i * n + j]);
    out.pressure_rhs = -(n - 2.0) * ab.value() + rhs2.value();
  }

  if (opt.derivs) {
    std::vector<Jet> dRm = covd(rm, 4, gamma, n, ctx);
    extract(dRm, out.drm);
    std::vector<Jet> ddRm = covd(dRm, 5, gamma, n, ctx);
    extract(ddRm, out.d2rm);
  }

  extract(g, out.g);
  extract(ginv, out.ginv);
  extract(gamma, out.gamma);
  extract(rm, out.rm);
  extract(rc, out.rc);
  out.s = s.value();
  extract(A, out.a_sch);
  extract(W, out.w);
  extract(C, out.c);
  extract(B, out.b);
  return out;
}

void conformal_closed_forms(const AnalyticFamily& fam, const double* x,
                            std::vector<double>& gamma_out,
                            std::vector<double>& rc_out, double& s_out) {
  if (fam.tag != AnalyticFamily::Tag::conformally_flat)
    throw ConfigError("closed forms require the conformally flat family");
  const int n = fam.n;
  // u includes the constant log(scale)/2, which drops out of derivatives
  const double u0 =
      mode_sum(fam.u_modes, x, fam.periods) + 0.5 * std::log(fam.scale);
  double du[8] = {0};
  double hu[64] = {0};
  for (const WaveMode& m : fam.u_modes) {
    double l = m.phase;
    for (int a = 0; a < n; ++a) l += mode_angular(m, a, fam.periods) * x[a];
    const double sl = std::sin(l), cl = std::cos(l);
    for (int a = 0; a < n; ++a) {
      const double wa = mode_angular(m, a, fam.periods);
      du[a] += m.amp * wa * cl;
      for (int b = 0; b < n; ++b)
        hu[a * n + b] -= m.amp * wa * mode_angular(m, b, fam.periods) * sl;
    }
  }
  double lap = 0.0, grad2 = 0.0;
  for (int a = 0; a < n; ++a) {
    lap += hu[a * n + a];
    grad2 += du[a] * du[a];
  }
  gamma_out.assign(n * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        if (k == i) v += du[j];
        if (k == j) v += du[i];
        if (i == j) v -= du[k];
        gamma_out[(k * n + i) * n + j] = v;
      }
  rc_out.assign(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = -(n - 2.0) * (hu[i * n + j] - du[i] * du[j]);
      if (i == j) v -= lap + (n - 2.0) * grad2;
      rc_out[i * n + j] = v;
    }
  s_out = std::exp(-2.0 * u0) *
          (-2.0 * (n - 1.0) * lap - (n - 1.0) * (n - 2.0) * grad2);
}

}  // namespace cbf
