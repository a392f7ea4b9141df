#include "cbf/curvature.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "cbf/kernels.hpp"
#include "cbf/parallel.hpp"

namespace cbf {
namespace {

const kernels::Table& K() { return kernels::active(); }

// Gamma_{p,ij} = (1/2)(d_i g_pj + d_j g_pi - d_p g_ij), bitwise symmetric
// in (i,j) via canonical fill.
TensorField lowered_christoffel(const MetricField& g, const TensorField& dg) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  TensorField glow = TensorField::zeros(g.grid(), 3, Sym::sym_pair);
  std::vector<double> t(np);
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double* dst = glow.at(p, i, j);
        K().add(t.data(), dg.at(i, p, j), dg.at(j, p, i), np);
        K().sub(t.data(), t.data(), dg.at(p, i, j), np);
        K().scale(dst, t.data(), 0.5, np);
      }
  glow.fill_from_canonical();
  return glow;
}

// Raise both slots of a rank-2 field.
TensorField raise2(const TensorField& T, const MetricField& g) {
  return raise_slot(raise_slot(T, g, 0), g, 1);
}

}  // namespace

TensorField christoffel(const MetricField& g, int stencil_order) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  TensorField dg = coordinate_gradient(g.g(), stencil_order);
  TensorField glow = lowered_christoffel(g, dg);
  TensorField gamma = TensorField::zeros(g.grid(), 3, Sym::sym_pair);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double* dst = gamma.at(k, i, j);
        for (int l = 0; l < n; ++l)
          K().mul_add(dst, g.ginv().at(k, l), glow.at(l, i, j), np);
      }
  gamma.fill_from_canonical();
  return gamma;
}

TensorField riemann(const MetricField& g, const TensorField& gamma,
                    int stencil_order) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  const Grid& grid = *g.grid();

  // Second derivatives dd[a][b] g_ij with one plane per unordered index
  // pair on both slots; sharing the planes is what makes the assembled
  // Riemann symmetries bitwise and the first Bianchi sum cancel to rounding.
  TensorField dg = coordinate_gradient(g.g(), stencil_order);
  TensorField ddg = TensorField::zeros(g.grid(), 4, Sym::none);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          apply_stencil_plane(ddg.at(a, b, i, j), dg.at(a, i, j), grid, b,
                              stencil_order);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (a <= b && i <= j) continue;
          std::memcpy(ddg.at(a, b, i, j),
                      ddg.at(std::min(a, b), std::max(a, b), std::min(i, j),
                             std::max(i, j)),
                      sizeof(double) * np);
        }

  // QQ plane per unordered pair-of-pairs:
  //   QQ({a,b},{c,d}) = g^{pq} Gamma_{p,ab} Gamma_{q,cd}
  // with Gamma_{p,ab} = g_pm Gamma^m_ab lowered from the caller's gamma.
  TensorField glow = TensorField::zeros(g.grid(), 3, Sym::sym_pair);
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int m = 0; m < n; ++m)
          K().mul_add(glow.at(p, i, j), g.g().at(p, m), gamma.at(m, i, j), np);
  glow.fill_from_canonical();
  const int npair = n * (n + 1) / 2;
  std::vector<int> pid(n * n);
  {
    int id = 0;
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k) {
        pid[i * n + k] = id;
        pid[k * n + i] = id;
        ++id;
      }
  }
  std::vector<std::pair<int, int>> pair_of(npair);
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) pair_of[pid[i * n + k]] = {i, k};
  std::vector<double> qq(static_cast<size_t>(npair * (npair + 1) / 2) * np,
                         0.0);
  auto qq_plane = [&](int i, int k, int j, int l) -> double* {
    int pi = pid[i * n + k], qi = pid[j * n + l];
    if (pi > qi) std::swap(pi, qi);
    return qq.data() + (static_cast<int64_t>(qi) * (qi + 1) / 2 + pi) * np;
  };
  {
    std::vector<double> t(np);
    for (int pi = 0; pi < npair; ++pi)
      for (int qi = pi; qi < npair; ++qi) {
        auto [i1, k1] = pair_of[pi];
        auto [i2, k2] = pair_of[qi];
        double* dst = qq_plane(i1, k1, i2, k2);
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) {
            K().mul(t.data(), glow.at(p, i1, k1), glow.at(q, i2, k2), np);
            K().mul_add(dst, g.ginv().at(p, q), t.data(), np);
          }
      }
  }

  // R_ijkl = (1/2)(dd_il g_jk + dd_jk g_il - dd_ik g_jl - dd_jl g_ik)
  //          + QQ(il,jk) - QQ(ik,jl)
  // (sign pinned: Rc_ij = g^{kl} R_ikjl must give S > 0 on positively curved
  //  metrics; this is the negative of the other common coordinate formula).
  TensorField rm = TensorField::zeros(g.grid(), 4, Sym::riemann);
  {
    std::vector<double> t1(np), t2(np);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = k + 1; l < n; ++l) {
            if (i * n + j > k * n + l) continue;
            double* dst = rm.at(i, j, k, l);
            K().add(t1.data(), ddg.at(i, l, j, k), ddg.at(j, k, i, l), np);
            K().add(t2.data(), ddg.at(i, k, j, l), ddg.at(j, l, i, k), np);
            K().sub(t1.data(), t1.data(), t2.data(), np);
            K().scale(dst, t1.data(), 0.5, np);
            K().add(dst, dst, qq_plane(i, l, j, k), np);
            K().sub(dst, dst, qq_plane(i, k, j, l), np);
          }
  }
  rm.fill_from_canonical();
  return rm;
}

void ricci_scalar_schouten(const MetricField& g, const TensorField& rm,
                           TensorField& rc, TensorField& s, TensorField& a) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  rc = TensorField::zeros(g.grid(), 2, Sym::sym_pair);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double* dst = rc.at(i, j);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          K().mul_add(dst, g.ginv().at(k, l), rm.at(i, k, j, l), np);
    }
  rc.fill_from_canonical();

  s = TensorField::zeros(g.grid(), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      K().mul_add(s.comp(0), g.ginv().at(i, j), rc.at(i, j), np);

  a = TensorField::zeros(g.grid(), 2, Sym::sym_pair);
  std::vector<double> t(np);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      K().mul(t.data(), s.comp(0), g.g().at(i, j), np);
      K().scale(t.data(), t.data(), 1.0 / (2.0 * (n - 1)), np);
      K().sub(t.data(), rc.at(i, j), t.data(), np);
      K().scale(a.at(i, j), t.data(), 1.0 / (n - 2), np);
    }
  a.fill_from_canonical();
}

TensorField weyl(const MetricField& g, const TensorField& rm,
                 const TensorField& a) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  TensorField w = TensorField::zeros(g.grid(), 4, Sym::riemann);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          if (i * n + j > k * n + l) continue;
          double* dst = w.at(i, j, k, l);
          std::memcpy(dst, rm.at(i, j, k, l), sizeof(double) * np);
          K().mul_sub(dst, a.at(i, k), g.g().at(j, l), np);
          K().mul_sub(dst, a.at(j, l), g.g().at(i, k), np);
          K().mul_add(dst, a.at(i, l), g.g().at(j, k), np);
          K().mul_add(dst, a.at(j, k), g.g().at(i, l), np);
        }
  w.fill_from_canonical();
  return w;
}

TensorField covariant_derivative(const TensorField& T, const MetricField& g,
                                 const TensorField& gamma, int stencil_order) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  const int r = T.rank();
  TensorField out = coordinate_gradient(T, stencil_order);
  if (r == 0) return out;
  std::vector<int64_t> stride(r);
  stride[r - 1] = 1;
  for (int s = r - 2; s >= 0; --s) stride[s] = stride[s + 1] * n;
  std::vector<int> digit(r);
  for (int64_t c = 0; c < T.ncomp(); ++c) {
    int64_t rem = c;
    for (int s = r - 1; s >= 0; --s) {
      digit[s] = static_cast<int>(rem % n);
      rem /= n;
    }
    for (int a = 0; a < n; ++a) {
      double* dst = out.comp(static_cast<int64_t>(a) * T.ncomp() + c);
      for (int s = 0; s < r; ++s)
        for (int p = 0; p < n; ++p) {
          const int64_t cp = c + (p - digit[s]) * stride[s];
          K().mul_sub(dst, gamma.at(p, a, digit[s]), T.comp(cp), np);
        }
    }
  }
  return out;
}

TensorField cotton(const MetricField& g, const TensorField& a,
                   const TensorField& gamma, int stencil_order) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  TensorField da = covariant_derivative(a, g, gamma, stencil_order);
  TensorField c = TensorField::zeros(g.grid(), 3, Sym::none);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        K().sub(c.at(i, j, k), da.at(k, i, j), da.at(j, i, k), np);
  return c;
}

void bach(const MetricField& g, const CurvatureBundle& bundle, TensorField& b,
          TensorField& b_alt, int stencil_order) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  if (n < 4) throw std::invalid_argument("bach: dimension must be >= 4");
  const TensorField& w = bundle.w;
  const TensorField& gamma = bundle.gamma;
  assert(w.rank() == 4 && gamma.rank() == 3);

  // Schouten route: Lap A_ij - nabla^k nabla_i A_jk + A^{kl} W_ikjl
  // (W last-pair order pinned by div B = 0 in dim 4).
  TensorField da = covariant_derivative(bundle.a, g, gamma, stencil_order);
  TensorField dda = covariant_derivative(da, g, gamma, stencil_order);
  TensorField a_up = raise2(bundle.a, g);
  TensorField bpre = TensorField::zeros(g.grid(), 2, Sym::none);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double* dst = bpre.at(i, j);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          K().mul_add(dst, g.ginv().at(p, q), dda.at(p, q, i, j), np);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          K().mul_sub(dst, g.ginv().at(p, q), dda.at(p, i, j, q), np);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          K().mul_add(dst, a_up.at(k, l), w.at(i, k, j, l), np);
    }
  b = TensorField::zeros(g.grid(), 2, Sym::sym_pair);
  {
    std::vector<double> t(np);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        K().add(t.data(), bpre.at(i, j), bpre.at(j, i), np);
        K().scale(b.at(i, j), t.data(), 0.5, np);
      }
  }
  b.fill_from_canonical();
  dda = TensorField();

  // Weyl route: (1/(n-3)) nabla^k nabla^l W_ikjl + (1/(n-2)) R^{kl} W_ikjl
  TensorField dw = covariant_derivative(w, g, gamma, stencil_order);
  TensorField q = TensorField::zeros(g.grid(), 3, Sym::none);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        double* dst = q.at(i, k, j);
        for (int a = 0; a < n; ++a)
          for (int l = 0; l < n; ++l)
            K().mul_add(dst, g.ginv().at(a, l), dw.at(a, i, k, j, l), np);
      }
  dw = TensorField();
  TensorField dq = covariant_derivative(q, g, gamma, stencil_order);
  TensorField rc_up = raise2(bundle.rc, g);
  TensorField pre = TensorField::zeros(g.grid(), 2, Sym::none);
  {
    std::vector<double> t(np);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double* dst = pre.at(i, j);
        std::fill(t.begin(), t.end(), 0.0);
        for (int p = 0; p < n; ++p)
          for (int k = 0; k < n; ++k)
            K().mul_add(t.data(), g.ginv().at(p, k), dq.at(p, i, k, j), np);
        K().scale(dst, t.data(), 1.0 / (n - 3), np);
        std::fill(t.begin(), t.end(), 0.0);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            K().mul_add(t.data(), rc_up.at(k, l), w.at(i, k, j, l), np);
        K().axpy(dst, t.data(), 1.0 / (n - 2), np);
      }
  }
  b_alt = TensorField::zeros(g.grid(), 2, Sym::sym_pair);
  {
    std::vector<double> t(np);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        K().add(t.data(), pre.at(i, j), pre.at(j, i), np);
        K().scale(b_alt.at(i, j), t.data(), 0.5, np);
      }
  }
  b_alt.fill_from_canonical();
}

TensorField bach_divergence_residual(const MetricField& g,
                                     const CurvatureBundle& bundle,
                                     int stencil_order) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  TensorField db =
      covariant_derivative(bundle.b, g, bundle.gamma, stencil_order);
  TensorField res = TensorField::zeros(g.grid(), 1, Sym::none);
  for (int i = 0; i < n; ++i) {
    double* dst = res.at(i);
    for (int a = 0; a < n; ++a)
      for (int j = 0; j < n; ++j)
        K().mul_add(dst, g.ginv().at(a, j), db.at(a, i, j), np);
  }
  // div B_i = ((n-4)/(n-2)) C_jki R^jk in this convention (coefficient and
  // sign pinned against the forward-mode oracle at n=4,5,6).
  if (n > 4) {
    TensorField rc_up = raise2(bundle.rc, g);
    std::vector<double> t(np, 0.0);
    const double coef = static_cast<double>(n - 4) / (n - 2);
    for (int i = 0; i < n; ++i) {
      std::fill(t.begin(), t.end(), 0.0);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          K().mul_add(t.data(), rc_up.at(j, k), bundle.c.at(j, k, i), np);
      K().axpy(res.at(i), t.data(), -coef, np);
    }
  }
  TensorField nsq = pointwise_norm_sq(res, g);
  TensorField out = TensorField::zeros(g.grid(), 0);
  double* o = out.comp(0);
  const double* in = nsq.comp(0);
  par::parallel_for(np, [&](int64_t lo, int64_t hi) {
    for (int64_t p = lo; p < hi; ++p) o[p] = std::sqrt(std::max(0.0, in[p]));
  });
  return out;
}

CurvatureBundle make_bundle(const MetricField& g, BundleLevel level,
                            int stencil_order) {
  CurvatureBundle bundle;
  bundle.level = level;
  bundle.stencil_order = stencil_order;
  bundle.gamma = christoffel(g, stencil_order);
  bundle.rm = riemann(g, bundle.gamma, stencil_order);
  ricci_scalar_schouten(g, bundle.rm, bundle.rc, bundle.s, bundle.a);
  if (level >= BundleLevel::weyl)
    bundle.w = weyl(g, bundle.rm, bundle.a);
  if (level >= BundleLevel::cotton)
    bundle.c = cotton(g, bundle.a, bundle.gamma, stencil_order);
  if (level >= BundleLevel::bach)
    bach(g, bundle, bundle.b, bundle.b_alt, stencil_order);
  return bundle;
}

TensorField curvature_variation(const MetricField& g,
                                const CurvatureBundle& bundle,
                                const TensorField& h, int stencil_order) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  assert(h.rank() == 2);
  TensorField dh = covariant_derivative(h, g, bundle.gamma, stencil_order);
  TensorField ddh = covariant_derivative(dh, g, bundle.gamma, stencil_order);
  dh = TensorField();
  TensorField h_up = raise_slot(h, g, 0);
  TensorField out = TensorField::zeros(g.grid(), 4, Sym::none);
  std::vector<double> t1(np), t2(np);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double* dst = out.at(i, j, k, l);
          // d/dt R_ijkl = (1/2)(DD_il h_jk + DD_jk h_il - DD_ik h_jl
          //               - DD_jl h_ik) + (1/2)(R_ijkp h^p_l + R_ijpl h^p_k);
          // second-derivative block sign pinned by the finite-difference
          // check (Rm(g+eh) - Rm(g-eh))/2e against the oracle.
          K().add(t1.data(), ddh.at(i, l, j, k), ddh.at(j, k, i, l), np);
          K().add(t2.data(), ddh.at(i, k, j, l), ddh.at(j, l, i, k), np);
          K().sub(t1.data(), t1.data(), t2.data(), np);
          K().scale(dst, t1.data(), 0.5, np);
          std::fill(t1.begin(), t1.end(), 0.0);
          for (int p = 0; p < n; ++p) {
            K().mul_add(t1.data(), bundle.rm.at(i, j, k, p), h_up.at(p, l),
                        np);
            K().mul_add(t1.data(), bundle.rm.at(i, j, p, l), h_up.at(p, k),
                        np);
          }
          K().axpy(dst, t1.data(), 0.5, np);
        }
  return out;
}

TensorField t_tensor(const MetricField& g, const TensorField& gamma,
                     const TensorField& p, int stencil_order) {
  const int n = g.dim();
  const int64_t np = g.npoints();
  assert(p.rank() == 0);
  TensorField dp = covariant_derivative(p, g, gamma, stencil_order);
  TensorField hess = covariant_derivative(dp, g, gamma, stencil_order);
  TensorField out = TensorField::zeros(g.grid(), 4, Sym::none);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double* dst = out.at(i, j, k, l);
          K().mul(dst, g.g().at(j, l), hess.at(i, k), np);
          K().mul_sub(dst, g.g().at(j, k), hess.at(i, l), np);
          K().mul_sub(dst, g.g().at(i, l), hess.at(j, k), np);
          K().mul_add(dst, g.g().at(i, k), hess.at(j, l), np);
        }
  return out;
}

}  // namespace cbf
