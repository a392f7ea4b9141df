#include "cbf/metric_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cbf/errors.hpp"
#include "cbf/parallel.hpp"

namespace cbf {

namespace smallmat {

void sym_eigen(int n, const double* a_in, double* w, double* v) {
  constexpr int kMax = 8;
  double a[kMax][kMax];
  double vv[kMax][kMax];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a[i][j] = a_in[i * n + j];
      vv[i][j] = (i == j) ? 1.0 : 0.0;
    }
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-300) break;
    bool rotated = false;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p][q];
        const double scale = std::fabs(a[p][p]) + std::fabs(a[q][q]);
        if (std::fabs(apq) <= 1e-17 * scale) continue;
        rotated = true;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        a[p][p] -= t * apq;
        a[q][q] += t * apq;
        a[p][q] = a[q][p] = 0.0;
        for (int r = 0; r < n; ++r) {
          if (r != p && r != q) {
            const double arp = a[r][p], arq = a[r][q];
            a[r][p] = a[p][r] = arp - s * (arq + tau * arp);
            a[r][q] = a[q][r] = arq + s * (arp - tau * arq);
          }
          const double vrp = vv[r][p], vrq = vv[r][q];
          vv[r][p] = vrp - s * (vrq + tau * vrp);
          vv[r][q] = vrq + s * (vrp - tau * vrq);
        }
      }
    if (!rotated) break;
  }
  for (int i = 0; i < n; ++i) w[i] = a[i][i];
  if (v)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v[i * n + j] = vv[i][j];
}

}  // namespace smallmat

MetricField MetricField::from_components(TensorField g, double eps_spd) {
  if (g.rank() != 2) throw ConfigError("metric must be a rank-2 field");
  const int n = g.dim();
  const int64_t np = g.npoints();
  // symmetry check (bitwise; constructors are expected to mirror pairs)
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double* up = g.at(i, j);
      const double* lo = g.at(j, i);
      for (int64_t p = 0; p < np; ++p)
        if (up[p] != lo[p])
          throw ConfigError("metric components are not symmetric");
    }
  g.set_sym(Sym::sym_pair);

  MetricField m;
  m.g_ = std::move(g);
  m.ginv_ = TensorField::zeros(m.g_.grid(), 2, Sym::sym_pair);
  m.sqrt_det_.resize(static_cast<size_t>(np));
  m.eig_min_.resize(static_cast<size_t>(np));
  m.eig_max_.resize(static_cast<size_t>(np));

  struct Bad {
    int64_t point = -1;
    double ratio = 0.0;
  };
  std::vector<Bad> bad(static_cast<size_t>(par::threads() * 4 + 1));
  std::vector<double> gmin(bad.size(), 0.0);
  // fixed slot boundaries; each slot records its own first failure and min
  const int64_t nslots = static_cast<int64_t>(bad.size());
  par::parallel_for(nslots, [&](int64_t sb, int64_t se) {
    for (int64_t slot = sb; slot < se; ++slot) {
      const int64_t lo = slot * np / nslots;
      const int64_t hi = (slot + 1) * np / nslots;
      double a[64], w[8], v[64];
      double local_min = 0.0;
      bool first = true;
      for (int64_t p = lo; p < hi; ++p) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) a[i * n + j] = m.g_.at(i, j)[p];
        smallmat::sym_eigen(n, a, w, v);
        double wmin = w[0], wmax = w[0];
        for (int i = 1; i < n; ++i) {
          wmin = std::min(wmin, w[i]);
          wmax = std::max(wmax, w[i]);
        }
        if (!(wmin > 0.0) || wmin <= eps_spd * wmax) {
          if (bad[slot].point < 0) {
            bad[slot].point = p;
            bad[slot].ratio = wmax != 0.0 ? wmin / wmax : 0.0;
          }
          continue;
        }
        m.eig_min_[p] = wmin;
        m.eig_max_[p] = wmax;
        if (first || wmin < local_min) local_min = wmin;
        first = false;
        double det = 1.0;
        for (int i = 0; i < n; ++i) det *= w[i];
        m.sqrt_det_[p] = std::sqrt(det);
        // ginv = V diag(1/w) V^T, symmetrized by construction (i<=j filled)
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += v[i * n + k] * v[j * n + k] / w[k];
            m.ginv_.at(i, j)[p] = s;
          }
      }
      gmin[slot] = first ? 0.0 : local_min;
    }
  });
  for (const auto& b : bad)
    if (b.point >= 0)
      throw SingularMetric("metric fails the SPD guard", b.point, b.ratio);
  m.ginv_.fill_from_canonical();
  double gm = 0.0;
  bool first = true;
  for (size_t s = 0; s < gmin.size(); ++s) {
    const int64_t lo = static_cast<int64_t>(s) * np / nslots;
    const int64_t hi = (static_cast<int64_t>(s) + 1) * np / nslots;
    if (hi <= lo) continue;
    if (first || gmin[s] < gm) gm = gmin[s];
    first = false;
  }
  m.global_eig_min_ = gm;
  return m;
}

}  // namespace cbf
