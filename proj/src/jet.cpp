#include "cbf/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace cbf {

namespace {

// graded enumeration of multi-indices with |alpha| <= order; the constant
// term (degree 0) is index 0
void enumerate(int n, int order, std::vector<uint8_t>& out) {
  for (int d = 0; d <= order; ++d) {
    struct Rec {
      int n, d;
      std::vector<uint8_t>& out;
      std::vector<uint8_t> a;
      Rec(int n, int d, std::vector<uint8_t>& out) : n(n), d(d), out(out), a(n, 0) {}
      void go(int pos, int left) {
        if (pos == n - 1) {
          a[pos] = static_cast<uint8_t>(left);
          out.insert(out.end(), a.begin(), a.end());
          return;
        }
        for (int v = left; v >= 0; --v) {
          a[pos] = static_cast<uint8_t>(v);
          go(pos + 1, left - v);
        }
      }
    } rec(n, d, out);
    rec.go(0, d);
  }
}

uint64_t pack_key(const uint8_t* alpha, int n, int order) {
  uint64_t k = 0;
  for (int a = 0; a < n; ++a) k = k * static_cast<uint64_t>(order + 2) + alpha[a];
  return k;
}

}  // namespace

JetContext::JetContext(int n, int order) : n_(n), order_(order) {
  if (n < 1 || n > 8 || order < 0 || order > 15)
    throw std::logic_error("jet context bounds: n <= 8, order <= 15");
  enumerate(n, order, exps_);
  nterms_ = static_cast<int64_t>(exps_.size()) / n;
  degree_.resize(nterms_);
  factorial_.resize(nterms_);
  std::map<uint64_t, int32_t> lookup;
  for (int64_t t = 0; t < nterms_; ++t) {
    const uint8_t* a = exp(t);
    int d = 0;
    double fac = 1.0;
    for (int i = 0; i < n; ++i) {
      d += a[i];
      for (int v = 2; v <= a[i]; ++v) fac *= v;
    }
    degree_[t] = d;
    factorial_[t] = fac;
    lookup[pack_key(a, n, order)] = static_cast<int32_t>(t);
  }
  shift_idx_.assign(nterms_ * n, -1);
  shift_fac_.assign(nterms_ * n, 0.0);
  std::vector<uint8_t> tmp(n);
  for (int64_t t = 0; t < nterms_; ++t) {
    for (int a = 0; a < n; ++a) {
      if (degree_[t] + 1 > order) continue;
      std::copy(exp(t), exp(t) + n, tmp.begin());
      tmp[a]++;
      auto it = lookup.find(pack_key(tmp.data(), n, order));
      if (it != lookup.end()) {
        shift_idx_[t * n + a] = it->second;
        shift_fac_[t * n + a] = static_cast<double>(exp(t)[a] + 1);
      }
    }
  }
  // product triples grouped by output term for write locality
  std::vector<uint8_t> sum(n);
  for (int64_t i = 0; i < nterms_; ++i)
    for (int64_t j = 0; j < nterms_; ++j) {
      if (degree_[i] + degree_[j] > order) continue;
      for (int a = 0; a < n; ++a) sum[a] = exp(i)[a] + exp(j)[a];
      auto it = lookup.find(pack_key(sum.data(), n, order));
      triples_.push_back({it->second, static_cast<int32_t>(i),
                          static_cast<int32_t>(j)});
    }
  std::stable_sort(triples_.begin(), triples_.end(),
                   [](const Triple& x, const Triple& y) { return x.c < y.c; });
}

int64_t JetContext::index_of(const uint8_t* alpha) const {
  for (int64_t t = 0; t < nterms_; ++t)
    if (std::equal(alpha, alpha + n_, exp(t))) return t;
  return -1;
}

const JetContext& JetContext::get(int n, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetContext>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, order}];
  if (!slot) slot.reset(new JetContext(n, order));
  return *slot;
}

Jet Jet::constant(const JetContext* ctx, double v) {
  Jet j(ctx);
  j.co_[0] = v;
  return j;
}

Jet Jet::variable(const JetContext* ctx, int axis, double x0) {
  Jet j(ctx);
  j.co_[0] = x0;
  uint8_t e[8] = {0};
  e[axis] = 1;
  j.co_[ctx->index_of(e)] = 1.0;
  return j;
}

double Jet::value() const {
  if (exact_ < 0) throw std::logic_error("jet value past exactness degree");
  return co_[0];
}

double Jet::partial(const int* alpha) const {
  uint8_t e[8];
  int d = 0;
  for (int a = 0; a < ctx_->n(); ++a) {
    e[a] = static_cast<uint8_t>(alpha[a]);
    d += alpha[a];
  }
  if (d > exact_) throw std::logic_error("jet partial past exactness degree");
  const int64_t t = ctx_->index_of(e);
  if (t < 0) throw std::logic_error("jet partial beyond truncation order");
  return co_[t] * ctx_->factorial(t);
}

Jet& Jet::operator+=(const Jet& o) {
  for (int64_t t = 0; t < ctx_->nterms(); ++t) co_[t] += o.co_[t];
  exact_ = std::min(exact_, o.exact_);
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (int64_t t = 0; t < ctx_->nterms(); ++t) co_[t] -= o.co_[t];
  exact_ = std::min(exact_, o.exact_);
  return *this;
}

Jet& Jet::operator*=(double a) {
  for (double& c : co_) c *= a;
  return *this;
}

Jet& Jet::operator+=(double a) {
  co_[0] += a;
  return *this;
}

Jet& Jet::operator-=(double a) {
  co_[0] -= a;
  return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator-(Jet a) { return a *= -1.0; }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator+(Jet a, double s) { return a += s; }
Jet operator-(Jet a, double s) { return a -= s; }

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(a.ctx());
  jmul_acc(out, a, b);
  out.set_exact_to(std::min(a.exact_to(), b.exact_to()));
  return out;
}

void jmul_acc(Jet& acc, const Jet& a, const Jet& b) {
  const double* x = a.data();
  const double* y = b.data();
  double* o = acc.data();
  for (const auto& t : a.ctx()->triples()) o[t.c] += x[t.a] * y[t.b];
  acc.set_exact_to(
      std::min(acc.exact_to(), std::min(a.exact_to(), b.exact_to())));
}

void jmul_sub(Jet& acc, const Jet& a, const Jet& b) {
  const double* x = a.data();
  const double* y = b.data();
  double* o = acc.data();
  for (const auto& t : a.ctx()->triples()) o[t.c] -= x[t.a] * y[t.b];
  acc.set_exact_to(
      std::min(acc.exact_to(), std::min(a.exact_to(), b.exact_to())));
}

Jet jderiv(const Jet& f, int axis) {
  const JetContext* ctx = f.ctx();
  Jet out(ctx);
  for (int64_t t = 0; t < ctx->nterms(); ++t) {
    const int32_t s = ctx->shift_index(t, axis);
    if (s >= 0) out.raw(t) = ctx->shift_factor(t, axis) * f.raw(s);
  }
  out.set_exact_to(f.exact_to() - 1);
  return out;
}

Jet jcompose(const Jet& f, const double* phi, int count) {
  if (f.exact_to() < 0)
    throw std::logic_error("jet composition needs an exact value");
  const JetContext* ctx = f.ctx();
  Jet u = f;
  u.raw(0) = 0.0;  // f - f(0)
  const int kmax = std::min<int>(count - 1, ctx->order());
  Jet h = Jet::constant(ctx, phi[kmax]);
  for (int k = kmax - 1; k >= 0; --k) {
    Jet next(ctx);
    jmul_acc(next, h, u);
    next += phi[k];
    h = std::move(next);
  }
  h.set_exact_to(f.exact_to());
  return h;
}

Jet jreciprocal(const Jet& f) {
  const double v = f.value();
  if (v == 0.0) throw std::logic_error("jet reciprocal of zero value");
  const int K = f.ctx()->order();
  double phi[16];
  double p = 1.0 / v;
  for (int k = 0; k <= K; ++k) {
    phi[k] = p;          // (-1)^k / v^{k+1}
    p = -p / v;
  }
  return jcompose(f, phi, K + 1);
}

Jet jexp(const Jet& f) {
  const double v = std::exp(f.value());
  const int K = f.ctx()->order();
  double phi[16];
  double fac = 1.0;
  for (int k = 0; k <= K; ++k) {
    phi[k] = v / fac;
    fac *= (k + 1);
  }
  return jcompose(f, phi, K + 1);
}

Jet jsin(const Jet& f) {
  const double s = std::sin(f.value());
  const double c = std::cos(f.value());
  const int K = f.ctx()->order();
  const double cycle[4] = {s, c, -s, -c};
  double phi[16];
  double fac = 1.0;
  for (int k = 0; k <= K; ++k) {
    phi[k] = cycle[k % 4] / fac;
    fac *= (k + 1);
  }
  return jcompose(f, phi, K + 1);
}

Jet jcos(const Jet& f) {
  const double s = std::sin(f.value());
  const double c = std::cos(f.value());
  const int K = f.ctx()->order();
  const double cycle[4] = {c, -s, -c, s};
  double phi[16];
  double fac = 1.0;
  for (int k = 0; k <= K; ++k) {
    phi[k] = cycle[k % 4] / fac;
    fac *= (k + 1);
  }
  return jcompose(f, phi, K + 1);
}

void jmat_inverse(int n, const Jet* a, Jet* out) {
  const JetContext* ctx = a[0].ctx();
  std::vector<Jet> m(a, a + n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[i * n + j] = Jet::constant(ctx, i == j ? 1.0 : 0.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::fabs(m[col * n + col].raw(0));
    for (int r = col + 1; r < n; ++r) {
      const double v = std::fabs(m[r * n + col].raw(0));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) throw std::logic_error("jet matrix not invertible");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(m[piv * n + j], m[col * n + j]);
        std::swap(out[piv * n + j], out[col * n + j]);
      }
    const Jet inv_piv = jreciprocal(m[col * n + col]);
    for (int j = 0; j < n; ++j) {
      m[col * n + j] = m[col * n + j] * inv_piv;
      out[col * n + j] = out[col * n + j] * inv_piv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Jet factor = m[r * n + col];
      if (factor.raw(0) == 0.0) {
        bool all_zero = true;
        for (int64_t t = 0; t < ctx->nterms(); ++t)
          if (factor.raw(t) != 0.0) {
            all_zero = false;
            break;
          }
        if (all_zero) continue;
      }
      for (int j = 0; j < n; ++j) {
        jmul_sub(m[r * n + j], factor, m[col * n + j]);
        jmul_sub(out[r * n + j], factor, out[col * n + j]);
      }
    }
  }
}

}  // namespace cbf
