#pragma once

#include <cstdint>
#include <memory>
#include <vector>

// Truncated multivariate Taylor arithmetic ("jets"): a Jet holds the Taylor
// coefficients c_alpha = d^alpha f / alpha! of a function at a point, for
// all multi-indices |alpha| <= order. Arithmetic on jets propagates exact
// derivatives — no finite differences anywhere — which is what makes the
// analytic-metric oracle independent of the stencil machinery it validates.
//
// Each jet carries exact_to: the degree up to which its coefficients are
// exact for the function it represents. Products take the min, a derivative
// loses one degree (the dropped order-(K) coefficients would be needed).
// Extracting a value or partial beyond exact_to throws.

namespace cbf {

using std::int64_t;

class JetContext {
 public:
  struct Triple {
    int32_t c, a, b;  // out[c] += x[a]*y[b]
  };

  // Cached per (n, order); returned reference lives for the process.
  static const JetContext& get(int n, int order);

  int n() const { return n_; }
  int order() const { return order_; }
  int64_t nterms() const { return nterms_; }
  const uint8_t* exp(int64_t t) const { return exps_.data() + t * n_; }
  int degree(int64_t t) const { return degree_[t]; }
  double factorial(int64_t t) const { return factorial_[t]; }  // alpha!
  // index of alpha + e_axis, or -1 when that degree is truncated away
  int32_t shift_index(int64_t t, int axis) const {
    return shift_idx_[t * n_ + axis];
  }
  // alpha_axis + 1 (the chain factor of d/dx_axis on Taylor coefficients)
  double shift_factor(int64_t t, int axis) const {
    return shift_fac_[t * n_ + axis];
  }
  const std::vector<Triple>& triples() const { return triples_; }
  int64_t index_of(const uint8_t* alpha) const;  // -1 if absent

 private:
  JetContext(int n, int order);
  int n_, order_;
  int64_t nterms_ = 0;
  std::vector<uint8_t> exps_;
  std::vector<int> degree_;
  std::vector<double> factorial_;
  std::vector<int32_t> shift_idx_;
  std::vector<double> shift_fac_;
  std::vector<Triple> triples_;
};

class Jet {
 public:
  Jet() = default;
  explicit Jet(const JetContext* ctx)
      : ctx_(ctx), co_(ctx->nterms(), 0.0), exact_(ctx->order()) {}
  static Jet constant(const JetContext* ctx, double v);
  static Jet variable(const JetContext* ctx, int axis, double x0);

  const JetContext* ctx() const { return ctx_; }
  int exact_to() const { return exact_; }
  void set_exact_to(int e) { exact_ = e; }
  double raw(int64_t t) const { return co_[t]; }
  double& raw(int64_t t) { return co_[t]; }
  const double* data() const { return co_.data(); }
  double* data() { return co_.data(); }

  double value() const;                   // requires exact_to >= 0
  double partial(const int* alpha) const; // d^alpha f, requires |alpha| ok

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double a);
  Jet& operator+=(double a);
  Jet& operator-=(double a);

 private:
  const JetContext* ctx_ = nullptr;
  std::vector<double> co_;
  int exact_ = 0;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator-(Jet a);
Jet operator*(Jet a, double s);
Jet operator*(double s, Jet a);
Jet operator+(Jet a, double s);
Jet operator-(Jet a, double s);
Jet operator*(const Jet& a, const Jet& b);

void jmul_acc(Jet& acc, const Jet& a, const Jet& b);  // acc += a*b
void jmul_sub(Jet& acc, const Jet& a, const Jet& b);  // acc -= a*b

Jet jderiv(const Jet& f, int axis);
// sum_k phi[k] * (f - f(0))^k, phi = Taylor coefficients of an outer
// univariate function at f's value; exact because (f - f0) has no constant
// term. count = order+1 coefficients expected.
Jet jcompose(const Jet& f, const double* phi, int count);
Jet jreciprocal(const Jet& f);
Jet jexp(const Jet& f);
Jet jsin(const Jet& f);
Jet jcos(const Jet& f);

// out = a^{-1} for an n x n matrix of jets (row-major), Gauss-Jordan with
// value-magnitude pivoting.
void jmat_inverse(int n, const Jet* a, Jet* out);

}  // namespace cbf
