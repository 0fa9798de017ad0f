#include "wcg/bounds.hpp"

#include <limits>

#include <mpfr.h>

namespace wcg {

namespace {

constexpr mpfr_prec_t kPrec = 256;

class Real {
 public:
  Real() { mpfr_init2(x_, kPrec); mpfr_set_zero(x_, 1); }
  explicit Real(double v) : Real() { mpfr_set_d(x_, v, MPFR_RNDN); }
  static Real of_int(std::int64_t v) {
    Real r;
    mpfr_set_sj(r.x_, v, MPFR_RNDN);
    return r;
  }
  Real(const Real& o) : Real() { mpfr_set(x_, o.x_, MPFR_RNDN); }
  Real& operator=(const Real& o) {
    mpfr_set(x_, o.x_, MPFR_RNDN);
    return *this;
  }
  ~Real() { mpfr_clear(x_); }

  mpfr_ptr get() { return x_; }
  mpfr_srcptr get() const { return x_; }
  double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }

  friend Real operator+(const Real& a, const Real& b) { return apply(mpfr_add, a, b); }
  friend Real operator-(const Real& a, const Real& b) { return apply(mpfr_sub, a, b); }
  friend Real operator*(const Real& a, const Real& b) { return apply(mpfr_mul, a, b); }
  friend Real operator/(const Real& a, const Real& b) { return apply(mpfr_div, a, b); }
  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.x_, b.x_) != 0; }

 private:
  template <class Op>
  static Real apply(Op op, const Real& a, const Real& b) {
    Real r;
    op(r.x_, a.x_, b.x_, MPFR_RNDN);
    return r;
  }
  mpfr_t x_;
};

Real log2_of(const Real& a) {
  Real r;
  mpfr_log2(r.get(), a.get(), MPFR_RNDN);
  return r;
}

// log2(x!) via lngamma(x + 1).
Real log2_factorial(const Real& x) {
  Real r, ln2;
  Real shifted = x + Real(1.0);
  mpfr_lngamma(r.get(), shifted.get(), MPFR_RNDN);
  mpfr_const_log2(ln2.get(), MPFR_RNDN);
  return r / ln2;
}

}  // namespace

BoundReport union_bound_value(std::int64_t k, EventVariant variant) {
  if (k < 4) throw GameError(ErrorCode::config_error, "union bound needs k >= 4");
  BoundReport rep;
  rep.k = k;
  rep.variant = variant;
  const Real K = Real::of_int(k);
  const Real lg = log2_of(K);
  const Real lead = variant == EventVariant::good_pairs ? K / Real(6.0) : K / Real(3.0);
  const Real exponent = lead - K / (Real(2.0) * lg);  // log2 of the unfloored cap
  const Real m = Real::of_int(k - 1);
  constexpr double inf = std::numeric_limits<double>::infinity();

  // log2 d with d = floor(2^exponent); exact while d fits comfortably.
  Real log2_d = exponent;
  Real d;
  bool d_exact = exponent < Real(62.0);
  bool d_zero = false;
  if (d_exact) {
    mpfr_ui_pow(d.get(), 2, exponent.get(), MPFR_RNDN);
    mpfr_floor(d.get(), d.get());
    d_zero = mpfr_zero_p(d.get()) != 0;
    if (!d_zero) log2_d = log2_of(d);
  }
  rep.index_set_exact = d_exact;
  rep.log2_degree_cap = d_zero ? -inf : log2_d.to_double();

  Real index;
  bool index_empty = d_zero;
  if (variant == EventVariant::good_pairs) {
    if (d_exact && !d_zero) {
      if (d < m) {
        index_empty = true;
      } else {
        index = log2_factorial(d) - log2_factorial(m) - log2_factorial(d - m);
      }
    } else if (!d_zero) {
      // C(d, m) <= d^m / m!
      index = m * log2_d - log2_factorial(m);
    }
  } else if (!d_zero) {
    index = m * log2_d + log2_factorial(m);
  }

  Real event = variant == EventVariant::good_pairs ? K - K * K / Real(6.0)
                                                   : K * K / (lg * lg) - K * K / Real(3.0);
  const Real target = Real(0.0) - log2_of(Real(4.0) * K);
  rep.log2_event = event.to_double();
  rep.log2_target = target.to_double();
  if (index_empty) {
    rep.log2_index_set = -inf;
    rep.log2_union = -inf;
    rep.below_target = true;
  } else {
    const Real total = index + event;
    rep.log2_index_set = index.to_double();
    rep.log2_union = total.to_double();
    rep.below_target = total < target;
  }
  return rep;
}

}  // namespace wcg
