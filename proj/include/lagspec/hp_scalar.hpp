#pragma once

// Minimal RAII wrapper over an MPFR float with per-object precision.
//
// Precision travels with each value (results take the larger precision of
// their operands), so no global or thread-local default is involved and
// independent computations may run concurrently.

#include <mpfr.h>

#include <cmath>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace lagspec {

/// Working precision of the reference computations, in decimal digits.
struct HpContext {
  int digits{24};

  mpfr_prec_t bits() const {
    // digits * log2(10), plus two guard bits
    return static_cast<mpfr_prec_t>(std::ceil(digits * 3.321928094887362)) + 2;
  }
};

inline void validate(const HpContext& ctx) {
  if (ctx.digits < 24 || ctx.digits > 64) {
    throw std::domain_error("HpContext: digits must lie in [24, 64], got " + std::to_string(ctx.digits));
  }
}

class HpScalar {
 public:
  explicit HpScalar(const HpContext& ctx) : HpScalar(ctx.bits()) {}
  HpScalar(const HpContext& ctx, double v) : HpScalar(ctx.bits()) { mpfr_set_d(v_, v, MPFR_RNDN); }
  HpScalar(const HpContext& ctx, long v) : HpScalar(ctx.bits()) { mpfr_set_si(v_, v, MPFR_RNDN); }
  HpScalar(const HpContext& ctx, const std::string& text) : HpScalar(ctx.bits()) {
    if (mpfr_set_str(v_, text.c_str(), 0, MPFR_RNDN) != 0) {
      throw std::invalid_argument("HpScalar: cannot parse '" + text + "'");
    }
  }

  HpScalar(const HpScalar& o) : HpScalar(mpfr_get_prec(o.v_)) { mpfr_set(v_, o.v_, MPFR_RNDN); }
  HpScalar(HpScalar&& o) noexcept : HpScalar(mpfr_get_prec(o.v_)) { mpfr_swap(v_, o.v_); }
  HpScalar& operator=(const HpScalar& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  HpScalar& operator=(HpScalar&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~HpScalar() { mpfr_clear(v_); }

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  /// Scientific decimal with `digits` significant figures.
  std::string to_string(int digits) const {
    if (mpfr_zero_p(v_)) return mpfr_signbit(v_) ? "-0" : "0";
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_signbit(v_) ? "-inf" : "inf";
    char* raw = nullptr;
    if (mpfr_asprintf(&raw, "%.*Re", digits - 1, v_) < 0) throw std::runtime_error("HpScalar: formatting failed");
    std::unique_ptr<char, decltype(&mpfr_free_str)> owned(raw, &mpfr_free_str);
    return std::string(owned.get());
  }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  HpScalar& operator+=(const HpScalar& o) { return apply(o, mpfr_add); }
  HpScalar& operator-=(const HpScalar& o) { return apply(o, mpfr_sub); }
  HpScalar& operator*=(const HpScalar& o) { return apply(o, mpfr_mul); }
  HpScalar& operator/=(const HpScalar& o) { return apply(o, mpfr_div); }

  friend HpScalar operator+(HpScalar a, const HpScalar& b) { return a += b; }
  friend HpScalar operator-(HpScalar a, const HpScalar& b) { return a -= b; }
  friend HpScalar operator*(HpScalar a, const HpScalar& b) { return a *= b; }
  friend HpScalar operator/(HpScalar a, const HpScalar& b) { return a /= b; }

  friend HpScalar operator-(HpScalar a) {
    mpfr_neg(a.v_, a.v_, MPFR_RNDN);
    return a;
  }

  friend bool operator<(const HpScalar& a, const HpScalar& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const HpScalar& a, const HpScalar& b) { return b < a; }

  friend HpScalar abs(HpScalar a) {
    mpfr_abs(a.v_, a.v_, MPFR_RNDN);
    return a;
  }
  friend HpScalar exp(HpScalar a) {
    mpfr_exp(a.v_, a.v_, MPFR_RNDN);
    return a;
  }
  friend HpScalar sqrt(HpScalar a) {
    mpfr_sqrt(a.v_, a.v_, MPFR_RNDN);
    return a;
  }

 private:
  explicit HpScalar(mpfr_prec_t bits) { mpfr_init2(v_, bits); }

  template <class Op>
  HpScalar& apply(const HpScalar& o, Op op) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    op(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }

  mpfr_t v_;
};

}  // namespace lagspec
