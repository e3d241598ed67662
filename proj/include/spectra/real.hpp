#pragma once

// Configurable-precision real numbers backed by MPFR.
//
// Every mp_real carries its own precision. Binary operations round to the
// larger of the two operand precisions. Values created without an explicit
// precision take the calling thread's default, which can be changed for a
// scope with precision_scope.

#include <mpfr.h>

#include "errors.hpp"

#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace spectra {

/// Decimal significant digits of a real arithmetic. At least 16.
class Precision {
 public:
  constexpr explicit Precision(int digits) : digits_(digits) {
    if (digits < 16) throw config_error("precision must be at least 16 digits");
  }

  [[nodiscard]] constexpr int digits() const noexcept { return digits_; }

  /// Binary precision with a few guard bits.
  [[nodiscard]] mpfr_prec_t bits() const noexcept {
    return static_cast<mpfr_prec_t>(std::ceil(digits_ * 3.321928094887362)) + 8;
  }

  friend constexpr bool operator==(Precision, Precision) = default;

 private:
  int digits_;
};

namespace detail {
inline mpfr_prec_t& thread_default_bits() {
  thread_local mpfr_prec_t bits = Precision(64).bits();
  return bits;
}
}  // namespace detail

class mp_real {
 public:
  mp_real() { init(detail::thread_default_bits()); mpfr_set_zero(v_, 1); }
  mp_real(double x) { init(detail::thread_default_bits()); mpfr_set_d(v_, x, MPFR_RNDN); }  // NOLINT
  mp_real(int x) { init(detail::thread_default_bits()); mpfr_set_si(v_, x, MPFR_RNDN); }  // NOLINT
  mp_real(long x) { init(detail::thread_default_bits()); mpfr_set_si(v_, x, MPFR_RNDN); }  // NOLINT
  mp_real(double x, Precision p) { init(p.bits()); mpfr_set_d(v_, x, MPFR_RNDN); }

  /// Parses a decimal string exactly to the requested precision.
  mp_real(const std::string& s, Precision p) {
    init(p.bits());
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0)
      throw config_error("not a decimal number: " + s);
  }

  mp_real(const mp_real& o) { init(mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  mp_real(mp_real&& o) noexcept {
    // Steal the limbs; leave the source as a valid single-limb zero.
    v_[0] = o.v_[0];
    mpfr_init2(o.v_, MPFR_PREC_MIN);
    mpfr_set_zero(o.v_, 1);
  }
  mp_real& operator=(const mp_real& o) {
    if (this != &o) {
      if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  mp_real& operator=(mp_real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }
  ~mp_real() { mpfr_clear(v_); }

  [[nodiscard]] mpfr_srcptr get() const noexcept { return v_; }
  [[nodiscard]] mpfr_ptr get() noexcept { return v_; }
  [[nodiscard]] mpfr_prec_t bits() const noexcept { return mpfr_get_prec(v_); }

  [[nodiscard]] double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  explicit operator double() const noexcept { return to_double(); }

  /// Scientific notation with `digits` significant figures.
  [[nodiscard]] std::string str(int digits = 20) const {
    char* buf = nullptr;
    if (mpfr_asprintf(&buf, "%.*Re", digits - 1, v_) < 0) return "nan";
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

  mp_real& operator+=(const mp_real& o) { grow(o); mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  mp_real& operator-=(const mp_real& o) { grow(o); mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  mp_real& operator*=(const mp_real& o) { grow(o); mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  mp_real& operator/=(const mp_real& o) { grow(o); mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  mp_real& operator*=(long k) { mpfr_mul_si(v_, v_, k, MPFR_RNDN); return *this; }
  mp_real& operator*=(int k) { mpfr_mul_si(v_, v_, k, MPFR_RNDN); return *this; }
  mp_real& operator/=(long k) { mpfr_div_si(v_, v_, k, MPFR_RNDN); return *this; }
  mp_real& operator/=(int k) { mpfr_div_si(v_, v_, k, MPFR_RNDN); return *this; }

  friend mp_real operator-(const mp_real& a) {
    mp_real r(a);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }
  friend mp_real operator+(mp_real a, const mp_real& b) { return a += b; }
  friend mp_real operator-(mp_real a, const mp_real& b) { return a -= b; }
  friend mp_real operator*(mp_real a, const mp_real& b) { return a *= b; }
  friend mp_real operator/(mp_real a, const mp_real& b) { return a /= b; }
  friend mp_real operator*(mp_real a, long k) { return a *= k; }
  friend mp_real operator*(mp_real a, int k) { return a *= k; }
  friend mp_real operator*(int k, mp_real a) { return a *= k; }
  friend mp_real operator/(mp_real a, int k) { return a /= k; }
  friend mp_real operator+(mp_real a, double b) { return a += mp_real(b, a.bits()); }
  friend mp_real operator+(double b, mp_real a) { return a += mp_real(b, a.bits()); }
  friend mp_real operator-(mp_real a, double b) { return a -= mp_real(b, a.bits()); }
  friend mp_real operator-(double b, const mp_real& a) { return mp_real(b, a.bits()) - a; }
  friend mp_real operator*(mp_real a, double b) { return a *= mp_real(b, a.bits()); }
  friend mp_real operator*(double b, mp_real a) { return a *= mp_real(b, a.bits()); }
  friend mp_real operator/(mp_real a, double b) { return a /= mp_real(b, a.bits()); }
  friend mp_real operator/(double b, const mp_real& a) { return mp_real(b, a.bits()) / a; }

  friend bool operator==(const mp_real& a, const mp_real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const mp_real& a, const mp_real& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  friend bool operator==(const mp_real& a, double b) { return mpfr_cmp_d(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const mp_real& a, double b) {
    if (mpfr_nan_p(a.v_) || std::isnan(b)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp_d(a.v_, b);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }

  friend std::ostream& operator<<(std::ostream& os, const mp_real& x) {
    const auto p = os.precision();
    return os << x.str(p > 0 ? static_cast<int>(p) : 20);
  }

  // acc += a * b with a single rounding.
  friend void mul_add(mp_real& acc, const mp_real& a, const mp_real& b) {
    mpfr_fma(acc.v_, a.v_, b.v_, acc.v_, MPFR_RNDN);
  }

 private:
  mp_real(double x, mpfr_prec_t bits) { init(bits); mpfr_set_d(v_, x, MPFR_RNDN); }

  void init(mpfr_prec_t bits) { mpfr_init2(v_, bits); }
  void grow(const mp_real& o) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
  }

  mpfr_t v_;
};

/// Sets the calling thread's default precision for the lifetime of the scope.
class precision_scope {
 public:
  explicit precision_scope(Precision p) : saved_(detail::thread_default_bits()) {
    detail::thread_default_bits() = p.bits();
  }
  precision_scope(const precision_scope&) = delete;
  precision_scope& operator=(const precision_scope&) = delete;
  ~precision_scope() { detail::thread_default_bits() = saved_; }

 private:
  mpfr_prec_t saved_;
};

#define SPECTRA_MP_UNARY(name, fn)                 \
  inline mp_real name(const mp_real& x) {          \
    mp_real r(x);                                  \
    fn(r.get(), x.get(), MPFR_RNDN);               \
    return r;                                      \
  }
SPECTRA_MP_UNARY(abs, mpfr_abs)
SPECTRA_MP_UNARY(sqrt, mpfr_sqrt)
SPECTRA_MP_UNARY(exp, mpfr_exp)
SPECTRA_MP_UNARY(expm1, mpfr_expm1)
SPECTRA_MP_UNARY(log, mpfr_log)
SPECTRA_MP_UNARY(log10, mpfr_log10)
#undef SPECTRA_MP_UNARY

inline bool isfinite(const mp_real& x) { return mpfr_number_p(x.get()) != 0; }
inline int sign(const mp_real& x) { return mpfr_sgn(x.get()); }

// Scalar helpers shared by the templated modules.
inline void mul_add(double& acc, double a, double b) { acc = std::fma(a, b, acc); }
inline int sign(double x) { return (x > 0) - (x < 0); }
inline double to_double(double x) { return x; }
inline double to_double(const mp_real& x) { return x.to_double(); }

/// Converts a double to `Real`, respecting the thread's default precision.
template <class Real>
Real from_double(double x) {
  return Real(x);
}

}  // namespace spectra
