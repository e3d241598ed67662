#pragma once

// Truncated Taylor series about a fixed expansion point.
//
// coeffs[j] holds f^(j)(x0)/j!. Only the first valid_len coefficients are
// trustworthy; results of arithmetic never carry more coefficients than
// that, so stale data cannot leak into later iterations.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "real.hpp"

namespace spectra {

template <class T>
class TaylorSeries {
 public:
  using value_type = T;

  TaylorSeries(double center, std::vector<T> coeffs)
      : center_(center), valid_len_(coeffs.size()), coeffs_(std::move(coeffs)) {}

  TaylorSeries(double center, std::vector<T> coeffs, std::size_t valid_len)
      : center_(center), valid_len_(valid_len), coeffs_(std::move(coeffs)) {
    if (valid_len_ > coeffs_.size())
      throw config_error("valid_len exceeds number of coefficients");
  }

  /// The constant c, carried to `len` coefficients.
  static TaylorSeries constant(double center, const T& c, std::size_t len) {
    std::vector<T> v(len);
    if (len > 0) v[0] = c;
    return TaylorSeries(center, std::move(v));
  }

  [[nodiscard]] double center() const noexcept { return center_; }
  [[nodiscard]] std::size_t valid_len() const noexcept { return valid_len_; }
  [[nodiscard]] std::span<const T> coeffs() const noexcept { return {coeffs_.data(), valid_len_}; }
  [[nodiscard]] const T& operator[](std::size_t j) const { return coeffs_.at(j); }

  /// The first `len` coefficients (len <= valid_len).
  [[nodiscard]] TaylorSeries truncated(std::size_t len) const {
    if (len > valid_len_) throw series_exhausted("cannot extend a series by truncation");
    return TaylorSeries(center_, std::vector<T>(coeffs_.begin(), coeffs_.begin() + len));
  }

 private:
  double center_;
  std::size_t valid_len_;
  std::vector<T> coeffs_;
};

namespace detail {
template <class T>
void require_same_center(const TaylorSeries<T>& a, const TaylorSeries<T>& b) {
  if (a.center() != b.center())
    throw center_mismatch("series expanded about different points: " + std::to_string(a.center()) +
                          " vs " + std::to_string(b.center()));
}
}  // namespace detail

template <class T>
TaylorSeries<T> add(const TaylorSeries<T>& a, const TaylorSeries<T>& b) {
  detail::require_same_center(a, b);
  const std::size_t n = std::min(a.valid_len(), b.valid_len());
  std::vector<T> c;
  c.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    T s = a.coeffs()[j];
    s += b.coeffs()[j];
    c.push_back(std::move(s));
  }
  return TaylorSeries<T>(a.center(), std::move(c));
}

template <class T>
TaylorSeries<T> sub(const TaylorSeries<T>& a, const TaylorSeries<T>& b) {
  detail::require_same_center(a, b);
  const std::size_t n = std::min(a.valid_len(), b.valid_len());
  std::vector<T> c;
  c.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    T s = a.coeffs()[j];
    s -= b.coeffs()[j];
    c.push_back(std::move(s));
  }
  return TaylorSeries<T>(a.center(), std::move(c));
}

/// Cauchy product truncated to the shorter operand.
template <class T>
TaylorSeries<T> mul(const TaylorSeries<T>& a, const TaylorSeries<T>& b) {
  detail::require_same_center(a, b);
  const std::size_t n = std::min(a.valid_len(), b.valid_len());
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  std::vector<T> c(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) mul_add(c[j], ac[i], bc[j - i]);
  return TaylorSeries<T>(a.center(), std::move(c));
}

/// Series long division. b must not vanish at the center.
template <class T>
TaylorSeries<T> div(const TaylorSeries<T>& a, const TaylorSeries<T>& b) {
  detail::require_same_center(a, b);
  const std::size_t n = std::min(a.valid_len(), b.valid_len());
  if (n == 0) return TaylorSeries<T>(a.center(), {});
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  if (bc[0] == 0) throw pole_at_center("divisor vanishes at the expansion point");
  std::vector<T> r(n);
  for (std::size_t j = 0; j < n; ++j) {
    T s = ac[j];
    for (std::size_t i = 1; i <= j; ++i) s -= bc[i] * r[j - i];
    r[j] = s / bc[0];
  }
  return TaylorSeries<T>(a.center(), std::move(r));
}

template <class T>
TaylorSeries<T> derivative(const TaylorSeries<T>& a) {
  if (a.valid_len() == 0) throw series_exhausted("derivative of an exhausted series");
  const auto ac = a.coeffs();
  std::vector<T> d;
  d.reserve(a.valid_len() - 1);
  for (std::size_t j = 0; j + 1 < a.valid_len(); ++j) {
    T c = ac[j + 1];
    c *= static_cast<long>(j + 1);
    d.push_back(std::move(c));
  }
  return TaylorSeries<T>(a.center(), std::move(d));
}

template <class T>
TaylorSeries<T> scale(const TaylorSeries<T>& a, const T& s) {
  std::vector<T> c(a.coeffs().begin(), a.coeffs().end());
  for (auto& x : c) x *= s;
  return TaylorSeries<T>(a.center(), std::move(c));
}

template <class T>
const T& value_at_center(const TaylorSeries<T>& a) {
  if (a.valid_len() == 0) throw series_exhausted("value of an exhausted series");
  return a.coeffs()[0];
}

template <class T>
TaylorSeries<T> operator+(const TaylorSeries<T>& a, const TaylorSeries<T>& b) { return add(a, b); }
template <class T>
TaylorSeries<T> operator-(const TaylorSeries<T>& a, const TaylorSeries<T>& b) { return sub(a, b); }
template <class T>
TaylorSeries<T> operator*(const TaylorSeries<T>& a, const TaylorSeries<T>& b) { return mul(a, b); }
template <class T>
TaylorSeries<T> operator/(const TaylorSeries<T>& a, const TaylorSeries<T>& b) { return div(a, b); }

/// Series of the polynomial c0 + c1 (x - x0) + ..., zero-padded to `len`.
template <class T>
TaylorSeries<T> polynomial_series(double center, std::vector<T> low_order, std::size_t len) {
  low_order.resize(len);
  return TaylorSeries<T>(center, std::move(low_order));
}

}  // namespace spectra
