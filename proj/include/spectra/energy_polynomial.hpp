#pragma once

// Polynomials in the energy E, used as Taylor coefficients so that a single
// AIM recursion yields the termination condition for every E at once.

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace spectra {

template <class Real>
class EnergyPolynomial {
 public:
  EnergyPolynomial() = default;
  explicit EnergyPolynomial(std::vector<Real> c) : c_(std::move(c)) {}

  /// a + b E
  static EnergyPolynomial linear(Real a, Real b) { return EnergyPolynomial({std::move(a), std::move(b)}); }

  [[nodiscard]] const std::vector<Real>& coeffs() const noexcept { return c_; }
  [[nodiscard]] std::size_t size() const noexcept { return c_.size(); }

  [[nodiscard]] Real operator()(const Real& e) const {
    if (c_.empty()) return Real(0);
    Real r = c_.back();
    for (std::size_t k = c_.size() - 1; k-- > 0;) {
      r *= e;
      r += c_[k];
    }
    return r;
  }

  EnergyPolynomial& operator+=(const EnergyPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  EnergyPolynomial& operator-=(const EnergyPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  EnergyPolynomial& operator*=(long s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  EnergyPolynomial& operator*=(const EnergyPolynomial& o) {
    EnergyPolynomial r;
    mul_add(r, *this, o);
    return *this = std::move(r);
  }

  friend EnergyPolynomial operator+(EnergyPolynomial a, const EnergyPolynomial& b) { return a += b; }
  friend EnergyPolynomial operator-(EnergyPolynomial a, const EnergyPolynomial& b) { return a -= b; }
  friend EnergyPolynomial operator*(const EnergyPolynomial& a, const EnergyPolynomial& b) {
    EnergyPolynomial r;
    mul_add(r, a, b);
    return r;
  }

  // acc += a * b
  friend void mul_add(EnergyPolynomial& acc, const EnergyPolynomial& a, const EnergyPolynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return;
    const std::size_t n = a.c_.size() + b.c_.size() - 1;
    if (acc.c_.size() < n) acc.c_.resize(n);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) mul_add(acc.c_[i + j], a.c_[i], b.c_[j]);
  }

 private:
  std::vector<Real> c_;
};

}  // namespace spectra
