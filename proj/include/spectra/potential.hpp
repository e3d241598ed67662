#pragma once

// The short-range potential
//
//   V(r) = V0 (exp(-lambda r) - gamma) / (exp(lambda r) - 1)
//
// with its 1/r singularity split off as V = Z/r + U(r), the coordinate map
// x = 1 - 2 exp(-lambda r), and the AIM seed functions of the transformed
// S-wave radial equation y'' = k0 y' + z0 y.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "energy_polynomial.hpp"
#include "errors.hpp"
#include "real.hpp"
#include "series.hpp"

namespace spectra {

/// Physical parameters (V0, lambda, gamma) and angular momentum, atomic units.
class PotentialParams {
 public:
  PotentialParams(double V0, double lambda, double gamma, int ell = 0)
      : V0_(V0), lambda_(lambda), gamma_(gamma), ell_(ell) {
    if (!std::isfinite(V0) || !std::isfinite(lambda) || !std::isfinite(gamma))
      throw config_error("potential parameters must be finite");
    if (!(lambda > 0)) throw config_error("lambda must be positive");
    if (ell < 0) throw config_error("ell must be non-negative");
  }

  [[nodiscard]] double V0() const noexcept { return V0_; }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }
  [[nodiscard]] int ell() const noexcept { return ell_; }

  /// 0 < gamma < 1: the regime with a valley and a non-orbital barrier.
  [[nodiscard]] bool interesting_regime() const noexcept { return gamma_ > 0 && gamma_ < 1; }

  friend bool operator==(const PotentialParams&, const PotentialParams&) = default;

 private:
  double V0_;
  double lambda_;
  double gamma_;
  int ell_;
};

/// Residue Z of the 1/r singularity.
inline double coulomb_strength(const PotentialParams& p) { return p.V0() * (1.0 - p.gamma()) / p.lambda(); }

template <class Real>
concept RealNumber = std::floating_point<Real> || std::same_as<Real, mp_real>;

template <RealNumber Real>
Real eval_V(const PotentialParams& p, const Real& r) {
  using std::exp;
  using std::expm1;
  if (!(r > 0)) throw domain_error("V(r) is singular at r <= 0");
  const Real t = r * p.lambda();
  // (e^{-t} - g)/(e^t - 1) = (1 - g)/(e^t - 1) - e^{-t}
  return p.V0() * ((1.0 - p.gamma()) / expm1(t) - exp(-t));
}

namespace detail {
inline long to_mp_bits(double) { return 53; }
inline long to_mp_bits(const mp_real& x) { return static_cast<long>(x.bits()); }

// 1/(e^t - 1) - 1/t for t >= 0, free of cancellation.
template <class Real>
Real reciprocal_expm1_minus_pole(const Real& t) {
  using std::abs;
  using std::expm1;
  if (t == 0) return Real(-0.5);
  if (t < 1) {
    // t - (e^t - 1) = -t^2 sum_k t^k/(k+2)!, all terms positive.
    const Real eps(std::ldexp(1.0, -static_cast<int>(to_mp_bits(t))));
    Real term(0.5);
    Real sum(0.5);
    for (long k = 1; k < 400; ++k) {
      term *= t;
      term /= Real(static_cast<double>(k + 2));
      sum += term;
      if (term < eps * sum) break;
    }
    return -sum / (expm1(t) / t);
  }
  return 1.0 / expm1(t) - 1.0 / t;
}

}  // namespace detail

/// Regular part U(r) = V(r) - Z/r, finite at r = 0 where U(0) = -V0 (3 - gamma)/2.
template <RealNumber Real>
Real eval_U(const PotentialParams& p, const Real& r) {
  using std::exp;
  if (r < 0) throw domain_error("U(r) is defined for r >= 0");
  if (r == 0) return Real(-p.V0() * (3.0 - p.gamma()) / 2.0);
  const Real t = r * p.lambda();
  return p.V0() * ((1.0 - p.gamma()) * detail::reciprocal_expm1_minus_pole(t) - exp(-t));
}

struct Diagnostic {
  bool ok = true;
  std::string message;
};

/// Necessary (not sufficient) conditions for bound states to exist.
inline Diagnostic bound_state_precheck(const PotentialParams& p) {
  if (p.interesting_regime()) return {true, "0 < gamma < 1: bound states possible for either sign of V0"};
  if (p.gamma() == 0 || p.gamma() == 1)
    return {true, "gamma on the boundary of (0,1); potential reduces to a Hulthen/Yukawa-like form"};
  if ((p.V0() > 0) == (p.gamma() > 0) && p.V0() != 0)
    return {true, "gamma outside (0,1) and sign(V0) = sign(gamma): bound states possible"};
  return {false, "gamma outside (0,1) requires sign(V0) = sign(gamma); no bound states can exist"};
}

struct PotentialMinimum {
  double r;
  double V;
};

/// Locates the valley of V on (0, inf): log-spaced scan then golden-section refinement.
inline PotentialMinimum v_min(const PotentialParams& p) {
  constexpr int scan_points = 10000;
  const double r_lo = 1e-4 / p.lambda();
  const double r_hi = 60.0 / p.lambda();
  const double ratio = std::log(r_hi / r_lo) / (scan_points - 1);
  auto r_at = [&](int i) { return r_lo * std::exp(ratio * i); };

  int best = 0;
  double best_v = eval_V(p, r_lo);
  for (int i = 1; i < scan_points; ++i) {
    const double v = eval_V(p, r_at(i));
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  if (best == 0 || best == scan_points - 1 || !(best_v < 0))
    throw no_convergence("potential has no interior minimum (monotone or no valley)");

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = r_at(best - 1);
  double b = r_at(best + 1);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval_V(p, c);
  double fd = eval_V(p, d);
  while (b - a > 1e-12 * (a + b) / 2) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval_V(p, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval_V(p, d);
    }
  }
  const double r = (a + b) / 2;
  return {r, eval_V(p, r)};
}

inline double map_x(const PotentialParams& p, double r) {
  if (r < 0) throw domain_error("map_x is defined for r >= 0");
  return -2.0 * std::expm1(-p.lambda() * r) - 1.0;
}

inline double inverse_map_x(const PotentialParams& p, double x) {
  if (!(x >= -1 && x < 1)) throw domain_error("x must lie in [-1, 1)");
  return -std::log((1.0 - x) / 2.0) / p.lambda();
}

namespace detail {
inline void require_seed_preconditions(const PotentialParams& p, double x0, std::size_t L) {
  if (p.ell() != 0) throw config_error("AIM seeds are derived for S-waves only (ell = 0)");
  if (!(std::abs(x0) < 1)) throw pole_at_center("seed functions have poles at x = +-1");
  if (L < 1) throw config_error("series length must be at least 1");
}

// The x-dependent building blocks of the seeds about x0:
// 1/(1-x), (1/2)/(1+x) - gamma/(1-x^2), and 1/(1-x)^2.
template <class Real>
struct SeedParts {
  TaylorSeries<Real> inv_one_minus;
  TaylorSeries<Real> potential_part;
  TaylorSeries<Real> inv_one_minus_sq;
};

template <class Real>
SeedParts<Real> seed_parts(const PotentialParams& p, double x0, std::size_t L) {
  const auto one = TaylorSeries<Real>::constant(x0, Real(1), L);
  const auto one_minus = polynomial_series<Real>(x0, {Real(1.0 - x0), Real(-1)}, L);
  const auto one_plus = polynomial_series<Real>(x0, {Real(1.0 + x0), Real(1)}, L);
  const auto half = TaylorSeries<Real>::constant(x0, Real(0.5), L);
  const auto g = TaylorSeries<Real>::constant(x0, Real(p.gamma()), L);
  auto pot = half / one_plus - g / (one_minus * one_plus);
  return {one / one_minus, std::move(pot), one / (one_minus * one_minus)};
}
}  // namespace detail

/// k0 = 1/(1-x) and z0 = (2 V0/lambda^2)[(1/2)/(1+x) - gamma/(1-x^2) - (E/V0)/(1-x)^2]
/// as length-L Taylor series about x0.
template <class Real>
std::pair<TaylorSeries<Real>, TaylorSeries<Real>> seed_functions(const PotentialParams& p, const Real& E,
                                                                  double x0, std::size_t L) {
  detail::require_seed_preconditions(p, x0, L);
  auto parts = detail::seed_parts<Real>(p, x0, L);
  const double lam2 = p.lambda() * p.lambda();
  const Real c(2.0 * p.V0() / lam2);
  // The E/V0 term is written as 2E/lambda^2 so that V0 = 0 stays well defined.
  const Real ce = E * Real(-2.0 / lam2);
  auto z0 = scale(parts.potential_part, c) + scale(parts.inv_one_minus_sq, ce);
  return {std::move(parts.inv_one_minus), std::move(z0)};
}

/// The same seeds with coefficients kept as polynomials in E (k0 constant, z0 linear).
template <class Real>
std::pair<TaylorSeries<EnergyPolynomial<Real>>, TaylorSeries<EnergyPolynomial<Real>>> energy_seed_functions(
    const PotentialParams& p, double x0, std::size_t L) {
  using Poly = EnergyPolynomial<Real>;
  detail::require_seed_preconditions(p, x0, L);
  const auto parts = detail::seed_parts<Real>(p, x0, L);
  const double lam2 = p.lambda() * p.lambda();
  const Real c(2.0 * p.V0() / lam2);
  const Real ce(-2.0 / lam2);
  std::vector<Poly> k0;
  std::vector<Poly> z0;
  k0.reserve(L);
  z0.reserve(L);
  for (std::size_t j = 0; j < L; ++j) {
    k0.emplace_back(std::vector<Real>{parts.inv_one_minus.coeffs()[j]});
    z0.push_back(Poly::linear(c * parts.potential_part.coeffs()[j], ce * parts.inv_one_minus_sq.coeffs()[j]));
  }
  return {TaylorSeries<Poly>(x0, std::move(k0)), TaylorSeries<Poly>(x0, std::move(z0))};
}

}  // namespace spectra
