#pragma once

// Hamiltonian diagonalization in the Laguerre (J-matrix) basis
//
//   chi_n(r) = a_n (mu r)^{l+1} exp(-mu r/2) L_n^{2l+1}(mu r),
//
// in which T + Z/r is tridiagonal. The regular remainder U(r) = V(r) - Z/r is
// added through Gauss quadrature whose nodes and weights come from the
// eigendecomposition of the (tridiagonal) overlap matrix. All three matrices
// carry the same overall factor mu, so H c = E S c needs no rescaling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "potential.hpp"

namespace spectra {

struct HdmConfig {
  int N = 100;
  double mu = 1.0;
  int ell = 0;
  /// Quadrature node count; defaults to N.
  std::optional<int> quadrature_N;
  /// Replaces the Coulomb residue Z (pure-Coulomb checks).
  std::optional<double> coulomb_override;
  /// A negative eigenvalue is bound if it moves less than bound_tol when the
  /// basis grows by bound_check_extra functions.
  int bound_check_extra = 20;
  double bound_tol = 1e-6;

  [[nodiscard]] int nodes() const { return quadrature_N.value_or(N); }

  void validate() const {
    if (N < 1) throw config_error("basis size N must be at least 1");
    if (!(mu > 0)) throw config_error("mu must be positive");
    if (ell < 0) throw config_error("ell must be non-negative");
    if (nodes() < N) throw config_error("quadrature_N must be >= N");
    if (bound_check_extra < 0) throw config_error("bound_check_extra must be non-negative");
  }
};

/// Gauss nodes omega_k (ascending) and normalized eigenvectors Lambda (column k).
struct QuadratureRule {
  std::vector<double> nodes;
  Matrix vectors;
};

/// Reference Hamiltonian T + Z/r, tridiagonal in the basis.
inline SymTridiag h0_matrix(const HdmConfig& cfg, double Z) {
  cfg.validate();
  const double mu = cfg.mu;
  const double l = cfg.ell;
  SymTridiag t;
  t.diag.resize(static_cast<std::size_t>(cfg.N));
  t.offdiag.resize(static_cast<std::size_t>(cfg.N - 1));
  for (int n = 0; n < cfg.N; ++n) t.diag[n] = mu * mu / 4.0 * (n + l + 1.0 + 4.0 * Z / mu);
  for (int n = 0; n + 1 < cfg.N; ++n) t.offdiag[n] = mu * mu / 8.0 * std::sqrt((n + 1.0) * (n + 2.0 * l + 2.0));
  return t;
}

inline SymTridiag overlap_matrix(int N, int ell) {
  SymTridiag t;
  t.diag.resize(static_cast<std::size_t>(N));
  t.offdiag.resize(static_cast<std::size_t>(std::max(N - 1, 0)));
  for (int n = 0; n < N; ++n) t.diag[n] = 2.0 * (n + ell + 1.0);
  for (int n = 0; n + 1 < N; ++n) t.offdiag[n] = -std::sqrt((n + 1.0) * (n + 2.0 * ell + 2.0));
  return t;
}

inline SymTridiag overlap_matrix(const HdmConfig& cfg) {
  cfg.validate();
  return overlap_matrix(cfg.N, cfg.ell);
}

/// Gauss rule with quadrature_N nodes for the weight x^{2l+1} e^{-x}.
inline QuadratureRule quadrature(const HdmConfig& cfg) {
  cfg.validate();
  auto ep = tridiag_eigen(overlap_matrix(cfg.nodes(), cfg.ell));
  return {std::move(ep.values), std::move(ep.vectors)};
}

/// U_nm = sum_k Lambda_nk Lambda_mk f(omega_k) over the first N basis rows,
/// where f(x) = x U(x / mu).
template <class F>
SymDense u_matrix(const QuadratureRule& rule, int N, double mu, F&& u_of_r) {
  const std::size_t n = static_cast<std::size_t>(N);
  const std::size_t k_count = rule.nodes.size();
  if (rule.vectors.rows() < n) throw config_error("quadrature rule has fewer rows than the basis");
  std::vector<double> f(k_count);
  for (std::size_t k = 0; k < k_count; ++k) f[k] = rule.nodes[k] * u_of_r(rule.nodes[k] / mu);
  SymDense out(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) s += rule.vectors(a, k) * rule.vectors(b, k) * f[k];
      out.set(a, b, s);
    }
  return out;
}

inline SymDense u_matrix(const PotentialParams& p, const HdmConfig& cfg) {
  cfg.validate();
  return u_matrix(quadrature(cfg), cfg.N, cfg.mu, [&](double r) { return eval_U(p, r); });
}

struct HdmResult {
  std::vector<double> bound;    ///< negative eigenvalues stable under basis growth, ascending
  std::vector<double> flagged;  ///< negative eigenvalues that moved: discretized continuum
  std::vector<double> all;      ///< full spectrum at N
  double mu = 0;
  int N = 0;
  double Z = 0;
};

/// Generalized eigenvalues of H = H0 + U against the overlap, ascending.
inline std::vector<double> hdm_eigenvalues(const PotentialParams& p, const HdmConfig& cfg) {
  cfg.validate();
  const double Z = cfg.coulomb_override.value_or(coulomb_strength(p));
  SymDense h = u_matrix(p, cfg);
  h += h0_matrix(cfg, Z);
  return generalized_eigen(h, overlap_matrix(cfg)).values;
}

/// Bound-state spectrum at the configured N and mu. The angular momentum is
/// taken from the potential parameters.
inline HdmResult hdm_spectrum(const PotentialParams& p, HdmConfig cfg) {
  cfg.ell = p.ell();
  cfg.validate();
  HdmResult res;
  res.mu = cfg.mu;
  res.N = cfg.N;
  res.Z = cfg.coulomb_override.value_or(coulomb_strength(p));
  res.all = hdm_eigenvalues(p, cfg);

  HdmConfig bigger = cfg;
  bigger.N += cfg.bound_check_extra;
  bigger.quadrature_N = cfg.nodes() + cfg.bound_check_extra;
  const auto ref = cfg.bound_check_extra > 0 ? hdm_eigenvalues(p, bigger) : res.all;
  for (std::size_t k = 0; k < res.all.size() && res.all[k] < 0; ++k) {
    if (std::abs(res.all[k] - ref[k]) < cfg.bound_tol)
      res.bound.push_back(res.all[k]);
    else
      res.flagged.push_back(res.all[k]);
  }
  return res;
}

struct PlateauReport {
  std::vector<double> mu;
  /// levels[i] holds the lowest `states` eigenvalues at mu[i].
  std::vector<std::vector<double>> levels;
  int states = 0;
  /// adjacent_digits[i][k]: significant digits state k shares between mu[i] and mu[i+1].
  std::vector<std::vector<double>> adjacent_digits;
  /// Digits each state keeps across the recommended window / the whole grid.
  std::vector<double> window_digits;
  std::vector<double> range_digits;
  std::size_t window_begin = 0;  ///< first grid index of the window
  std::size_t window_end = 0;    ///< one past the last grid index
  bool has_plateau = false;
  double recommended_mu = 0;

  [[nodiscard]] std::size_t window_length() const { return window_end - window_begin; }
};

/// Number of leading significant digits two values share (capped at 16).
inline double shared_digits(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0) return 16.0;
  const double diff = std::abs(a - b);
  if (diff == 0) return 16.0;
  return std::clamp(-std::log10(diff / scale), 0.0, 16.0);
}

namespace detail {
inline double spread_digits(const std::vector<std::vector<double>>& levels, std::size_t k, std::size_t begin,
                            std::size_t end) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = std::min(lo, levels[i][k]);
    hi = std::max(hi, levels[i][k]);
  }
  return shared_digits(lo, hi);
}
}  // namespace detail

/// Scans mu on a log grid and locates the plateau of stability: the longest
/// run over which the ground state is stable to at least 10 digits between
/// neighbours. The recommended mu is the window point where all tracked
/// states are jointly most stable.
inline PlateauReport plateau_scan(const PotentialParams& p, const HdmConfig& base, double mu_lo, double mu_hi,
                                  int steps) {
  if (!(mu_lo > 0 && mu_lo < mu_hi)) throw config_error("plateau scan needs 0 < mu_lo < mu_hi");
  if (steps < 2) throw config_error("plateau scan needs at least 2 steps");
  constexpr double stable_digits = 10.0;

  PlateauReport rep;
  std::vector<std::vector<double>> spectra_at;
  std::size_t states = 1;
  for (int i = 0; i < steps; ++i) {
    HdmConfig cfg = base;
    cfg.ell = p.ell();
    cfg.mu = mu_lo * std::pow(mu_hi / mu_lo, static_cast<double>(i) / (steps - 1));
    rep.mu.push_back(cfg.mu);
    auto ev = hdm_eigenvalues(p, cfg);
    const auto negatives = static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [](double e) { return e < 0; }));
    states = std::max(states, negatives);
    spectra_at.push_back(std::move(ev));
  }
  states = std::min(states, spectra_at.front().size());
  rep.states = static_cast<int>(states);
  for (auto& ev : spectra_at) rep.levels.emplace_back(ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(states));

  for (std::size_t i = 0; i + 1 < rep.mu.size(); ++i) {
    std::vector<double> d(states);
    for (std::size_t k = 0; k < states; ++k) d[k] = shared_digits(rep.levels[i][k], rep.levels[i + 1][k]);
    rep.adjacent_digits.push_back(std::move(d));
  }

  // Longest run of adjacent pairs with a stable ground state.
  std::size_t best_begin = 0;
  std::size_t best_pairs = 0;
  for (std::size_t i = 0; i < rep.adjacent_digits.size();) {
    if (rep.adjacent_digits[i][0] < stable_digits) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < rep.adjacent_digits.size() && rep.adjacent_digits[j][0] >= stable_digits) ++j;
    if (j - i > best_pairs) {
      best_pairs = j - i;
      best_begin = i;
    }
    i = j;
  }
  rep.has_plateau = best_pairs + 1 >= 3;

  if (best_pairs > 0) {
    rep.window_begin = best_begin;
    rep.window_end = best_begin + best_pairs + 1;
  } else {
    // No stable pair at all: fall back to the single most stable pair.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < rep.adjacent_digits.size(); ++i)
      if (rep.adjacent_digits[i][0] > rep.adjacent_digits[arg][0]) arg = i;
    rep.window_begin = arg;
    rep.window_end = arg + 2;
  }

  // Score each window point by the digits every state shares with its
  // neighbours inside the window.
  double best_score = -1;
  const double center = 0.5 * (static_cast<double>(rep.window_begin) + static_cast<double>(rep.window_end - 1));
  std::size_t best_i = rep.window_begin;
  for (std::size_t i = rep.window_begin; i < rep.window_end; ++i) {
    double score = 0;
    for (std::size_t k = 0; k < states; ++k) {
      double d = 16.0;
      if (i > rep.window_begin) d = std::min(d, rep.adjacent_digits[i - 1][k]);
      if (i + 1 < rep.window_end) d = std::min(d, rep.adjacent_digits[i][k]);
      score += d;
    }
    const bool better = score > best_score + 1e-9 ||
                        (std::abs(score - best_score) <= 1e-9 &&
                         std::abs(static_cast<double>(i) - center) < std::abs(static_cast<double>(best_i) - center));
    if (better) {
      best_score = score;
      best_i = i;
    }
  }
  rep.recommended_mu = rep.mu[best_i];

  for (std::size_t k = 0; k < states; ++k) {
    rep.window_digits.push_back(detail::spread_digits(rep.levels, k, rep.window_begin, rep.window_end));
    rep.range_digits.push_back(detail::spread_digits(rep.levels, k, 0, rep.levels.size()));
  }
  return rep;
}

/// Plateau scan over [lambda/2, 20 lambda] with 40 steps.
inline PlateauReport default_plateau(const PotentialParams& p, const HdmConfig& base) {
  return plateau_scan(p, base, p.lambda() / 2.0, 20.0 * p.lambda(), 40);
}

}  // namespace spectra
