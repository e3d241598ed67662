#pragma once

// Asymptotic iteration for y'' = k0 y' + z0 y.
//
//   k_n = k_{n-1}' + z_{n-1} + k0 k_{n-1}
//   z_n = z_{n-1}' + z0 k_{n-1}
//   delta_n = k_{n-1} z_n - z_{n-1} k_n
//
// Eigenvalues are the E where delta_n(x0; E) = 0 once the roots stop moving
// with n. The engine runs the recursion once on Taylor series whose
// coefficients are polynomials in E, so delta_n(x0; .) is obtained exactly as
// a polynomial and can be scanned and bisected cheaply for every n.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "energy_polynomial.hpp"
#include "errors.hpp"
#include "potential.hpp"
#include "real.hpp"
#include "roots.hpp"
#include "series.hpp"

namespace spectra {

struct AimConfig {
  double x0 = 0.0;
  int n_min = 4;
  int n_max = 120;
  int e_grid = 2000;
  /// Defaults to 1.02 * min V when unset.
  std::optional<double> e_lo;
  double e_hi = -1e-10;
  double stability_tol = 1e-10;
  int stability_runs = 3;
  Precision precision{64};
  /// Initial Taylor length; defaults to n_max + 4.
  std::optional<std::size_t> series_length;

  [[nodiscard]] std::size_t length() const { return series_length.value_or(static_cast<std::size_t>(n_max) + 4); }

  void validate() const {
    if (n_min < 2) throw config_error("n_min must be at least 2");
    if (n_max < n_min) throw config_error("n_max must be >= n_min");
    if (stability_runs < 2) throw config_error("stability_runs must be at least 2");
    if (e_grid < 2) throw config_error("e_grid must be at least 2");
    if (!(stability_tol > 0)) throw config_error("stability_tol must be positive");
    if (!(std::abs(x0) < 1)) throw config_error("x0 must lie strictly inside (-1, 1)");
    if (length() < static_cast<std::size_t>(n_max) + 1)
      throw config_error("series length " + std::to_string(length()) + " cannot support " +
                         std::to_string(n_max) + " iterations; use at least n_max + 2");
  }
};

/// One step of the recursion. Consumes one derivative order.
template <class T>
std::pair<TaylorSeries<T>, TaylorSeries<T>> aim_step(const TaylorSeries<T>& k_prev, const TaylorSeries<T>& z_prev,
                                                     const TaylorSeries<T>& k0, const TaylorSeries<T>& z0) {
  if (k_prev.valid_len() < 2 || z_prev.valid_len() < 2)
    throw series_exhausted("AIM series exhausted after " + std::to_string(k0.valid_len() - k_prev.valid_len()) +
                           " iterations; increase the initial series length");
  auto k_n = derivative(k_prev) + z_prev + k0 * k_prev;
  auto z_n = derivative(z_prev) + z0 * k_prev;
  return {std::move(k_n), std::move(z_n)};
}

/// Termination determinant at the common expansion point.
template <class T>
T delta_n(const TaylorSeries<T>& k_nm1, const TaylorSeries<T>& z_nm1, const TaylorSeries<T>& k_n,
          const TaylorSeries<T>& z_n) {
  T d = value_at_center(k_nm1) * value_at_center(z_n);
  d -= value_at_center(z_nm1) * value_at_center(k_n);
  return d;
}

/// delta_1 ... delta_{n_max} as polynomials in E.
template <class Real>
class DeltaTable {
 public:
  using Poly = EnergyPolynomial<Real>;

  DeltaTable(const TaylorSeries<Poly>& k0, const TaylorSeries<Poly>& z0, int n_max) {
    deltas_.reserve(static_cast<std::size_t>(n_max));
    TaylorSeries<Poly> k = k0;
    TaylorSeries<Poly> z = z0;
    for (int n = 1; n <= n_max; ++n) {
      auto [k_n, z_n] = aim_step(k, z, k0, z0);
      deltas_.push_back(delta_n(k, z, k_n, z_n));
      k = std::move(k_n);
      z = std::move(z_n);
    }
  }

  [[nodiscard]] int n_max() const noexcept { return static_cast<int>(deltas_.size()); }
  [[nodiscard]] const Poly& delta(int n) const { return deltas_.at(static_cast<std::size_t>(n - 1)); }

 private:
  std::vector<Poly> deltas_;
};

/// Energy grid on [lo, hi] (hi < 0): half uniform, half log-spaced in |E| so
/// that shallow levels near 0- are resolved.
inline std::vector<double> energy_grid(double lo, double hi, int count) {
  if (!(lo < hi)) throw config_error("energy bracket must satisfy e_lo < e_hi");
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(count) + 2);
  const int n_uniform = count / 2;
  const int n_log = count - n_uniform;
  for (int i = 0; i < n_uniform; ++i) g.push_back(lo + (hi - lo) * i / std::max(1, n_uniform - 1));
  if (hi < 0 && lo < 0) {
    const double a = std::log(-lo);
    const double b = std::log(-hi);
    for (int i = 0; i < n_log; ++i) g.push_back(-std::exp(a + (b - a) * i / std::max(1, n_log - 1)));
  } else {
    for (int i = 0; i < n_log; ++i) g.push_back(lo + (hi - lo) * (i + 0.5) / n_log);
  }
  // exp(log(x)) can land one ulp outside the bracket.
  for (auto& e : g) e = std::clamp(e, lo, hi);
  g.push_back(lo);
  g.push_back(hi);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

template <class Real>
struct EnergyRoot {
  Real energy;
  double cell_lo;  ///< grid cell that bracketed the sign change
  double cell_hi;
};

/// All sign changes of delta on the grid, each refined by bisection to
/// relative 10^-(digits - 10).
template <class Real>
std::vector<EnergyRoot<Real>> scan_roots(const EnergyPolynomial<Real>& delta, const std::vector<double>& grid,
                                         Precision precision) {
  const double rel_tol = std::pow(10.0, -(precision.digits() - 10));
  std::vector<EnergyRoot<Real>> out;
  int prev_sign = 0;
  std::size_t prev_idx = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Real e(grid[i]);
    const int s = sign(delta(e));
    if (s == 0) {
      out.push_back({e, grid[i], grid[i]});
      prev_sign = 0;
      continue;
    }
    if (prev_sign != 0 && s != prev_sign) {
      auto r = bisect<Real>([&](const Real& x) { return delta(x); }, Real(grid[prev_idx]), e, prev_sign, rel_tol);
      out.push_back({std::move(r.root), grid[prev_idx], grid[i]});
    }
    prev_sign = s;
    prev_idx = i;
  }
  return out;
}

/// delta_n(x0; E) = 0 roots for the potential's seeds at a single iteration n.
inline std::vector<EnergyRoot<mp_real>> delta_scan(const PotentialParams& p, const AimConfig& cfg, int n);

struct AimLevel {
  mp_real energy;
  int iterations = 0;   ///< n at which `energy` was taken
  int accepted_at = 0;  ///< first n at which the stability criterion held
  double last_drift = 0;
  double cell_lo = 0;
  double cell_hi = 0;
};

struct AimCandidate {
  double energy = 0;
  int last_n = 0;
  double last_drift = 0;
};

struct AimResult {
  std::vector<AimLevel> levels;           ///< ascending, most bound first
  std::vector<AimCandidate> unconverged;  ///< roots alive at n_max that never stabilized
  double e_lo = 0;
  double e_hi = 0;
  int n_max = 0;
  int digits = 0;

  [[nodiscard]] std::vector<double> eigenvalues() const {
    std::vector<double> v;
    v.reserve(levels.size());
    for (const auto& l : levels) v.push_back(l.energy.to_double());
    return v;
  }

  struct Estimate {
    double energy;
    bool converged;
  };

  /// Accepted levels merged with the last roots of tracks that never settled.
  [[nodiscard]] std::vector<Estimate> estimates() const {
    std::vector<Estimate> v;
    for (const auto& l : levels) v.push_back({l.energy.to_double(), true});
    for (const auto& c : unconverged) v.push_back({c.energy, false});
    std::sort(v.begin(), v.end(), [](const Estimate& a, const Estimate& b) { return a.energy < b.energy; });
    return v;
  }
};

namespace detail {

struct RootTrack {
  std::vector<std::pair<int, double>> history;  // (n, E)
  std::optional<mp_real> accepted;
  int accepted_n = 0;
  int first_accept_n = 0;
  double accepted_drift = 0;
  double cell_lo = 0;
  double cell_hi = 0;
  double width = 0;
  int consecutive_stable = 0;
  bool alive = true;
};

}  // namespace detail

/// Follows the roots of delta_n across n = n_min..n_max and accepts those that
/// drift less than stability_tol for stability_runs consecutive iterations.
inline AimResult track_spectrum(const DeltaTable<mp_real>& table, const AimConfig& cfg, double e_lo, double e_hi) {
  precision_scope scope(cfg.precision);
  const auto grid = energy_grid(e_lo, e_hi, cfg.e_grid);
  std::vector<detail::RootTrack> tracks;

  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    auto roots = scan_roots(table.delta(n), grid, cfg.precision);
    std::vector<bool> used(roots.size(), false);
    std::vector<bool> matched(tracks.size(), false);

    // Greedy nearest-neighbour matching against tracks alive at n - 1.
    struct Pair {
      double dist;
      std::size_t track;
      std::size_t root;
    };
    std::vector<Pair> pairs;
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      if (!tracks[t].alive) continue;
      const double last = tracks[t].history.back().second;
      for (std::size_t r = 0; r < roots.size(); ++r) {
        const double e = roots[r].energy.to_double();
        const double tol = std::max(tracks[t].width, roots[r].cell_hi - roots[r].cell_lo);
        const double dist = std::abs(e - last);
        if (dist <= tol) pairs.push_back({dist, t, r});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.dist < b.dist; });
    for (const auto& pr : pairs) {
      if (matched[pr.track] || used[pr.root]) continue;
      matched[pr.track] = true;
      used[pr.root] = true;
      auto& tr = tracks[pr.track];
      const auto& root = roots[pr.root];
      const double drift = pr.dist;
      tr.history.emplace_back(n, root.energy.to_double());
      tr.width = root.cell_hi - root.cell_lo;
      tr.consecutive_stable = drift < cfg.stability_tol ? tr.consecutive_stable + 1 : 0;
      if (tr.consecutive_stable >= cfg.stability_runs) {
        if (!tr.accepted) tr.first_accept_n = n;
        tr.accepted = root.energy;
        tr.accepted_n = n;
        tr.accepted_drift = drift;
        tr.cell_lo = root.cell_lo;
        tr.cell_hi = root.cell_hi;
      }
    }
    for (std::size_t t = 0; t < matched.size(); ++t)
      if (!matched[t]) tracks[t].alive = false;
    for (std::size_t r = 0; r < roots.size(); ++r) {
      if (used[r]) continue;
      detail::RootTrack tr;
      tr.history.emplace_back(n, roots[r].energy.to_double());
      tr.width = roots[r].cell_hi - roots[r].cell_lo;
      tracks.push_back(std::move(tr));
    }
  }

  AimResult res;
  res.e_lo = e_lo;
  res.e_hi = e_hi;
  res.n_max = cfg.n_max;
  res.digits = cfg.precision.digits();
  for (const auto& tr : tracks) {
    if (tr.accepted) {
      res.levels.push_back(
          {*tr.accepted, tr.accepted_n, tr.first_accept_n, tr.accepted_drift, tr.cell_lo, tr.cell_hi});
    } else if (tr.alive) {
      const auto& h = tr.history;
      const double drift = h.size() > 1 ? std::abs(h.back().second - h[h.size() - 2].second) : 0.0;
      res.unconverged.push_back({h.back().second, h.back().first, drift});
    }
  }
  std::sort(res.levels.begin(), res.levels.end(),
            [](const AimLevel& a, const AimLevel& b) { return a.energy < b.energy; });
  // A track that broke and restarted may be accepted twice; keep the deeper iteration.
  std::vector<AimLevel> unique;
  for (auto& l : res.levels) {
    if (!unique.empty()) {
      const double a = unique.back().energy.to_double();
      const double b = l.energy.to_double();
      if (std::abs(a - b) <= 1e-6 * std::max(std::abs(a), std::abs(b)) + 10 * cfg.stability_tol) {
        if (l.iterations > unique.back().iterations) unique.back() = std::move(l);
        continue;
      }
    }
    unique.push_back(std::move(l));
  }
  res.levels = std::move(unique);
  std::sort(res.unconverged.begin(), res.unconverged.end(),
            [](const AimCandidate& a, const AimCandidate& b) { return a.energy < b.energy; });
  return res;
}

namespace detail {
inline double default_e_lo(const PotentialParams& p, const AimConfig& cfg) {
  if (cfg.e_lo) return *cfg.e_lo;
  try {
    return 1.02 * v_min(p).V;
  } catch (const no_convergence&) {
    throw config_error("potential has no valley to bound the energy search; set e_lo explicitly");
  }
}

inline DeltaTable<mp_real> potential_delta_table(const PotentialParams& p, const AimConfig& cfg, int n_max) {
  precision_scope scope(cfg.precision);
  auto [k0, z0] = energy_seed_functions<mp_real>(p, cfg.x0, cfg.length());
  return DeltaTable<mp_real>(k0, z0, n_max);
}
}  // namespace detail

inline std::vector<EnergyRoot<mp_real>> delta_scan(const PotentialParams& p, const AimConfig& cfg, int n) {
  cfg.validate();
  if (n < 1 || n > cfg.n_max) throw config_error("iteration index out of range");
  const double lo = detail::default_e_lo(p, cfg);
  const auto table = detail::potential_delta_table(p, cfg, n);
  precision_scope scope(cfg.precision);
  return scan_roots(table.delta(n), energy_grid(lo, cfg.e_hi, cfg.e_grid), cfg.precision);
}

/// Bound-state spectrum of the S-wave radial problem.
inline AimResult aim_spectrum(const PotentialParams& p, const AimConfig& cfg) {
  cfg.validate();
  if (p.ell() != 0) throw config_error("the AIM engine handles ell = 0 only");
  const auto check = bound_state_precheck(p);
  if (!check.ok) throw config_error(check.message);
  const double lo = detail::default_e_lo(p, cfg);
  if (!(lo < cfg.e_hi && cfg.e_hi < 0)) throw config_error("energy bracket must satisfy e_lo < e_hi < 0");
  const auto table = detail::potential_delta_table(p, cfg, cfg.n_max);
  auto res = track_spectrum(table, cfg, lo, cfg.e_hi);
  // Bound states lie above the bottom of the valley.
  if (!cfg.e_lo) {
    const double floor = v_min(p).V;
    std::erase_if(res.levels, [&](const AimLevel& l) { return !(l.energy.to_double() > floor); });
  }
  return res;
}

}  // namespace spectra
