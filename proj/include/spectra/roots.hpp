#pragma once

#include <cmath>
#include <utility>

#include "real.hpp"

namespace spectra {

template <class Real>
struct BracketedRoot {
  Real lo;
  Real hi;
  Real root;
  int iterations = 0;
};

/// Bisection on [lo, hi] where f(lo) and f(hi) differ in sign. Stops when the
/// bracket is narrower than rel_tol * |midpoint| (or abs_floor), or f vanishes.
template <class Real, class F>
BracketedRoot<Real> bisect(F&& f, Real lo, Real hi, int sign_lo, double rel_tol, double abs_floor = 0.0,
                           int max_iter = 2000) {
  using std::abs;
  int it = 0;
  for (; it < max_iter; ++it) {
    Real mid = (lo + hi) / 2;
    const Real width = abs(hi - lo);
    const Real scale = abs(mid);
    if (width <= scale * rel_tol || width <= Real(abs_floor)) break;
    const int s = sign(f(mid));
    if (s == 0) return {mid, mid, mid, it + 1};
    if (s == sign_lo)
      lo = std::move(mid);
    else
      hi = std::move(mid);
  }
  Real root = (lo + hi) / 2;
  return {std::move(lo), std::move(hi), std::move(root), it};
}

}  // namespace spectra
