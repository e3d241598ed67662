#pragma once

#include <stdexcept>
#include <string>

namespace spectra {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameters or configuration.
struct config_error : error {
  using error::error;
};

/// Evaluation at a point outside the domain of a function (e.g. r <= 0 for V).
struct domain_error : error {
  using error::error;
};

/// Series arithmetic on mismatched expansion points.
struct center_mismatch : error {
  using error::error;
};

/// Division by a series that vanishes at its center.
struct pole_at_center : error {
  using error::error;
};

/// Not enough trustworthy coefficients left to continue.
struct series_exhausted : error {
  using error::error;
};

struct not_positive_definite : error {
  using error::error;
};

/// A search found nothing to converge to (no valley, no stable root, ...).
struct no_convergence : error {
  using error::error;
};

}  // namespace spectra
