#pragma once

// Dense and tridiagonal symmetric eigensolvers for the basis-diagonalization
// engine: Householder reduction, implicit-shift QL, Cholesky, and the
// generalized symmetric-definite problem H c = E S c.
//
// The tridiagonalization and QL iteration follow the EISPACK tred2/tql2
// routines.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace spectra {

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  [[nodiscard]] std::vector<double> column(std::size_t j) const {
    std::vector<double> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

/// Symmetric tridiagonal matrix: diag has N entries, offdiag N - 1.
struct SymTridiag {
  std::vector<double> diag;
  std::vector<double> offdiag;

  [[nodiscard]] std::size_t size() const noexcept { return diag.size(); }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return diag[i];
    if (i + 1 == j) return offdiag[i];
    if (j + 1 == i) return offdiag[j];
    return 0.0;
  }
};

/// Symmetric dense matrix; writes go to both triangles.
class SymDense {
 public:
  SymDense() = default;
  explicit SymDense(std::size_t n) : m_(n, n) {}
  explicit SymDense(const SymTridiag& t) : m_(t.size(), t.size()) {
    for (std::size_t i = 0; i < t.size(); ++i) m_(i, i) = t.diag[i];
    for (std::size_t i = 0; i + 1 < t.size(); ++i) set(i, i + 1, t.offdiag[i]);
  }

  [[nodiscard]] std::size_t size() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  void set(std::size_t i, std::size_t j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  void add(std::size_t i, std::size_t j, double v) {
    m_(i, j) += v;
    if (i != j) m_(j, i) += v;
  }
  [[nodiscard]] const Matrix& matrix() const noexcept { return m_; }

  SymDense& operator+=(const SymTridiag& t) {
    for (std::size_t i = 0; i < t.size(); ++i) m_(i, i) += t.diag[i];
    for (std::size_t i = 0; i + 1 < t.size(); ++i) add(i, i + 1, t.offdiag[i]);
    return *this;
  }

 private:
  Matrix m_;
};

/// Eigenvalues ascending; column k of `vectors` belongs to values[k].
struct EigenPairs {
  std::vector<double> values;
  Matrix vectors;
};

/// Frobenius norm.
template <class M>
double frobenius_norm(const M& a) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

namespace detail {

// Householder reduction of the symmetric matrix held in v to tridiagonal
// form. On exit d is the diagonal, e[1..n-1] the subdiagonal and v the
// accumulated orthogonal transformation.
inline void householder_tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = v.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  if (n == 0) return;
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k + 1 <= i; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k + 1 <= i; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e) with e[i] coupling i-1 and i.
// Rotations are accumulated into v. Eigenpairs come out sorted ascending.
inline void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix& v) {
  const std::size_t n = d.size();
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 60) throw no_convergence("tridiagonal QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (std::size_t k = 0; k < v.rows(); ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t k = i;
    double p = d[i];
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[j] < p) {
        k = j;
        p = d[j];
      }
    if (k != i) {
      d[k] = d[i];
      d[i] = p;
      for (std::size_t j = 0; j < v.rows(); ++j) std::swap(v(j, i), v(j, k));
    }
  }
}

}  // namespace detail

inline EigenPairs tridiag_eigen(const SymTridiag& t) {
  const std::size_t n = t.size();
  if (n == 0) throw config_error("empty matrix");
  if (t.offdiag.size() + 1 != n) throw config_error("tridiagonal offdiag must have N - 1 entries");
  std::vector<double> d = t.diag;
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) e[i] = t.offdiag[i - 1];
  Matrix v = Matrix::identity(n);
  detail::ql_implicit(d, e, v);
  return {std::move(d), std::move(v)};
}

inline EigenPairs symmetric_eigen(const SymDense& a) {
  const std::size_t n = a.size();
  if (n == 0) throw config_error("empty matrix");
  Matrix v = a.matrix();
  std::vector<double> d;
  std::vector<double> e;
  detail::householder_tridiagonalize(v, d, e);
  detail::ql_implicit(d, e, v);
  return {std::move(d), std::move(v)};
}

/// Lower-triangular L with L L^T = S.
template <class Sym>
Matrix cholesky(const Sym& s) {
  const std::size_t n = s.size();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = s(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0))
      throw not_positive_definite("non-positive pivot " + std::to_string(diag) + " at row " + std::to_string(j));
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

namespace detail {
// Solves L x = b in place.
inline void forward_substitute(const Matrix& l, std::span<double> b) {
  for (std::size_t i = 0; i < l.rows(); ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * b[k];
    b[i] = s / l(i, i);
  }
}
// Solves L^T x = b in place.
inline void backward_substitute_transposed(const Matrix& l, std::span<double> b) {
  for (std::size_t i = l.rows(); i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < l.rows(); ++k) s -= l(k, i) * b[k];
    b[i] = s / l(i, i);
  }
}
}  // namespace detail

/// Solves H c = E S c by Cholesky reduction. Vectors are S-orthonormal.
template <class Sym>
EigenPairs generalized_eigen(const SymDense& h, const Sym& s) {
  const std::size_t n = h.size();
  if (s.size() != n) throw config_error("generalized eigenproblem dimension mismatch");
  const Matrix l = cholesky(s);

  // A = L^-1 H L^-T, built column by column.
  Matrix x(n, n);  // x = L^-1 H
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = h(i, j);
    detail::forward_substitute(l, col);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = col[i];
  }
  SymDense a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) col[j] = x(i, j);  // row i of X = column i of X^T
    detail::forward_substitute(l, col);                   // (L^-1 X^T)[:, i] = A[i, :]
    for (std::size_t j = i; j < n; ++j) a.set(i, j, col[j]);
  }
  EigenPairs ep = symmetric_eigen(a);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) col[i] = ep.vectors(i, k);
    detail::backward_substitute_transposed(l, col);
    for (std::size_t i = 0; i < n; ++i) ep.vectors(i, k) = col[i];
  }
  return ep;
}

}  // namespace spectra
