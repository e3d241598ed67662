#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "spectra/hdm.hpp"
#include "spectra/linalg.hpp"

namespace spectra {
namespace {

// L_5^1(x) = sum_k (-1)^k C(6, 5-k) x^k / k!
double laguerre_5_1(double x) {
  const double c[] = {6, -15, 10, -2.5, 1.0 / 4.0, -1.0 / 120.0};
  double r = 0;
  for (int k = 5; k >= 0; --k) r = r * x + c[k];
  return r;
}

std::vector<double> laguerre_5_1_zeros() {
  std::vector<double> zeros;
  const int steps = 20000;
  double prev_x = 0;
  double prev_v = laguerre_5_1(0);
  for (int i = 1; i <= steps; ++i) {
    const double x = 20.0 * i / steps;
    const double v = laguerre_5_1(x);
    if ((v < 0) != (prev_v < 0)) {
      double a = prev_x;
      double b = x;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if ((laguerre_5_1(m) < 0) == (laguerre_5_1(a) < 0))
          a = m;
        else
          b = m;
      }
      zeros.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_v = v;
  }
  return zeros;
}

SymDense from_rows(const std::vector<std::vector<double>>& rows) {
  SymDense m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i; j < rows.size(); ++j) m.set(i, j, rows[i][j]);
  return m;
}

SymDense random_symmetric(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  SymDense m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, u(rng));
  return m;
}

template <class A>
std::vector<double> apply(const A& a, const std::vector<double>& v) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (const double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

TEST(TridiagEigen, TwoByTwo) {
  const auto ep = tridiag_eigen(SymTridiag{{2, 2}, {-1}});
  ASSERT_EQ(ep.values.size(), 2u);
  EXPECT_NEAR(ep.values[0], 1, 1e-14);
  EXPECT_NEAR(ep.values[1], 3, 1e-14);
  EXPECT_NEAR(std::abs(ep.vectors(0, 0)), std::sqrt(0.5), 1e-14);
}

TEST(TridiagEigen, OneByOne) {
  const auto ep = tridiag_eigen(SymTridiag{{-7.25}, {}});
  EXPECT_EQ(ep.values, std::vector<double>{-7.25});
  EXPECT_EQ(std::abs(ep.vectors(0, 0)), 1.0);
}

TEST(TridiagEigen, RejectsMalformedInput) {
  EXPECT_THROW(tridiag_eigen(SymTridiag{}), config_error);
  EXPECT_THROW(tridiag_eigen(SymTridiag{{1, 2}, {}}), config_error);
}

TEST(TridiagEigen, OverlapEigenvaluesAreLaguerreZeros) {
  const auto zeros = laguerre_5_1_zeros();
  ASSERT_EQ(zeros.size(), 5u);
  const SymTridiag s{{2, 4, 6, 8, 10}, {-std::sqrt(2.0), -std::sqrt(6.0), -std::sqrt(12.0), -std::sqrt(20.0)}};
  const auto ep = tridiag_eigen(s);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(ep.values[k], zeros[k], 1e-12 * zeros[k]);
}

TEST(TridiagEigen, OverlapNodesArePositiveAndIncreasing) {
  for (const int n : {1, 10, 100}) {
    const auto ep = tridiag_eigen(overlap_matrix(n, 0));
    EXPECT_GT(ep.values.front(), 0);
    for (std::size_t k = 1; k < ep.values.size(); ++k) EXPECT_GT(ep.values[k], ep.values[k - 1]);
  }
}

TEST(SymmetricEigen, ResidualsAndOrthonormality) {
  std::mt19937_64 rng(77);
  for (const std::size_t n : {3u, 17u, 60u}) {
    const auto a = random_symmetric(n, rng);
    const auto ep = symmetric_eigen(a);
    const double an = frobenius_norm(a);
    for (std::size_t k = 0; k < n; ++k) {
      const auto v = ep.vectors.column(k);
      auto r = apply(a, v);
      for (std::size_t i = 0; i < n; ++i) r[i] -= ep.values[k] * v[i];
      EXPECT_LE(norm(r), 1e-10 * an);
      if (k > 0) {
        EXPECT_LE(ep.values[k - 1], ep.values[k]);
      }
      for (std::size_t j = 0; j <= k; ++j)
        EXPECT_NEAR(dot(v, ep.vectors.column(j)), j == k ? 1.0 : 0.0, 1e-10);
    }
  }
}

TEST(Cholesky, HandExamples) {
  const auto id = cholesky(from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(id(i, j), i == j ? 1.0 : 0.0);

  const auto l = cholesky(from_rows({{4, 2}, {2, 5}}));
  EXPECT_EQ(l(0, 0), 2);
  EXPECT_EQ(l(0, 1), 0);
  EXPECT_EQ(l(1, 0), 1);
  EXPECT_EQ(l(1, 1), 2);
}

TEST(Cholesky, IndefiniteMatrixIsRejected) {
  EXPECT_THROW(cholesky(from_rows({{1, 2}, {2, 1}})), not_positive_definite);
  EXPECT_THROW(cholesky(from_rows({{0}})), not_positive_definite);
}

TEST(Cholesky, OverlapReconstruction) {
  for (int n = 1; n <= 50; ++n) {
    const auto s = overlap_matrix(n, 0);
    const auto l = cholesky(s);
    const double sn = frobenius_norm(s);
    double worst = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j) {
        double v = 0;
        for (std::size_t k = 0; k < s.size(); ++k) v += l(i, k) * l(j, k);
        worst = std::max(worst, std::abs(v - s(i, j)));
      }
    EXPECT_LE(worst, 1e-12 * sn) << "N = " << n;
  }
}

TEST(GeneralizedEigen, SmallCases) {
  EXPECT_NEAR(generalized_eigen(from_rows({{2}}), from_rows({{2}})).values[0], 1.0, 1e-15);

  // Coulomb, one basis function at the optimal scale mu = -2Z.
  const double mu = 2;
  const double Z = -1;
  const auto ep = generalized_eigen(from_rows({{mu * mu / 4 * (1 + 4 * Z / mu)}}), SymTridiag{{2}, {}});
  EXPECT_NEAR(ep.values[0], -0.5, 1e-15);
}

TEST(GeneralizedEigen, IdentityOverlapIsTheStandardProblem) {
  std::mt19937_64 rng(5);
  const auto h = random_symmetric(12, rng);
  SymTridiag id{std::vector<double>(12, 1.0), std::vector<double>(11, 0.0)};
  const auto g = generalized_eigen(h, id);
  const auto s = symmetric_eigen(h);
  for (std::size_t k = 0; k < 12; ++k) EXPECT_NEAR(g.values[k], s.values[k], 1e-12);
}

TEST(GeneralizedEigen, DimensionMismatch) {
  EXPECT_THROW(generalized_eigen(SymDense(3), overlap_matrix(2, 0)), config_error);
}

TEST(GeneralizedEigen, ResidualAndSOrthogonality) {
  std::mt19937_64 rng(11);
  for (const int n : {5, 40}) {
    const auto s = overlap_matrix(n, 1);
    const auto h = random_symmetric(static_cast<std::size_t>(n), rng);
    const auto ep = generalized_eigen(h, s);
    const double hn = frobenius_norm(h);
    const double sn = frobenius_norm(s);
    for (std::size_t k = 0; k < ep.values.size(); ++k) {
      const auto c = ep.vectors.column(k);
      auto hc = apply(h, c);
      const auto sc = apply(s, c);
      for (std::size_t i = 0; i < hc.size(); ++i) hc[i] -= ep.values[k] * sc[i];
      EXPECT_LE(norm(hc), 1e-9 * (hn + std::abs(ep.values[k]) * sn));
      for (std::size_t j = 0; j <= k; ++j)
        EXPECT_NEAR(dot(ep.vectors.column(j), sc), j == k ? 1.0 : 0.0, 1e-9);
    }
  }
}

TEST(GeneralizedEigen, RayleighRitzMonotonicity) {
  const PotentialParams p(5, 0.2, 0.6);
  for (const int n : {20, 50, 80}) {
    HdmConfig small;
    small.N = n;
    small.mu = 0.4;
    small.quadrature_N = n + 10;  // same quadrature for both, so the bases nest exactly
    HdmConfig large = small;
    large.N = n + 10;
    const auto e_small = hdm_eigenvalues(p, small);
    const auto e_large = hdm_eigenvalues(p, large);
    for (std::size_t k = 0; k < e_small.size(); ++k) EXPECT_LE(e_large[k], e_small[k] + 1e-12) << "N = " << n;
  }
}

}  // namespace
}  // namespace spectra
