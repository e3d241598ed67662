#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "spectra/potential.hpp"

namespace spectra {
namespace {

// The potential as literally written, evaluated in wide precision. Independent
// of the rearranged forms used by eval_V and eval_U.
mp_real raw_V(const PotentialParams& p, const mp_real& r) {
  const mp_real t = r * p.lambda();
  return p.V0() * (exp(-t) - p.gamma()) / (exp(t) - 1.0);
}

TEST(PotentialParams, Validation) {
  try {
    PotentialParams(5, -1, 0.6);
    FAIL() << "expected config_error";
  } catch (const config_error& e) {
    EXPECT_STREQ(e.what(), "lambda must be positive");
  }
  EXPECT_THROW(PotentialParams(5, 0, 0.6), config_error);
  EXPECT_THROW(PotentialParams(std::nan(""), 1, 0.6), config_error);
  EXPECT_THROW(PotentialParams(5, 1, 0.6, -1), config_error);
  EXPECT_TRUE(PotentialParams(5, 0.2, 0.6).interesting_regime());
  EXPECT_FALSE(PotentialParams(5, 0.2, 1.5).interesting_regime());
  EXPECT_FALSE(PotentialParams(5, 0.2, 0.0).interesting_regime());
}

TEST(EvalV, DecaysAtLargeRadius) {
  const PotentialParams p(5, 0.2, 0.6);
  EXPECT_LT(std::abs(eval_V(p, 500.0)), 1e-40);
}

TEST(EvalV, GammaOneCollapsesToExponential) {
  EXPECT_NEAR(eval_V(PotentialParams(1, 1, 1), std::log(2.0)), -0.5, 1e-15);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> v0(-10, 10), lam(0.05, 3), r(0.01, 20);
  for (int i = 0; i < 20; ++i) {
    const PotentialParams p(v0(rng), lam(rng), 1.0);
    const double x = r(rng);
    const double expected = -p.V0() * std::exp(-p.lambda() * x);
    EXPECT_NEAR(eval_V(p, x), expected, 1e-12 * std::abs(expected));
  }
}

TEST(EvalV, SingularAtOrigin) {
  const PotentialParams p(5, 0.2, 0.6);
  EXPECT_THROW(eval_V(p, 0.0), domain_error);
  EXPECT_THROW(eval_V(p, -1.0), domain_error);
}

TEST(EvalV, ResidueAtOriginIsCoulombStrength) {
  const PotentialParams p(5, 0.2, 0.6);
  precision_scope scope(Precision(60));
  const mp_real r("1e-8", Precision(60));
  const double rv = (r * raw_V(p, r)).to_double();
  EXPECT_NEAR(rv, 10.0, 1e-6);
  EXPECT_NEAR(rv, coulomb_strength(p), 1e-6);
  EXPECT_NEAR((r * eval_V(p, r)).to_double(), rv, 1e-14);
}

TEST(CoulombStrength, DirectArithmetic) {
  EXPECT_DOUBLE_EQ(coulomb_strength(PotentialParams(5, 0.2, 0.6)), 10.0);
  EXPECT_DOUBLE_EQ(coulomb_strength(PotentialParams(20, 0.5, 0.6)), 16.0);
  EXPECT_EQ(coulomb_strength(PotentialParams(3, 0.7, 1.0)), 0.0);
}

TEST(EvalU, LimitAtOrigin) {
  const PotentialParams p(5, 0.2, 0.8);
  EXPECT_DOUBLE_EQ(eval_U(p, 0.0), -5.5);
  // Wide-precision subtraction close to the origin.
  precision_scope scope(Precision(80));
  const mp_real r("1e-15", Precision(80));
  const mp_real z = p.V0() * (mp_real(1.0) - mp_real(p.gamma())) / mp_real(p.lambda());
  const double oracle = (raw_V(p, r) - z / r).to_double();
  EXPECT_NEAR(oracle, -5.5, 1e-12);
}

TEST(EvalU, SmallRadiusMatchesWidePrecisionSubtraction) {
  const PotentialParams p(5, 0.2, 0.8);
  precision_scope scope(Precision(80));
  for (const double r : {1e-9, 1e-6, 1e-3, 0.1, 2.0, 4.9, 5.1, 30.0}) {
    const mp_real rr(r, Precision(80));
    // Residue in wide precision too; the double-rounded coulomb_strength would dominate at small r.
    const mp_real z = p.V0() * (mp_real(1.0) - mp_real(p.gamma())) / mp_real(p.lambda());
    const double oracle = (raw_V(p, rr) - z / rr).to_double();
    EXPECT_NEAR(eval_U(p, r), oracle, 1e-14 * std::max(1.0, std::abs(oracle))) << "r = " << r;
    EXPECT_NEAR(eval_U(p, rr).to_double(), oracle, 1e-15 * std::max(1.0, std::abs(oracle))) << "r = " << r;
  }
}

TEST(EvalU, ModerateRadiusAgreesWithDirectSubtraction) {
  const PotentialParams p(5, 0.2, 0.8);
  const double direct = eval_V(p, 1.0) - coulomb_strength(p) / 1.0;
  EXPECT_NEAR(eval_U(p, 1.0), direct, 1e-13);
}

TEST(EvalU, ContinuousAcrossTheSeriesSwitch) {
  const PotentialParams p(5, 0.2, 0.6);
  const double r_switch = 1.0 / p.lambda();
  EXPECT_NEAR(eval_U(p, r_switch * (1 - 1e-12)), eval_U(p, r_switch * (1 + 1e-12)), 1e-11);
}

TEST(EvalU, SplitsTheSingularity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int i = 0; i < 200; ++i) {
    const PotentialParams p(-10 + 20 * unit(rng), 0.05 + 2 * unit(rng), -0.5 + 2 * unit(rng));
    const double r = std::exp(std::log(0.5) + unit(rng) * std::log(100.0));
    const double z = coulomb_strength(p) / r;
    const double v = eval_V(p, r);
    EXPECT_NEAR(v - z, eval_U(p, r), 1e-13 * (std::abs(v) + std::abs(z) + 1e-300));
  }
  EXPECT_LT(std::abs(eval_U(PotentialParams(5, 0.2, 0.6), 2000.0)), 1e-2);
  EXPECT_THROW(eval_U(PotentialParams(5, 0.2, 0.6), -1.0), domain_error);
}

TEST(Precheck, Conditions) {
  EXPECT_TRUE(bound_state_precheck(PotentialParams(5, 0.2, 0.6)).ok);
  EXPECT_TRUE(bound_state_precheck(PotentialParams(-5, 0.2, 0.6)).ok);
  EXPECT_TRUE(bound_state_precheck(PotentialParams(5, 0.2, 1.5)).ok);
  EXPECT_TRUE(bound_state_precheck(PotentialParams(-5, 0.2, -0.5)).ok);
  const auto bad = bound_state_precheck(PotentialParams(-5, 0.2, 1.5));
  EXPECT_FALSE(bad.ok);
  EXPECT_NE(bad.message.find("no bound states"), std::string::npos);
  EXPECT_FALSE(bound_state_precheck(PotentialParams(5, 0.2, -0.5)).ok);
}

TEST(VMin, MonotonePotentialHasNoValley) { EXPECT_THROW(v_min(PotentialParams(1, 1, 1)), no_convergence); }

TEST(VMin, LiesBelowTheGroundState) {
  const auto m = v_min(PotentialParams(5, 0.2, 0.6));
  EXPECT_LT(m.V, -0.5368000468);
  EXPECT_GT(m.r, 0);
}

TEST(VMin, AgreesWithDenseGridScan) {
  const PotentialParams p(5, 0.2, 0.3);
  const auto m = v_min(p);
  constexpr int points = 1'000'000;
  const double r_hi = 100.0 / p.lambda();
  double grid_min = std::numeric_limits<double>::infinity();
  double grid_r = 0;
  for (int i = 1; i <= points; ++i) {
    const double r = r_hi * i / points;
    const double v = eval_V(p, r);
    if (v < grid_min) {
      grid_min = v;
      grid_r = r;
    }
  }
  EXPECT_LE(m.V, grid_min + 1e-15);
  EXPECT_NEAR(m.V, grid_min, 1e-9 * std::abs(grid_min));
  EXPECT_NEAR(m.r, grid_r, 2 * r_hi / points);
}

TEST(MapX, EndpointsAndMidpoint) {
  const PotentialParams p(5, 0.2, 0.6);
  EXPECT_EQ(map_x(p, 0.0), -1.0);
  EXPECT_NEAR(map_x(p, 1e4), 1.0, 1e-15);
  EXPECT_NEAR(map_x(p, std::log(2.0) / p.lambda()), 0.0, 1e-15);
  EXPECT_THROW(map_x(p, -1.0), domain_error);
}

TEST(MapX, BijectionOntoHalfOpenInterval) {
  const PotentialParams p(5, 0.35, 0.6);
  double prev = -2;
  for (int i = 0; i <= 1000; ++i) {
    const double x = -1 + 1.999 * i / 1000;
    const double r = inverse_map_x(p, x);
    EXPECT_NEAR(map_x(p, r), x, 1e-12);
    EXPECT_GT(x, prev);
    prev = x;
  }
  EXPECT_THROW(inverse_map_x(p, 1.0), domain_error);
}

TEST(Seeds, GeometricK0AndConstantTerms) {
  const PotentialParams p(5, 0.2, 0.6);
  const auto [k0, z0] = seed_functions(p, -0.5368000468, 0.0, 4);
  ASSERT_EQ(k0.valid_len(), 4u);
  for (const double c : k0.coeffs()) EXPECT_DOUBLE_EQ(c, 1.0);
  EXPECT_NEAR(value_at_center(z0), 1.84000234, 1e-12);

  const PotentialParams half(5, 0.2, 0.5);
  EXPECT_NEAR(value_at_center(seed_functions(half, 0.0, 0.0, 3).second), 0.0, 1e-15);
}

TEST(Seeds, MatchFiniteDifferencesOfClosedForms) {
  const PotentialParams p(5, 0.2, 0.6);
  const double E = -0.3;
  const double x0 = 0.3;
  // Central differences in wide precision with a tiny step: truncation error ~h^2.
  precision_scope scope(Precision(60));
  const mp_real c(2 * p.V0() / (p.lambda() * p.lambda()));
  const mp_real e_term(2 * E / (p.lambda() * p.lambda()));
  auto k0_f = [](const mp_real& x) { return 1.0 / (1.0 - x); };
  auto z0_f = [&](const mp_real& x) {
    return c * (0.5 / (1.0 + x) - p.gamma() / (1.0 - x * x)) - e_term / ((1.0 - x) * (1.0 - x));
  };
  const auto [k0, z0] = seed_functions(p, E, x0, 5);
  const mp_real h("1e-12", Precision(60));
  const mp_real x(x0);
  auto check = [&](auto f, const TaylorSeries<double>& s) {
    const double f0 = f(x).to_double();
    const double f1 = ((f(x + h) - f(x - h)) / (2.0 * h)).to_double();
    const double f2 = ((f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)).to_double();
    const double f3 = ((f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)).to_double();
    EXPECT_NEAR(s[0], f0, 1e-13 * std::abs(f0));
    EXPECT_NEAR(s[1], f1, 1e-12 * std::abs(f1));
    EXPECT_NEAR(s[2], f2 / 2, 1e-12 * std::abs(f2 / 2));
    EXPECT_NEAR(s[3], f3 / 6, 1e-12 * std::abs(f3 / 6));
  };
  check(k0_f, k0);
  check(z0_f, z0);
}

TEST(Seeds, EnergyTermIsAGeometricSeries) {
  // V0 = 0 isolates -(2E/lambda^2)/(1-x)^2 = -(2E/lambda^2) sum (j+1)(x-x0)^j/(1-x0)^(j+2).
  const PotentialParams p(0, 0.5, 0.6);
  const double E = -0.25;
  const double x0 = 0.2;
  const auto z0 = seed_functions(p, E, x0, 6).second;
  for (std::size_t j = 0; j < 6; ++j) {
    const double expected = -(2 * E / 0.25) * (j + 1) / std::pow(1 - x0, j + 2);
    EXPECT_NEAR(z0[j], expected, 1e-13 * std::abs(expected));
  }
}

TEST(Seeds, EnergyPolynomialFormEvaluatesToNumericForm) {
  const PotentialParams p(20, 0.5, 0.6);
  precision_scope scope(Precision(40));
  const auto [k0p, z0p] = energy_seed_functions<mp_real>(p, 0.1, 8);
  const mp_real E(-1.25);
  const auto [k0, z0] = seed_functions<mp_real>(p, E, 0.1, 8);
  for (std::size_t j = 0; j < 8; ++j) {
    EXPECT_LT(abs(k0p[j](E) - k0[j]).to_double(), 1e-35);
    EXPECT_LT(abs(z0p[j](E) - z0[j]).to_double(), 1e-35 * std::max(1.0, std::abs(z0[j].to_double())));
  }
}

TEST(Seeds, Preconditions) {
  EXPECT_THROW(seed_functions(PotentialParams(5, 0.2, 0.6), -0.1, 1.0, 4), pole_at_center);
  EXPECT_THROW(seed_functions(PotentialParams(5, 0.2, 0.6), -0.1, -1.0, 4), pole_at_center);
  EXPECT_THROW(seed_functions(PotentialParams(5, 0.2, 0.6, 1), -0.1, 0.0, 4), config_error);
  EXPECT_THROW(seed_functions(PotentialParams(5, 0.2, 0.6), -0.1, 0.0, 0), config_error);
}

}  // namespace
}  // namespace spectra
