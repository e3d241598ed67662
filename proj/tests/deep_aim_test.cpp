// The published AIM rows are reproduced by the termination roots at a much
// deeper iteration than the default 120. These runs take minutes.

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "spectra/aim.hpp"
#include "spectra/golden.hpp"

namespace spectra {
namespace {

// Half a unit in the last printed digit.
double printed_precision(const std::string& text) {
  const auto dot = text.find('.');
  const auto decimals = dot == std::string::npos ? 0 : text.size() - dot - 1;
  return 0.5 * std::pow(10.0, -static_cast<double>(decimals));
}

void expect_published_aim_rows(const std::string& column) {
  for (const auto& col : golden::columns()) {
    if (col.name != column) continue;
    AimConfig cfg;
    cfg.n_max = 330;
    const auto est = aim_spectrum(PotentialParams(col.V0, col.lambda, col.gamma), cfg).estimates();
    for (const auto& c : golden::select(col, "AIM")) {
      ASSERT_LT(static_cast<std::size_t>(c.n), est.size()) << column << " n = " << c.n;
      const double tol = printed_precision(c.text) + 1e-12;
      EXPECT_NEAR(est[static_cast<std::size_t>(c.n)].energy, c.energy, tol) << column << " n = " << c.n;
    }
    return;
  }
  FAIL() << "no column " << column;
}

TEST(DeepAim, Table1GammaPointSix) { expect_published_aim_rows("gamma=0.6"); }
TEST(DeepAim, Table2V0Sixty) { expect_published_aim_rows("V0=60"); }

}  // namespace
}  // namespace spectra
