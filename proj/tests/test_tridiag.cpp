#include <gtest/gtest.h>

#include <random>

#include "pcfbpm/tridiag.hpp"

using namespace pcf;

namespace {

std::vector<cplx> apply(const std::vector<cplx>& d, cplx lo, cplx up, const std::vector<cplx>& x, bool cyclic) {
  const std::size_t n = d.size();
  std::vector<cplx> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = d[i] * x[i];
    if (i > 0) y[i] += lo * x[i - 1];
    if (i + 1 < n) y[i] += up * x[i + 1];
  }
  if (cyclic) {
    y[0] += lo * x[n - 1];
    y[n - 1] += up * x[0];
  }
  return y;
}

}  // namespace

class TridiagSizes : public ::testing::TestWithParam<int> {};

TEST_P(TridiagSizes, ThomasSolvesDiagonallyDominantSystems) {
  const int n = GetParam();
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const cplx lo(u(rng), u(rng)), up(u(rng), u(rng));
  std::vector<cplx> d(n), x(n);
  for (int i = 0; i < n; ++i) {
    d[i] = cplx(4.0 + u(rng), u(rng));
    x[i] = cplx(u(rng), u(rng));
  }
  std::vector<cplx> b = apply(d, lo, up, x, false);
  TridiagonalFactor(d, lo, up).solve(b);
  for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(b[i] - x[i]), 1e-12);
}

TEST_P(TridiagSizes, ShermanMorrisonSolvesCyclicSystems) {
  const int n = GetParam();
  if (n < 3) GTEST_SKIP();
  std::mt19937_64 rng(100 + n);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const cplx lo(u(rng), u(rng)), up(u(rng), u(rng));
  std::vector<cplx> d(n), x(n);
  for (int i = 0; i < n; ++i) {
    d[i] = cplx(4.0 + u(rng), u(rng));
    x[i] = cplx(u(rng), u(rng));
  }
  std::vector<cplx> b = apply(d, lo, up, x, true);
  CyclicTridiagonalFactor(d, lo, up).solve(b);
  for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(b[i] - x[i]), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Sizes, TridiagSizes, ::testing::Values(1, 2, 3, 8, 64, 257));

TEST(Tridiag, ZeroPivotIsReported) {
  std::vector<cplx> d{0.0, 1.0, 1.0};
  EXPECT_THROW(TridiagonalFactor(d, 1.0, 1.0), NumericalError);
}

TEST(Tridiag, CyclicNeedsThreeUnknowns) {
  std::vector<cplx> d{2.0, 2.0};
  EXPECT_THROW(CyclicTridiagonalFactor(d, 1.0, 1.0), ConfigError);
}
