#include <gtest/gtest.h>

#include "pcfbpm/grid.hpp"

using namespace pcf;

TEST(Grid, CellCenteredCoordinatesTileTheWindow) {
  const Grid2D g = Grid2D::centered(10, 8, 0.5, 0.25);
  EXPECT_DOUBLE_EQ(g.x0_um, -2.5);
  EXPECT_DOUBLE_EQ(g.y0_um, -1.0);
  EXPECT_DOUBLE_EQ(g.x(0), -2.25);
  EXPECT_DOUBLE_EQ(g.x(9), 2.25);
  EXPECT_DOUBLE_EQ(g.y(7), 0.875);
  EXPECT_DOUBLE_EQ(g.width_um(), 5.0);
  EXPECT_DOUBLE_EQ(g.cell_area(), 0.125);
  EXPECT_EQ(g.size(), 80u);
}

TEST(Grid, CoveringUsesEvenCountsThatContainTheRequest) {
  const Grid2D g = Grid2D::covering(3.01, 2.0, 0.5, 0.5);
  EXPECT_EQ(g.nx % 2, 0);
  EXPECT_EQ(g.ny % 2, 0);
  EXPECT_GE(g.width_um() / 2, 3.01);
  EXPECT_GE(g.height_um() / 2, 2.0);
  EXPECT_EQ(g.ny, 8);
}

TEST(Grid, RejectsTinyOrDegenerateGrids) {
  EXPECT_THROW(Grid2D::centered(7, 10, 0.1, 0.1), ConfigError);
  EXPECT_THROW(Grid2D::centered(10, 10, 0.0, 0.1), ConfigError);
  EXPECT_THROW(Grid2D::centered(10, 10, 0.1, -1.0), ConfigError);
}

TEST(Grid, SampledStorageIsRowMajorYOuter) {
  const Grid2D g = Grid2D::centered(8, 9, 1.0, 1.0);
  IndexProfile p(g, 1.0);
  p(3, 2) = 7.0;
  EXPECT_EQ(p.values[2 * 8 + 3], 7.0);
  EXPECT_THROW(IndexProfile(g, std::vector<double>(5)), GridMismatch);
}

TEST(Grid, MismatchIsDetected) {
  const Grid2D a = Grid2D::centered(8, 8, 1.0, 1.0);
  Grid2D b = a;
  b.x0_um += 1e-3;
  EXPECT_NO_THROW(require_same_grid(a, a, "t"));
  EXPECT_THROW(require_same_grid(a, b, "t"), GridMismatch);
}

TEST(Grid, FiniteCheck) {
  ComplexField2D f(Grid2D::centered(8, 8, 1.0, 1.0), cplx(1.0));
  EXPECT_TRUE(all_finite(f));
  f(1, 1) = cplx(0.0, std::nan(""));
  EXPECT_FALSE(all_finite(f));
}

TEST(Grid, HexNormVerticesAndEdges) {
  for (int k = 0; k < 6; ++k) {
    const double t = k * kPi / 3.0;
    EXPECT_NEAR(hex_norm(2.0 * std::cos(t), 2.0 * std::sin(t)), 2.0, 1e-12);
  }
  // Mid-edge of the flat top lies at height r*sqrt(3)/2.
  EXPECT_NEAR(hex_norm(0.0, std::sqrt(3.0)), 2.0, 1e-12);
}
