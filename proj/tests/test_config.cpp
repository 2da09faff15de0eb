#include <gtest/gtest.h>

#include "pcfbpm/config.hpp"

using namespace pcf;

TEST(Config, EmptyTextGivesDefaults) { EXPECT_EQ(parse_run_config(std::string()), RunConfig{}); }

TEST(Config, AllSectionsParse) {
  const auto c = parse_run_config(std::string(R"(
[geometry]
pitch_um = 2.5
d_um = 0.3
d_interpretation = radius
hole_shape = square
rings = 3
core_defect = false
[grid]
dx_um = 0.05
subsamples = 4
[propagation]
lambda_um = 1.31
dz_um = 0.25
n_ref = 1.44
jacket = false
[solver]
method = correlation
n_modes = 3
seed = 7
launch = planewave
[output]
directory = results
csv = true
)"));
  EXPECT_EQ(c.geometry.pitch_um, 2.5);
  EXPECT_EQ(c.geometry.interpretation, DInterpretation::Radius);
  EXPECT_EQ(c.geometry.hole_shape, HoleShape::Square);
  EXPECT_EQ(c.geometry.resolve().hole_diameter_um, 0.6);
  EXPECT_FALSE(c.geometry.core_defect);
  EXPECT_EQ(c.grid.dx_um, 0.05);
  EXPECT_EQ(c.grid.dy_um, 0.1);
  EXPECT_EQ(c.propagation.dz_um, 0.25);
  EXPECT_EQ(c.propagation.n_ref, 1.44);
  EXPECT_FALSE(c.propagation.jacket);
  EXPECT_EQ(c.solver.method, SolverKind::Correlation);
  EXPECT_EQ(c.solver.seed, 7u);
  EXPECT_EQ(c.solver.launch, LaunchKind::PlaneWave);
  EXPECT_EQ(c.output.directory, "results");
  EXPECT_TRUE(c.output.csv);
}

TEST(Config, FormatRoundTrips) {
  RunConfig c;
  c.geometry.d_um = 0.1 + 0.2;
  c.propagation.dz_um = 1.0 / 3.0;
  c.solver.seed = 123456789012345ULL;
  c.output.directory = "a/b";
  EXPECT_EQ(parse_run_config(format_run_config(c, {"header line"})), c);
}

TEST(Config, UnknownKeysAndSectionsAreErrors) {
  EXPECT_THROW(parse_run_config(std::string("[geometry]\npitch=2\n")), ConfigError);
  EXPECT_THROW(parse_run_config(std::string("[nonsense]\na=1\n")), ConfigError);
  EXPECT_THROW(parse_run_config(std::string("a=1\n")), ConfigError);
}

TEST(Config, BadValuesAreErrors) {
  EXPECT_THROW(parse_run_config(std::string("[geometry]\npitch_um=abc\n")), ConfigError);
  EXPECT_THROW(parse_run_config(std::string("[geometry]\nrings=2.5\n")), ConfigError);
  EXPECT_THROW(parse_run_config(std::string("[geometry]\nhole_shape=hexagon\n")), ConfigError);
  EXPECT_THROW(parse_run_config(std::string("[output]\ncsv=maybe\n")), ConfigError);
  EXPECT_THROW(parse_run_config(std::string("[geometry\n")), ConfigError);
}

TEST(Config, DefaultStepDependsOnMethod) {
  RunConfig c;
  EXPECT_EQ(*resolved_config(c).propagation.dz_um, 0.5);
  c.solver.method = SolverKind::Correlation;
  EXPECT_EQ(*resolved_config(c).propagation.dz_um, 0.1);
  c.propagation.dz_um = 0.3;
  EXPECT_EQ(*resolved_config(c).propagation.dz_um, 0.3);
}

TEST(Config, ResolveBuildsWindowAndJacket) {
  RunConfig c;
  c.geometry.rings = 2;
  c.grid.dx_um = c.grid.dy_um = 0.2;
  const auto r = resolve_run(c);
  EXPECT_EQ(r.profile.grid, r.grid);
  EXPECT_DOUBLE_EQ(r.propagation.boundary.jacket_radius_um, 2 * 2.3);
  EXPECT_EQ(r.propagation.dz_um, 0.5);
  c.propagation.jacket = false;
  EXPECT_EQ(resolve_run(c).propagation.boundary.jacket_radius_um, 0.0);
}

TEST(Config, ResolveRejectsInconsistentRuns) {
  RunConfig c;
  c.geometry.rings = 1;
  c.grid.dx_um = c.grid.dy_um = 0.2;
  auto bad = c;
  bad.geometry.d_um = 3.0;
  EXPECT_THROW(resolve_run(bad), ConfigError);
  bad = c;
  bad.solver.n_modes = 0;
  EXPECT_THROW(resolve_run(bad), ConfigError);
  bad = c;
  bad.propagation.n_ref = 2.0;
  EXPECT_THROW(resolve_run(bad), ConfigError);
  bad = c;
  bad.solver.waist_um = 0.01;
  EXPECT_THROW(resolve_run(bad), ConfigError);
  bad = c;
  bad.grid.margin_um = -1;
  EXPECT_THROW(resolve_run(bad), ConfigError);
  bad = c;
  bad.output.directory.clear();
  EXPECT_THROW(resolve_run(bad), ConfigError);
}
