#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pcfbpm/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Photonic crystal fiber mode solver (beam propagation)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pcf::kVersion);

  std::string solve_config;
  auto* solve = app.add_subcommand("solve", "solve for guided modes described by a config file");
  solve->add_option("config", solve_config, "run configuration (INI)")->required();

  bool empirical = false, numeric = false;
  std::string d_list = "0.45", sweep, abscissa, out_dir = "vparam_out";
  double pitch = 2.3, n_background = 1.45;
  unsigned workers = 0;
  auto* vparam = app.add_subcommand("vparam", "effective V-parameter curves");
  auto* kind = vparam->add_option_group("kind");
  kind->add_flag("--empirical", empirical, "closed-form fit, against lambda/pitch");
  kind->add_flag("--numeric", numeric, "space-filling-mode V_eff, against pitch/lambda");
  kind->require_option(1);
  vparam->add_option("--d-over-pitch", d_list, "list a,b,c or range start:stop:step");
  vparam->add_option("--sweep", sweep, "abscissa range start:stop:step");
  vparam->add_option("--abscissa", abscissa, "lambda-over-pitch or pitch-over-lambda")
      ->check(CLI::IsMember({"lambda-over-pitch", "pitch-over-lambda"}));
  vparam->add_option("--out", out_dir, "output directory");
  vparam->add_option("--pitch", pitch, "pitch in um for numeric curves");
  vparam->add_option("--n-background", n_background, "background index for numeric curves");
  vparam->add_option("--workers", workers, "parallel solves (0 = all cores)");

  std::string geom_config;
  bool preview = false;
  auto* geometry = app.add_subcommand("geometry", "rasterize the index profile of a config");
  geometry->add_option("config", geom_config, "run configuration (INI)")->required();
  geometry->add_flag("--preview", preview, "also write a PGM image");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pcf::kExitConfig;
  }

  if (*solve) return pcf::cmd_solve(solve_config, std::cerr);
  if (*geometry) return pcf::cmd_geometry(geom_config, preview, std::cout, std::cerr);

  pcf::VparamArgs args;
  args.kind = numeric ? pcf::CurveKind::NumericVeff : pcf::CurveKind::EmpiricalV;
  args.out_dir = out_dir;
  args.workers = workers;
  args.geometry.pitch_um = pitch;
  args.geometry.n_background = n_background;
  try {
    args.d_over_pitch = pcf::parse_value_list(d_list);
    if (!sweep.empty()) args.sweep = pcf::parse_sweep(sweep);
    if (!abscissa.empty())
      args.abscissa = abscissa == "lambda-over-pitch" ? pcf::Abscissa::LambdaOverPitch : pcf::Abscissa::PitchOverLambda;
  } catch (const pcf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return pcf::kExitConfig;
  }
  return pcf::cmd_vparam(args, std::cerr);
}
