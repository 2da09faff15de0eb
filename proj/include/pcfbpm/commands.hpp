#pragma once

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pcfbpm/config.hpp"
#include "pcfbpm/io.hpp"
#include "pcfbpm/modes.hpp"
#include "pcfbpm/vparam.hpp"

namespace pcf {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  /// Some requested modes did not converge; their results are still written.
  kExitPartial = 2,
  /// The computation itself failed after a valid configuration.
  kExitNumerical = 3,
};

namespace detail {

inline std::string mode_stem(int order) {
  std::ostringstream s;
  s << "mode_" << std::setw(2) << std::setfill('0') << order;
  return s.str();
}

}  // namespace detail

/// Runs the mode solve described by a config file. Fields go to
/// mode_NN.pcf (and mode_NN.csv if requested), the summary to modes.json and
/// the resolved parameters to run.ini. Diagnostics go to `log`.
inline int cmd_solve(const std::filesystem::path& config_path, std::ostream& log) {
  namespace fs = std::filesystem;
  RunConfig cfg;
  ResolvedRun run;
  try {
    cfg = resolved_config(load_run_config(config_path));
    run = resolve_run(cfg);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir = cfg.output.directory;
  const auto& s = cfg.solver;
  const LaunchSpec launch{s.launch, s.launch_x_um, s.launch_y_um, s.waist_um};
  std::vector<ModeSolution> modes;
  try {
    fs::create_directories(dir);
    if (s.method == SolverKind::ImaginaryDistance) {
      ImaginaryDistanceOptions o;
      o.n_modes = s.n_modes;
      o.tol = s.tol;
      o.max_steps = s.max_steps;
      o.launch = launch;
      o.seed = s.seed;
      o.polish.enabled = s.polish;
      if (cfg.output.snapshot_every > 0) {
        const long every = cfg.output.snapshot_every;
        o.monitor = [&, every](int order, long step, double, const ComplexField2D& f) {
          if (step % every == 0)
            write_field_dump(f, dir / ("snapshot_o" + std::to_string(order) + "_s" + std::to_string(step) + ".pcf"));
        };
      }
      modes = solve_imaginary_distance(run.profile, run.propagation, o);
    } else {
      CorrelationOptions o;
      o.launch = launch;
      o.n_steps = s.correlation_steps;
      o.n_modes = s.n_modes;
      o.pad_factor = s.pad_factor;
      CorrelationResult r = solve_correlation(run.profile, run.propagation, o);
      for (const auto& d : r.diagnostics) log << "correlation: " << d << '\n';
      modes = std::move(r.modes);
    }
    if (s.imaginary_beta) {
      const ComplexIndexMap index = with_absorber(run.profile, run.propagation.boundary);
      for (auto& m : modes) apply_imaginary_beta_correction(m, index, run.propagation.k0());
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    log << "output error: " << e.what() << '\n';
    return kExitNumerical;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool all_converged = true;
  try {
    for (const auto& m : modes) {
      write_field_dump(m.field, dir / (detail::mode_stem(m.order) + ".pcf"));
      if (cfg.output.csv) write_field_csv(m.field, dir / (detail::mode_stem(m.order) + ".csv"));
      all_converged = all_converged && m.converged;
    }
    write_text(dir / "modes.json", modes_summary(modes, run.propagation.lambda_um).dump(2) + "\n");
    std::ostringstream wall_s;
    wall_s << std::fixed << std::setprecision(3) << wall;
    write_text(dir / "run.ini", format_run_config(cfg, {"pcfbpm " + std::string(kVersion),
                                                        "grid " + std::to_string(run.grid.nx) + "x" +
                                                            std::to_string(run.grid.ny),
                                                        "wall_time_s " + wall_s.str()}));
  } catch (const Error& e) {
    log << "output error: " << e.what() << '\n';
    return kExitNumerical;
  }

  for (const auto& m : modes)
    log << "mode " << m.order << ": n_eff " << std::setprecision(10) << m.n_eff << (m.converged ? "" : " (not converged)")
        << '\n';
  if ((int)modes.size() < s.n_modes) {
    log << "found " << modes.size() << " of " << s.n_modes << " requested modes\n";
    return kExitPartial;
  }
  return all_converged ? kExitOk : kExitPartial;
}

struct VparamArgs {
  CurveKind kind = CurveKind::EmpiricalV;
  std::vector<double> d_over_pitch;
  std::optional<SweepRange> sweep;
  std::optional<Abscissa> abscissa;
  std::filesystem::path out_dir = "vparam_out";
  PcfGeometry geometry{};
  unsigned workers = 0;
};

inline SweepRange default_sweep(CurveKind kind) {
  return kind == CurveKind::NumericVeff ? SweepRange{0.5, 10.0, 0.5} : SweepRange{0.05, 2.0, 0.05};
}

/// Parses "a:b:c" as a range or "x,y,z" as a list.
inline std::vector<double> parse_value_list(const std::string& text) {
  auto num = [&](const std::string& t) {
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError("not a number: '" + t + "' in '" + text + "'");
    }
  };
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(item);
  if (sep == ':') {
    if (parts.size() != 3) throw ConfigError("range must look like start:stop:step, got '" + text + "'");
    const SweepRange r{num(parts[0]), num(parts[1]), num(parts[2])};
    if (!(r.step > 0.0)) throw ConfigError("range step must be positive in '" + text + "'");
    if (!(r.stop >= r.start)) throw ConfigError("range stop precedes start in '" + text + "'");
    std::vector<double> v;
    const long n = static_cast<long>(std::floor((r.stop - r.start) / r.step + 1e-9));
    for (long k = 0; k <= n; ++k) v.push_back(r.start + k * r.step);
    return v;
  }
  std::vector<double> v;
  for (const auto& p : parts) v.push_back(num(p));
  if (v.empty()) throw ConfigError("empty value list");
  return v;
}

inline SweepRange parse_sweep(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw ConfigError("sweep must look like start:stop:step, got '" + text + "'");
  SweepRange r;
  try {
    r = {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])};
  } catch (const std::logic_error&) {
    throw ConfigError("sweep values must be numbers, got '" + text + "'");
  }
  r.validate();
  return r;
}

/// Writes v_sweep.csv and crossings.json into the output directory.
inline int cmd_vparam(const VparamArgs& args, std::ostream& log) {
  std::vector<VCurve> curves;
  try {
    if (args.d_over_pitch.empty()) throw ConfigError("no d/pitch values given");
    const SweepRange range = args.sweep.value_or(default_sweep(args.kind));
    range.validate();
    if (args.kind == CurveKind::EmpiricalV)
      for (double r : args.d_over_pitch) empirical_coeffs(r);
    SweepOptions opts;
    opts.geometry = args.geometry;
    opts.abscissa = args.abscissa;
    opts.workers = args.workers;
    curves = sweep_v(args.kind, args.d_over_pitch, range, opts);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    std::filesystem::create_directories(args.out_dir);
    write_text(args.out_dir / "v_sweep.csv", sweep_csv(curves));
    write_text(args.out_dir / "crossings.json", crossings_summary(curves).dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "output error: " << e.what() << '\n';
    return kExitNumerical;
  }
  int failed = 0;
  for (const auto& c : curves) {
    log << to_string(c.kind) << " d/pitch=" << c.d_over_pitch << ": ";
    if (c.crossing)
      log << "crosses V=" << kSingleModeCutoff << " at " << to_string(c.abscissa) << "=" << c.crossing->abscissa
          << " +- " << c.crossing->uncertainty << '\n';
    else
      log << "never crosses V=" << kSingleModeCutoff << '\n';
    for (const auto& p : c.points) failed += p.ok() ? 0 : 1;
  }
  if (failed > 0) {
    log << failed << " sweep points failed; see crossings.json\n";
    return kExitPartial;
  }
  return kExitOk;
}

struct GeometryReport {
  int hole_count = 0;
  double fill_fraction = 0.0;
  Grid2D grid;
};

/// Writes index.csv (and index.pgm with `preview`) for the geometry and grid
/// sections of a config; prints the hole count and air fill fraction.
inline int cmd_geometry(const std::filesystem::path& config_path, bool preview, std::ostream& out, std::ostream& log,
                        GeometryReport* report = nullptr) {
  RunConfig cfg;
  PcfGeometry geom;
  Grid2D grid;
  IndexProfile profile;
  std::vector<HolePlacement> holes;
  try {
    cfg = load_run_config(config_path);
    geom = cfg.geometry.resolve();
    if (cfg.grid.margin_um < 0.0) throw ConfigError("[grid] margin_um must be non-negative");
    grid = window_for(geom, cfg.grid.dx_um, cfg.grid.dy_um, cfg.grid.margin_um);
    holes = build_hex_lattice(geom);
    profile = rasterize_index(holes, geom, grid, cfg.grid.subsamples);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const std::filesystem::path dir = cfg.output.directory;
  try {
    std::filesystem::create_directories(dir);
    write_index_csv(profile, (dir / "index.csv").string());
    if (preview) write_index_pgm(profile, (dir / "index.pgm").string(), geom.n_hole, geom.n_background);
  } catch (const std::exception& e) {
    log << "output error: " << e.what() << '\n';
    return kExitNumerical;
  }
  const double fill = air_fill_fraction(profile, geom);
  out << "holes " << holes.size() << '\n' << "fill_fraction " << std::setprecision(6) << fill << '\n';
  if (report) *report = {static_cast<int>(holes.size()), fill, grid};
  return kExitOk;
}

}  // namespace pcf
