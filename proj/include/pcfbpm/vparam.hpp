#pragma once

#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pcfbpm/geometry.hpp"
#include "pcfbpm/modes.hpp"

namespace pcf {

/// Single-mode cutoff of the LP11 mode.
constexpr double kSingleModeCutoff = 2.405;

struct StepFiberSpec {
  double a_um = 0.0;
  double n_co = 0.0;
  double n_cl = 0.0;

  void validate() const {
    if (!(a_um > 0.0)) throw ConfigError("core radius must be positive");
    if (!(n_cl > 0.0) || !(n_co >= n_cl)) throw ConfigError("need n_co >= n_cl > 0");
  }
};

struct VBreakdown {
  double V = 0.0;
  std::optional<double> U;
  std::optional<double> W;
};

/// V = k0 a sqrt(n_co^2 - n_cl^2); with a guided index also
/// U = k0 a sqrt(n_co^2 - n_eff^2) and W = k0 a sqrt(n_eff^2 - n_cl^2).
inline VBreakdown v_number(const StepFiberSpec& spec, double lambda_um, std::optional<double> n_eff = {}) {
  spec.validate();
  if (!(lambda_um > 0.0)) throw ConfigError("wavelength must be positive");
  const double ka = wavenumber(lambda_um) * spec.a_um;
  VBreakdown out;
  out.V = ka * std::sqrt(spec.n_co * spec.n_co - spec.n_cl * spec.n_cl);
  if (n_eff) {
    const double n = *n_eff;
    if (!(n >= spec.n_cl && n <= spec.n_co))
      throw ConfigError("effective index " + std::to_string(n) + " outside [n_cl, n_co]");
    out.U = ka * std::sqrt(spec.n_co * spec.n_co - n * n);
    out.W = ka * std::sqrt(n * n - spec.n_cl * spec.n_cl);
  }
  return out;
}

inline bool single_mode(double V) {
  if (!(V >= 0.0)) throw ConfigError("V must be non-negative");
  return V < kSingleModeCutoff;
}

/// Effective V with the pitch as length scale and the cladding index taken
/// from the fundamental space-filling mode.
inline double v_eff(double pitch_um, double n0, double n_cl_eff, double lambda_um) {
  if (!(pitch_um > 0.0) || !(lambda_um > 0.0)) throw ConfigError("pitch and wavelength must be positive");
  if (n0 < n_cl_eff) throw ConfigError("core index below the cladding index");
  return wavenumber(lambda_um) * pitch_um * std::sqrt(n0 * n0 - n_cl_eff * n_cl_eff);
}

struct FsmOptions {
  int samples_per_pitch = 64;
  int subsamples = 8;
  /// Imaginary step in units of n_background * pitch^2 / lambda, so the step
  /// is equally stiff at every normalized frequency.
  double step_scale = 0.005;
  /// The split stepper's fixed point drifts as O(dz^2); solving at dz and
  /// dz/2 and extrapolating removes the leading term.
  bool extrapolate = true;
  double tol = 1e-12;
  long max_steps = 200000;
};

struct FsmResult {
  double n_cl_eff = 0.0;
  /// Index at the base step (and at the half step when extrapolating).
  double n_coarse = 0.0;
  std::optional<double> n_fine;
  double dz_um = 0.0;
  long iterations = 0;
};

namespace detail {

inline ModeSolution fsm_run(const IndexProfile& cell, double lambda_um, double dz, const FsmOptions& opts) {
  PropagationConfig cfg;
  cfg.lambda_um = lambda_um;
  cfg.dz_um = dz;
  cfg.boundary.strength = 0.0;
  cfg.edges = EdgeCondition::Periodic;
  ImaginaryDistanceOptions io;
  io.launch.kind = LaunchKind::PlaneWave;
  io.tol = opts.tol;
  io.max_steps = opts.max_steps;
  // The step-size extrapolation above handles the splitting bias here.
  io.polish.enabled = false;
  auto modes = solve_imaginary_distance(cell, cfg, io);
  if (!modes.front().converged)
    throw NumericalError("space-filling mode did not converge in " + std::to_string(opts.max_steps) + " steps");
  return modes.front();
}

}  // namespace detail

inline FsmResult fsm_solve(const PcfGeometry& geom, double lambda_um, const FsmOptions& opts = {}) {
  geom.validate();
  if (!(lambda_um > 0.0)) throw ConfigError("wavelength must be positive");
  if (!(opts.step_scale > 0.0)) throw ConfigError("step scale must be positive");
  const Grid2D grid = cladding_cell_grid(geom, opts.samples_per_pitch);
  const IndexProfile cell = periodic_cladding_cell(geom, grid, opts.subsamples);
  FsmResult out;
  out.dz_um = opts.step_scale * geom.n_background * geom.pitch_um * geom.pitch_um / lambda_um;
  const ModeSolution coarse = detail::fsm_run(cell, lambda_um, out.dz_um, opts);
  out.n_coarse = coarse.n_eff;
  out.iterations = coarse.iterations;
  out.n_cl_eff = coarse.n_eff;
  if (opts.extrapolate) {
    const ModeSolution fine = detail::fsm_run(cell, lambda_um, 0.5 * out.dz_um, opts);
    out.n_fine = fine.n_eff;
    out.iterations += fine.iterations;
    out.n_cl_eff = (4.0 * fine.n_eff - coarse.n_eff) / 3.0;
  }
  out.n_cl_eff = std::min(out.n_cl_eff, geom.n_background);
  return out;
}

inline double fsm_index(const PcfGeometry& geom, double lambda_um, const FsmOptions& opts = {}) {
  return fsm_solve(geom, lambda_um, opts).n_cl_eff;
}

struct EmpiricalCoeffs {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
};

/// Closed-form fit coefficients as functions of r = d / pitch.
inline EmpiricalCoeffs empirical_coeffs(double d_over_pitch) {
  const double r = d_over_pitch;
  if (!(r > 0.0 && r < 0.904)) throw ConfigError("d/pitch must lie in (0, 0.904) for the empirical fit");
  EmpiricalCoeffs c;
  c.A = r + 0.457 + 3.405 * r / (0.904 - r);
  c.B = 0.200 * r + 0.100 + 0.027 * std::pow(1.045 - r, -2.8);
  c.C = 0.630 * std::exp(0.755 / (0.171 + r));
  return c;
}

inline double empirical_v(double lambda_over_pitch, double d_over_pitch) {
  if (!(lambda_over_pitch > 0.0)) throw ConfigError("lambda/pitch must be positive");
  const EmpiricalCoeffs c = empirical_coeffs(d_over_pitch);
  return c.A / (c.B * std::exp(c.C * lambda_over_pitch) + 1.0);
}

enum class CurveKind {
  /// Numeric V_eff against pitch / lambda.
  NumericVeff,
  /// Closed-form fit against lambda / pitch.
  EmpiricalV,
};

inline const char* to_string(CurveKind k) { return k == CurveKind::NumericVeff ? "numeric" : "empirical"; }

enum class Abscissa { LambdaOverPitch, PitchOverLambda };

inline const char* to_string(Abscissa a) {
  return a == Abscissa::LambdaOverPitch ? "lambda_over_pitch" : "pitch_over_lambda";
}

inline Abscissa native_abscissa(CurveKind k) {
  return k == CurveKind::NumericVeff ? Abscissa::PitchOverLambda : Abscissa::LambdaOverPitch;
}

struct VPoint {
  double abscissa = 0.0;
  double V = 0.0;
  /// Set when the point could not be evaluated; V is then NaN.
  std::string error;
  bool ok() const { return error.empty(); }
};

struct Crossing {
  double abscissa = 0.0;
  /// Spacing of the bracketing samples.
  double uncertainty = 0.0;
};

struct VCurve {
  CurveKind kind = CurveKind::EmpiricalV;
  Abscissa abscissa = Abscissa::LambdaOverPitch;
  double d_over_pitch = 0.0;
  std::vector<VPoint> points;
  /// First crossing of the single-mode cutoff, if any.
  std::optional<Crossing> crossing;
};

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  void validate() const {
    if (!(step > 0.0)) throw ConfigError("sweep step must be positive");
    if (!(stop >= start)) throw ConfigError("sweep stop must not precede start");
    if (!(start > 0.0)) throw ConfigError("sweep abscissa must be positive");
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> v;
    const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= n; ++k) v.push_back(start + k * step);
    return v;
  }
};

/// Linear interpolation of the first sign change of V - cutoff.
inline std::optional<Crossing> find_cutoff_crossing(const std::vector<VPoint>& pts) {
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const VPoint& a = pts[k - 1];
    const VPoint& b = pts[k];
    if (!a.ok() || !b.ok()) continue;
    const double fa = a.V - kSingleModeCutoff, fb = b.V - kSingleModeCutoff;
    if (fa == 0.0) return Crossing{a.abscissa, b.abscissa - a.abscissa};
    if ((fa < 0.0) != (fb < 0.0)) {
      const double t = fa / (fa - fb);
      return Crossing{a.abscissa + t * (b.abscissa - a.abscissa), b.abscissa - a.abscissa};
    }
  }
  return std::nullopt;
}

struct SweepOptions {
  /// Template for numeric curves; pitch and indices are taken from here and
  /// the hole size is set from each d/pitch.
  PcfGeometry geometry{};
  FsmOptions fsm{};
  /// Defaults to the curve kind's own convention.
  std::optional<Abscissa> abscissa;
  /// Worker count for numeric points; 0 picks the hardware concurrency.
  unsigned workers = 0;
};

inline VPoint evaluate_v_point(CurveKind kind, double d_over_pitch, double abscissa, const SweepOptions& opts) {
  VPoint p{abscissa, std::nan(""), {}};
  const Abscissa axis = opts.abscissa.value_or(native_abscissa(kind));
  const double lambda_over_pitch = axis == Abscissa::LambdaOverPitch ? abscissa : 1.0 / abscissa;
  try {
    if (kind == CurveKind::EmpiricalV) {
      p.V = empirical_v(lambda_over_pitch, d_over_pitch);
    } else {
      PcfGeometry g = opts.geometry;
      g.hole_diameter_um = d_over_pitch * g.pitch_um;
      const double lambda = lambda_over_pitch * g.pitch_um;
      p.V = v_eff(g.pitch_um, g.n_background, fsm_index(g, lambda, opts.fsm), lambda);
    }
  } catch (const Error& e) {
    p.error = e.what();
  }
  return p;
}

/// One curve per d/pitch. Points are evaluated concurrently but curves keep
/// abscissa order, so the result does not depend on scheduling.
inline std::vector<VCurve> sweep_v(CurveKind kind, const std::vector<double>& d_over_pitch, const SweepRange& range,
                                   const SweepOptions& opts = {}) {
  const std::vector<double> xs = range.values();
  if (d_over_pitch.empty()) throw ConfigError("sweep needs at least one d/pitch value");
  for (double r : d_over_pitch)
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError("d/pitch values must lie in [0, 1)");

  std::vector<VCurve> curves;
  for (double r : d_over_pitch) {
    VCurve c;
    c.kind = kind;
    c.abscissa = opts.abscissa.value_or(native_abscissa(kind));
    c.d_over_pitch = r;
    c.points.resize(xs.size());
    curves.push_back(std::move(c));
  }

  const std::size_t total = curves.size() * xs.size();
  auto eval = [&](std::size_t idx) {
    const std::size_t ci = idx / xs.size(), pi = idx % xs.size();
    curves[ci].points[pi] = evaluate_v_point(kind, curves[ci].d_over_pitch, xs[pi], opts);
  };

  if (kind == CurveKind::EmpiricalV) {
    for (std::size_t idx = 0; idx < total; ++idx) eval(idx);
  } else {
    unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&] {
        for (std::size_t idx = next++; idx < total; idx = next++) eval(idx);
      }));
    for (auto& j : jobs) j.get();
  }

  for (auto& c : curves) c.crossing = find_cutoff_crossing(c.points);
  return curves;
}

}  // namespace pcf
