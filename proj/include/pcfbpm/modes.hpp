#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "pcfbpm/bpm.hpp"
#include "pcfbpm/field_math.hpp"
#include "pcfbpm/spectrum.hpp"

namespace pcf {

enum class SolveMethod { ImaginaryDistance, Correlation };

inline const char* to_string(SolveMethod m) {
  return m == SolveMethod::ImaginaryDistance ? "imaginary-distance" : "correlation";
}

struct ModeSolution {
  int order = 0;
  /// Unit power; the largest-magnitude sample is real and positive.
  ComplexField2D field;
  double beta_per_um = 0.0;
  /// Filled by apply_imaginary_beta_correction. Positive values mean the
  /// mode loses power along +z (fields vary as exp(i beta z)).
  std::optional<double> beta_imag_per_um;
  double n_eff = 0.0;
  SolveMethod method = SolveMethod::ImaginaryDistance;
  /// Relative Helmholtz eigen-residual of the returned field.
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
  /// False when n_eff does not exceed the supplied cladding index.
  bool guided = true;
  double n_ref = 0.0;
  /// True when the field was refined by the shift-invert polish. A polished
  /// mode counts as converged whatever the stepping loop reported.
  bool polished = false;
};

/// Removes the components of f along each (unit-power) found mode.
inline ComplexField2D deflate(ComplexField2D f, const std::vector<ModeSolution>& found) {
  for (const auto& m : found) {
    const cplx c = inner_product(m.field, f);
    for (std::size_t k = 0; k < f.size(); ++k) f.values[k] -= c * m.field.values[k];
  }
  return f;
}

/// Full propagation constant from the envelope eigenvalue: substituting
/// phi = u exp(i k_ref z) into the Helmholtz equation gives
/// beta^2 = k_ref^2 + 2 k_ref beta_par exactly.
inline double paraxial_to_helmholtz(double beta_par, double k_ref) {
  const double radicand = k_ref * k_ref + 2.0 * k_ref * beta_par;
  if (!(radicand > 0.0))
    throw NumericalError("envelope eigenvalue " + std::to_string(beta_par) + " lies too far below k_ref " +
                         std::to_string(k_ref) + "; choose a reference index closer to the mode");
  return std::sqrt(radicand);
}

inline double helmholtz_to_paraxial(double beta, double k_ref) { return (beta * beta - k_ref * k_ref) / (2.0 * k_ref); }

/// Shift-invert refinement of imaginary-distance results.
///
/// The split stepper's fixed point carries an O(dz^2) bias. That is harmless
/// for n_eff but mixes near-degenerate modes far more than their splitting.
/// The polish runs block inverse iteration with Rayleigh-Ritz on the operator
/// the imaginary-distance iteration converges to as dz -> 0, one shift per
/// cluster of nearly equal eigenvalues.
struct PolishOptions {
  bool enabled = true;
  /// Relative beta^2 gap below which neighbouring modes share a shift.
  double cluster_tol = 1e-3;
  /// Extra seeded vectors carried with each cluster. They keep the slowest
  /// converging direction away from the cluster edge.
  int guard_vectors = 3;
  int max_iterations = 40;
  /// Relative eigen-residual at which a cluster stops iterating.
  double tol = 1e-12;
  /// Clusters that end above this residual keep their unpolished fields.
  double accept_tol = 1e-8;
};

struct ImaginaryDistanceOptions {
  int n_modes = 1;
  /// Converged when successive beta^2 estimates differ by less than tol
  /// (relative) for `settle_steps` consecutive steps.
  double tol = 1e-12;
  long max_steps = 20000;
  long min_steps = 20;
  int settle_steps = 3;
  /// Every `recenter_interval` steps the reference index moves to the current
  /// n_eff estimate if they differ by more than `recenter_threshold`.
  long recenter_interval = 100;
  double recenter_threshold = 1e-7;
  /// Fundamental launch; higher orders start from an off-center copy with
  /// seeded noise so that every symmetry class is excited.
  LaunchSpec launch{};
  std::uint64_t seed = 20240917;
  /// Modes with n_eff at or below this index are flagged as not guided.
  std::optional<double> cladding_index;
  /// Called after every iteration with (order, step, beta^2, field).
  std::function<void(int, long, double, const ComplexField2D&)> monitor;
  PolishOptions polish{};
};

namespace detail {

inline ComplexField2D random_field(const Grid2D& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ComplexField2D f(grid);
  for (auto& v : f.values) v = uni(rng);
  return f;
}

inline ComplexField2D higher_order_launch(const LaunchSpec& base, const Grid2D& grid, int order,
                                          std::mt19937_64& rng) {
  LaunchSpec shifted = base;
  const double angle = 0.7 + 1.3 * order;
  const double w = base.kind == LaunchKind::Gaussian ? base.waist_um : 0.25 * std::min(grid.width_um(), grid.height_um());
  shifted.kind = LaunchKind::Gaussian;
  shifted.waist_um = w;
  shifted.center_x_um += 0.35 * w * std::cos(angle);
  shifted.center_y_um += 0.35 * w * std::sin(angle);
  ComplexField2D f = make_launch_field(shifted, grid);
  const ComplexField2D noise = normalize(random_field(grid, rng));
  for (std::size_t k = 0; k < f.size(); ++k) f.values[k] += 0.1 * noise.values[k];
  return f;
}

inline double max_index(const IndexProfile& p) { return *std::max_element(p.values.begin(), p.values.end()); }
inline double min_index(const IndexProfile& p) { return *std::min_element(p.values.begin(), p.values.end()); }

}  // namespace detail

/// Fills beta, n_eff and residual of a mode from the Rayleigh quotient of its
/// field, routed through the envelope eigenvalue at reference k_ref.
inline void evaluate_mode(ModeSolution& mode, const IndexProfile& profile, double k0, double k_ref,
                          EdgeCondition edges) {
  const double beta2 = rayleigh_quotient_beta2(mode.field, profile, k0, edges);
  const double beta_par = (beta2 - k_ref * k_ref) / (2.0 * k_ref);
  mode.beta_per_um = paraxial_to_helmholtz(beta_par, k_ref);
  mode.n_eff = mode.beta_per_um / k0;
  mode.residual = helmholtz_residual(mode.field, profile, k0, mode.beta_per_um * mode.beta_per_um, edges);
}

namespace detail {

/// Real symmetric operator laplacian + k0^2 n^2 - 2 k_ref k0 kappa. The
/// absorber term is how the imaginary-axis mask acts on growth rates.
inline Eigen::SparseMatrix<double> damped_helmholtz(const IndexProfile& profile, const IndexProfile& kappa, double k0,
                                                    double k_ref, EdgeCondition edges) {
  const Grid2D& g = profile.grid;
  const double ax = 1.0 / (g.dx_um * g.dx_um), ay = 1.0 / (g.dy_um * g.dy_um);
  const bool wrap = edges == EdgeCondition::Periodic;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int k = j * g.nx + i;
      const double n = profile(i, j);
      t.emplace_back(k, k, -2.0 * ax - 2.0 * ay + k0 * k0 * n * n - 2.0 * k_ref * k0 * kappa(i, j));
      const auto link = [&](int ii, int jj, double w) {
        if (wrap) {
          ii = (ii + g.nx) % g.nx;
          jj = (jj + g.ny) % g.ny;
        } else if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) {
          return;
        }
        t.emplace_back(k, jj * g.nx + ii, w);
      };
      link(i - 1, j, ax);
      link(i + 1, j, ax);
      link(i, j - 1, ay);
      link(i, j + 1, ay);
    }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

// Real operators act on real and imaginary parts separately.
template <class Op>
ComplexField2D apply_real(const Op& op, const ComplexField2D& f) {
  const Eigen::Index n = static_cast<Eigen::Index>(f.size());
  const auto v = Eigen::Map<const Eigen::VectorXcd>(f.values.data(), n);
  const Eigen::VectorXd re = op(Eigen::VectorXd(v.real())), im = op(Eigen::VectorXd(v.imag()));
  ComplexField2D out(f.grid);
  for (Eigen::Index k = 0; k < n; ++k) out.values[static_cast<std::size_t>(k)] = cplx(re[k], im[k]);
  return out;
}

inline std::vector<ComplexField2D> orthonormalize(std::vector<ComplexField2D> v, const std::vector<ModeSolution>& fixed) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = deflate(std::move(v[i]), fixed);
    for (std::size_t j = 0; j < i; ++j) {
      const cplx c = inner_product(v[j], v[i]);
      for (std::size_t k = 0; k < v[i].size(); ++k) v[i].values[k] -= c * v[j].values[k];
    }
    v[i] = normalize(std::move(v[i]));
  }
  return v;
}

/// Rotates an orthonormal block onto its Ritz vectors, largest first.
inline std::vector<ComplexField2D> rayleigh_ritz(const std::vector<ComplexField2D>& v,
                                                 const Eigen::SparseMatrix<double>& a, std::vector<double>& theta,
                                                 std::vector<double>& residual) {
  const int m = static_cast<int>(v.size());
  std::vector<ComplexField2D> av;
  for (const auto& f : v) av.push_back(apply_real([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); }, f));
  Eigen::MatrixXcd h(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) h(i, j) = inner_product(v[i], av[j]);
  const Eigen::MatrixXcd hs = 0.5 * (h + h.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hs);
  std::vector<ComplexField2D> out;
  theta.clear();
  residual.clear();
  for (int c = m - 1; c >= 0; --c) {
    ComplexField2D f(v[0].grid), af(v[0].grid);
    for (int i = 0; i < m; ++i) {
      const cplx w = es.eigenvectors()(i, c);
      for (std::size_t k = 0; k < f.size(); ++k) {
        f.values[k] += w * v[i].values[k];
        af.values[k] += w * av[i].values[k];
      }
    }
    const double th = es.eigenvalues()(c);
    double r = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) r += std::norm(af.values[k] - th * f.values[k]);
    theta.push_back(th);
    residual.push_back(std::sqrt(r * f.grid.cell_area() / power(f)) / std::abs(th));
    out.push_back(std::move(f));
  }
  return out;
}

/// Polishes modes in place (sorted by descending n_eff on entry).
inline void polish_modes(std::vector<ModeSolution>& modes, const IndexProfile& profile, const PropagationConfig& cfg,
                         double k_ref, const PolishOptions& opts) {
  if (modes.empty()) return;
  const double k0 = cfg.k0();
  const IndexProfile kappa = absorber_profile(profile.grid, cfg.boundary);
  const Eigen::SparseMatrix<double> a = damped_helmholtz(profile, kappa, k0, k_ref, cfg.edges);
  const auto op = [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); };

  std::vector<double> theta;
  for (const auto& m : modes) theta.push_back(inner_product(m.field, apply_real(op, m.field)).real());

  std::vector<ModeSolution> done;
  std::size_t first = 0;
  while (first < modes.size()) {
    std::size_t last = first + 1;
    while (last < modes.size() &&
           std::abs(theta[last - 1] - theta[last]) < opts.cluster_tol * std::abs(theta[last - 1]))
      ++last;
    const std::size_t m = last - first;

    double mean = 0.0;
    for (std::size_t k = first; k < last; ++k) mean += theta[k] / static_cast<double>(m);
    const double sigma = mean + 1e-9 * std::abs(mean);
    Eigen::SparseMatrix<double> shifted = a;
    for (Eigen::Index k = 0; k < shifted.rows(); ++k) shifted.coeffRef(k, k) -= sigma;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(shifted);

    std::vector<ComplexField2D> v;
    for (std::size_t k = first; k < last; ++k) v.push_back(modes[k].field);
    std::mt19937_64 rng(first + 1);
    for (int g = 0; g < opts.guard_vectors; ++g) v.push_back(random_field(profile.grid, rng));
    v = orthonormalize(std::move(v), done);

    std::vector<double> th, res;
    bool ok = lu.info() == Eigen::Success;
    double worst = std::numeric_limits<double>::infinity();
    for (int it = 0; ok && it < opts.max_iterations; ++it) {
      for (auto& f : v) f = apply_real([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(lu.solve(x)); }, f);
      if (!std::all_of(v.begin(), v.end(), [](const auto& f) { return all_finite(f); })) {
        ok = false;
        break;
      }
      // Ritz pairs come back largest first; the leading m are the cluster.
      v = rayleigh_ritz(orthonormalize(std::move(v), done), a, th, res);
      worst = *std::max_element(res.begin(), res.begin() + static_cast<std::ptrdiff_t>(m));
      if (worst < opts.tol) break;
    }
    ok = ok && worst < opts.accept_tol;
    for (std::size_t k = first; k < last; ++k) {
      if (ok) {
        modes[k].field = std::move(v[k - first]);
        apply_phase_convention(modes[k].field);
        modes[k].polished = true;
        modes[k].converged = true;
      }
      done.push_back(modes[k]);
    }
    first = last;
  }
}

}  // namespace detail

/// Imaginary-distance mode solver with per-step deflation.
///
/// Each order starts from a launch field and is repeatedly stepped along the
/// imaginary axis, projected off the lower orders and renormalized until the
/// Rayleigh-quotient beta^2 stops changing. Modes that hit max_steps are
/// returned with converged = false. Unless disabled, the set is then refined
/// by the shift-invert polish. The result is sorted by descending n_eff and
/// orders are renumbered accordingly.
inline std::vector<ModeSolution> solve_imaginary_distance(const IndexProfile& profile, const PropagationConfig& config,
                                                          const ImaginaryDistanceOptions& opts) {
  if (opts.n_modes < 1) throw ConfigError("n_modes must be >= 1");
  if (!(opts.tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (opts.max_steps < 1) throw ConfigError("max_steps must be >= 1");

  PropagationConfig cfg = config;
  cfg.axis = Axis::ImaginaryDistance;
  const double n_lo = detail::min_index(profile), n_hi = detail::max_index(profile);
  const double k0 = cfg.k0();
  std::mt19937_64 rng(opts.seed);
  std::vector<ModeSolution> found;

  for (int order = 0; order < opts.n_modes; ++order) {
    PropagationConfig run_cfg = cfg;
    auto stepper = std::make_unique<Stepper>(profile, run_cfg);

    ComplexField2D u = order == 0 ? make_launch_field(opts.launch, profile.grid)
                                  : detail::higher_order_launch(opts.launch, profile.grid, order, rng);
    u = deflate(std::move(u), found);
    if (!(power(u) > 1e-20)) u = deflate(detail::random_field(profile.grid, rng), found);
    u = normalize(std::move(u));

    double prev = rayleigh_quotient_beta2(u, profile, k0, cfg.edges);
    int settled = 0;
    long it = 0;
    bool converged = false;
    for (it = 1; it <= opts.max_steps; ++it) {
      u = deflate(stepper->step(u, it), found);
      if (!(power(u) > 1e-200)) {
        u = deflate(detail::random_field(profile.grid, rng), found);
        settled = 0;
      }
      u = normalize(std::move(u));
      const double beta2 = rayleigh_quotient_beta2(u, profile, k0, cfg.edges);
      if (opts.monitor) opts.monitor(order, it, beta2, u);

      if (it >= opts.min_steps && std::abs(beta2 - prev) < opts.tol * std::abs(beta2)) {
        if (++settled >= opts.settle_steps) {
          prev = beta2;
          converged = true;
          break;
        }
      } else {
        settled = 0;
      }
      prev = beta2;

      if (opts.recenter_interval > 0 && it % opts.recenter_interval == 0 && beta2 > 0.0) {
        const double n_est = std::clamp(std::sqrt(beta2) / k0, n_lo, n_hi);
        if (std::abs(n_est - stepper->n_ref()) > opts.recenter_threshold) {
          run_cfg.n_ref = n_est;
          stepper = std::make_unique<Stepper>(profile, run_cfg);
        }
      }
    }

    ModeSolution mode;
    mode.order = order;
    mode.method = SolveMethod::ImaginaryDistance;
    mode.iterations = std::min(it, opts.max_steps);
    mode.converged = converged;
    mode.n_ref = stepper->n_ref();
    apply_phase_convention(u);
    mode.field = std::move(u);
    evaluate_mode(mode, profile, k0, stepper->k_ref(), cfg.edges);
    if (opts.cladding_index) mode.guided = mode.n_eff > *opts.cladding_index;
    found.push_back(std::move(mode));
  }

  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.n_eff > b.n_eff; });
  if (opts.polish.enabled) {
    detail::polish_modes(found, profile, cfg, k0 * found.front().n_ref, opts.polish);
    for (auto& m : found) {
      evaluate_mode(m, profile, k0, k0 * m.n_ref, cfg.edges);
      if (opts.cladding_index) m.guided = m.n_eff > *opts.cladding_index;
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.n_eff > b.n_eff; });
  }
  for (std::size_t k = 0; k < found.size(); ++k) found[k].order = static_cast<int>(k);
  return found;
}

/// Records p(z_i) = <phi_in, phi(z_i)> for i = 0..n_steps along a real-axis
/// propagation.
inline CorrelationRecord record_correlation(const Stepper& stepper, const ComplexField2D& launch, long n_steps,
                                            int pad_factor = 4) {
  if (stepper.config().axis != Axis::RealDistance) throw ConfigError("correlation needs a real-distance stepper");
  CorrelationRecord rec;
  rec.dz_um = stepper.dz();
  rec.pad_factor = pad_factor;
  rec.samples.reserve(static_cast<std::size_t>(n_steps) + 1);
  rec.samples.push_back(inner_product(launch, launch));
  propagate(stepper, launch, n_steps,
            [&](long, double, const ComplexField2D& f) { rec.samples.push_back(inner_product(launch, f)); });
  return rec;
}

/// Beats one propagation against several envelope propagation constants:
/// phi_m = (1/L) * integral_0^L phi(z) exp(-i beta_m z) dz, trapezoidal in z.
inline std::vector<ComplexField2D> extract_mode_fields(const Stepper& stepper, const ComplexField2D& launch,
                                                       long n_steps, const std::vector<double>& envelope_betas) {
  const Grid2D& g = launch.grid;
  std::vector<ComplexField2D> acc(envelope_betas.size(), ComplexField2D(g));
  const double dz = stepper.dz();
  const double length = dz * static_cast<double>(n_steps);
  const auto accumulate = [&](long step, const ComplexField2D& f) {
    const double z = dz * static_cast<double>(step);
    const double w = (step == 0 || step == n_steps) ? 0.5 * dz / length : dz / length;
    for (std::size_t m = 0; m < envelope_betas.size(); ++m) {
      const cplx ph = std::polar(w, -envelope_betas[m] * z);
      auto& a = acc[m].values;
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += ph * f.values[k];
    }
  };
  accumulate(0, launch);
  propagate(stepper, launch, n_steps, [&](long s, double, const ComplexField2D& f) { accumulate(s, f); });
  return acc;
}

struct CorrelationOptions {
  LaunchSpec launch{};
  long n_steps = 4000;
  int n_modes = 1;
  int pad_factor = 4;
  /// Peaks below this fraction of the strongest are treated as background.
  double peak_threshold = 1e-3;
};

struct CorrelationResult {
  CorrelationRecord record;
  /// All detected peaks, envelope coordinates, descending beta.
  std::vector<SpectralPeak> envelope_peaks;
  /// The peaks selected for extraction with beta mapped to the full
  /// propagation constant.
  std::vector<SpectralPeak> peaks;
  std::vector<ModeSolution> modes;
  double k_ref = 0.0;
  double resolution_per_um = 0.0;
  std::vector<std::string> diagnostics;
};

/// Correlation-method solver: one propagation records p(z), its spectrum
/// locates the propagation constants, and a second propagation beats the
/// field against them to recover the mode profiles. Extracted fields are
/// orthogonalized in descending-beta order and re-evaluated with the
/// Rayleigh quotient.
inline CorrelationResult solve_correlation(const IndexProfile& profile, const PropagationConfig& config,
                                           const CorrelationOptions& opts) {
  if (opts.n_modes < 1) throw ConfigError("n_modes must be >= 1");
  if (opts.n_steps < 16) throw ConfigError("correlation run needs at least 16 steps");
  PropagationConfig cfg = config;
  cfg.axis = Axis::RealDistance;
  const Stepper stepper(profile, cfg);
  const ComplexField2D launch = make_launch_field(opts.launch, profile.grid);

  CorrelationResult out;
  out.k_ref = stepper.k_ref();
  out.record = record_correlation(stepper, launch, opts.n_steps, opts.pad_factor);
  out.envelope_peaks = find_spectral_peaks(out.record, opts.peak_threshold);
  const double length = out.record.length_um();
  out.resolution_per_um = 2.0 * kPi / (opts.pad_factor * length);

  std::vector<SpectralPeak> chosen = out.envelope_peaks;
  std::stable_sort(chosen.begin(), chosen.end(), [](const auto& a, const auto& b) { return a.amplitude > b.amplitude; });
  if (static_cast<int>(chosen.size()) < opts.n_modes)
    out.diagnostics.push_back("only " + std::to_string(chosen.size()) + " resolvable peaks for " +
                              std::to_string(opts.n_modes) + " requested modes");
  if (static_cast<int>(chosen.size()) > opts.n_modes) chosen.resize(static_cast<std::size_t>(opts.n_modes));
  std::sort(chosen.begin(), chosen.end(), [](const auto& a, const auto& b) { return a.beta_per_um > b.beta_per_um; });
  for (std::size_t k = 1; k < chosen.size(); ++k) {
    const double gap = chosen[k - 1].beta_per_um - chosen[k].beta_per_um;
    if (gap < 2.0 * kPi / length)
      out.diagnostics.push_back("peaks at " + std::to_string(chosen[k - 1].beta_per_um) + " and " +
                                std::to_string(chosen[k].beta_per_um) +
                                " /um are closer than the run resolution; propagate further");
  }
  if (chosen.empty()) return out;

  std::vector<double> betas;
  for (const auto& p : chosen) betas.push_back(p.beta_per_um);
  std::vector<ComplexField2D> fields = extract_mode_fields(stepper, launch, opts.n_steps, betas);

  std::vector<ModeSolution> modes;
  for (std::size_t m = 0; m < fields.size(); ++m) {
    ComplexField2D f = deflate(std::move(fields[m]), modes);
    if (!(power(f) > 0.0)) {
      out.diagnostics.push_back("extracted field for peak " + std::to_string(m) + " vanished");
      continue;
    }
    ModeSolution mode;
    mode.order = static_cast<int>(modes.size());
    mode.method = SolveMethod::Correlation;
    mode.iterations = 2 * opts.n_steps;
    mode.converged = true;
    mode.n_ref = stepper.n_ref();
    mode.field = normalize(std::move(f));
    apply_phase_convention(mode.field);
    evaluate_mode(mode, profile, stepper.k0(), stepper.k_ref(), cfg.edges);
    modes.push_back(std::move(mode));

    SpectralPeak mapped = chosen[m];
    mapped.beta_per_um = paraxial_to_helmholtz(chosen[m].beta_per_um, stepper.k_ref());
    out.peaks.push_back(mapped);
  }
  std::stable_sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) { return a.n_eff > b.n_eff; });
  for (std::size_t k = 0; k < modes.size(); ++k) modes[k].order = static_cast<int>(k);
  out.modes = std::move(modes);
  return out;
}

/// Complex propagation constant from the unreduced Rayleigh quotient over the
/// whole window, absorber included. Principal root (non-negative real part).
inline cplx imaginary_beta_correction(const ModeSolution& mode, const ComplexIndexMap& index, double k0,
                                      EdgeCondition edges = EdgeCondition::Dirichlet) {
  return std::sqrt(complex_rayleigh_quotient_beta2(mode.field, index, k0, edges));
}

inline void apply_imaginary_beta_correction(ModeSolution& mode, const ComplexIndexMap& index, double k0,
                                            EdgeCondition edges = EdgeCondition::Dirichlet) {
  const cplx beta = imaginary_beta_correction(mode, index, k0, edges);
  mode.beta_per_um = beta.real();
  mode.beta_imag_per_um = beta.imag();
  mode.n_eff = beta.real() / k0;
}

}  // namespace pcf
