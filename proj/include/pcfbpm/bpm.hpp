#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pcfbpm/field_math.hpp"
#include "pcfbpm/grid.hpp"
#include "pcfbpm/tridiag.hpp"

namespace pcf {

enum class Axis { RealDistance, ImaginaryDistance };

/// Complex-index absorber. The edge ramp covers the outermost `width_cells`
/// of the window: the imaginary index rises quadratically from 0 at the inner
/// edge to `strength` at the window edge, and corners take the larger of the
/// two ramps.
///
/// A finite hole lattice embedded in a rectangular window leaves large solid
/// regions outside the last ring whose modes out-rank the core mode. Setting
/// `jacket_radius_um` adds a lattice jacket: beyond the hexagon whose
/// vertices sit at (+-jacket_radius_um, 0) the imaginary index ramps up
/// quadratically over `jacket_ramp_um` to `jacket_strength` and stays there
/// to the window edge. Outer-silica modes sit well above the guided core
/// modes, so the jacket needs a stronger loss than the edge ramp.
struct BoundarySpec {
  int width_cells = 20;
  double strength = 0.02;
  double jacket_radius_um = 0.0;
  double jacket_ramp_um = 1.0;
  double jacket_strength = 0.1;

  bool enabled() const { return strength > 0.0 || (has_jacket() && jacket_strength > 0.0); }
  bool has_jacket() const { return jacket_radius_um > 0.0; }
  void validate() const {
    if (width_cells < 4) throw ConfigError("absorber needs at least 4 cells");
    if (!(strength >= 0.0)) throw ConfigError("absorber strength must be non-negative");
    if (!(jacket_radius_um >= 0.0)) throw ConfigError("jacket radius must be non-negative");
    if (!(jacket_ramp_um > 0.0)) throw ConfigError("jacket ramp must be positive");
    if (!(jacket_strength >= 0.0)) throw ConfigError("jacket strength must be non-negative");
  }
  bool operator==(const BoundarySpec&) const = default;
};

struct PropagationConfig {
  double lambda_um = 1.55;
  double dz_um = 0.1;
  /// Envelope reference index; the profile maximum when unset.
  std::optional<double> n_ref;
  BoundarySpec boundary;
  Axis axis = Axis::RealDistance;
  EdgeCondition edges = EdgeCondition::Dirichlet;

  double k0() const { return wavenumber(lambda_um); }
  bool operator==(const PropagationConfig&) const = default;
};

/// Upper bound on lambda*dz / (n_ref * min(dx,dy)^2), the number of
/// transverse cells a step diffracts across. Larger values are rejected as
/// a configuration error rather than silently producing a smeared solution.
constexpr double kMaxStepDiffractionNumber = 1.0e4;

/// Imaginary part of the absorber index at every sample.
inline IndexProfile absorber_profile(const Grid2D& grid, const BoundarySpec& boundary) {
  IndexProfile kappa(grid, 0.0);
  if (!boundary.enabled()) return kappa;
  const int w = boundary.width_cells;
  const auto ramp = [&](int idx, int n) {
    const int depth = std::max(w - idx, w - (n - 1 - idx));  // cells into the absorber, 1..w
    if (depth <= 0) return 0.0;
    const double s = static_cast<double>(depth) / w;
    return boundary.strength * s * s;
  };
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      double k = std::max(ramp(i, grid.nx), ramp(j, grid.ny));
      if (boundary.has_jacket()) {
        const double s = std::clamp((hex_norm(grid.x(i), grid.y(j)) - boundary.jacket_radius_um) / boundary.jacket_ramp_um, 0.0, 1.0);
        k = std::max(k, boundary.jacket_strength * s * s);
      }
      kappa(i, j) = k;
    }
  }
  return kappa;
}

/// Profile index with the absorber's imaginary part added.
inline ComplexIndexMap with_absorber(const IndexProfile& profile, const BoundarySpec& boundary) {
  const IndexProfile kappa = absorber_profile(profile.grid, boundary);
  ComplexIndexMap out(profile.grid);
  for (std::size_t k = 0; k < profile.size(); ++k) out.values[k] = cplx(profile.values[k], kappa.values[k]);
  return out;
}

/// Precomputed split-operator stepper for the paraxial envelope equation
///
///   2i k_ref du/dz = -[laplacian + k0^2 (n^2 - n_ref^2)] u,   k_ref = k0 n_ref,
///
/// whose modes evolve as exp(i beta_par z) with beta_par = a / (2 k_ref) for
/// each eigenvalue a of the bracketed operator. On the imaginary axis
/// (z = -i z') the same operator drives exp(beta_par z') growth.
///
/// The operator is split into x and y parts, each carrying half of the
/// potential. On the real axis a step is a half-step row sweep, a full column
/// sweep and another half-step row sweep, each a Crank-Nicolson (Cayley)
/// update: every sweep is unitary and the symmetric arrangement keeps the step
/// second order. On the imaginary axis a step is one row sweep followed by one
/// column sweep, each backward Euler:
/// growth factors stay in (0, 1] below the reference and short-wavelength
/// components are damped instead of flipping sign. The absorber is applied
/// afterwards as the multiplicative mask exp(-k0 kappa dz).
class Stepper {
 public:
  Stepper(const IndexProfile& profile, const PropagationConfig& config) : grid_(profile.grid), config_(config) {
    grid_.validate();
    config_.boundary.validate();
    if (!(config_.lambda_um > 0.0)) throw ConfigError("wavelength must be positive");
    if (!(config_.dz_um > 0.0)) throw ConfigError("step size must be positive");
    const auto [lo, hi] = std::minmax_element(profile.values.begin(), profile.values.end());
    const double n_ref = config_.n_ref.value_or(*hi);
    const double slack = 1e-12 * *hi;
    if (!(n_ref >= *lo - slack && n_ref <= *hi + slack))
      throw ConfigError("reference index " + std::to_string(n_ref) + " outside the profile range [" +
                        std::to_string(*lo) + ", " + std::to_string(*hi) + "]");
    config_.n_ref = n_ref;
    if (config_.edges == EdgeCondition::Periodic && config_.boundary.enabled())
      throw ConfigError("periodic edges cannot carry an absorber");
    if (config_.edges == EdgeCondition::Periodic && (grid_.nx < 3 || grid_.ny < 3))
      throw ConfigError("periodic edges need at least 3 samples per axis");

    k0_ = config_.k0();
    k_ref_ = k0_ * n_ref;
    const double h = std::min(grid_.dx_um, grid_.dy_um);
    const double diffraction = config_.lambda_um * config_.dz_um / (n_ref * h * h);
    if (diffraction > kMaxStepDiffractionNumber)
      throw ConfigError("step size too large for the grid: diffraction number " + std::to_string(diffraction) +
                        " exceeds " + std::to_string(kMaxStepDiffractionNumber));

    if (config_.axis == Axis::RealDistance) {
      col_implicit_ = cplx(0.0, config_.dz_um / (4.0 * k_ref_));
      row_implicit_ = 0.5 * col_implicit_;
      row_explicit_ = row_implicit_;
      col_explicit_ = col_implicit_;
    } else {
      col_implicit_ = row_implicit_ = config_.dz_um / (2.0 * k_ref_);
    }

    half_potential_.resize(grid_.size());
    const double k02 = k0_ * k0_;
    for (std::size_t k = 0; k < grid_.size(); ++k)
      half_potential_[k] = 0.5 * k02 * (profile.values[k] * profile.values[k] - n_ref * n_ref);

    ax_ = 1.0 / (grid_.dx_um * grid_.dx_um);
    ay_ = 1.0 / (grid_.dy_um * grid_.dy_um);
    const cplx off_x = -row_implicit_ * ax_;
    const cplx off_y = -col_implicit_ * ay_;

    std::vector<cplx> diag;
    diag.resize(static_cast<std::size_t>(grid_.nx));
    row_factors_.reserve(static_cast<std::size_t>(grid_.ny));
    for (int j = 0; j < grid_.ny; ++j) {
      for (int i = 0; i < grid_.nx; ++i)
        diag[i] = 1.0 - row_implicit_ * (-2.0 * ax_ + half_potential_[static_cast<std::size_t>(j) * grid_.nx + i]);
      row_factors_.emplace_back(diag, off_x, off_x, periodic());
    }
    diag.resize(static_cast<std::size_t>(grid_.ny));
    col_factors_.reserve(static_cast<std::size_t>(grid_.nx));
    for (int i = 0; i < grid_.nx; ++i) {
      for (int j = 0; j < grid_.ny; ++j)
        diag[j] = 1.0 - col_implicit_ * (-2.0 * ay_ + half_potential_[static_cast<std::size_t>(j) * grid_.nx + i]);
      col_factors_.emplace_back(diag, off_y, off_y, periodic());
    }

    if (config_.boundary.enabled()) {
      const IndexProfile kappa = absorber_profile(grid_, config_.boundary);
      mask_.resize(grid_.size());
      for (std::size_t k = 0; k < grid_.size(); ++k) mask_[k] = std::exp(-k0_ * kappa.values[k] * config_.dz_um);
    }
  }

  const Grid2D& grid() const { return grid_; }
  const PropagationConfig& config() const { return config_; }
  double n_ref() const { return *config_.n_ref; }
  double k0() const { return k0_; }
  double k_ref() const { return k_ref_; }
  double dz() const { return config_.dz_um; }
  bool periodic() const { return config_.edges == EdgeCondition::Periodic; }

  /// Advances one slice. `step_index` only labels the error message.
  ComplexField2D step(const ComplexField2D& f, long step_index = -1) const {
    require_same_grid(f.grid, grid_, "step");
    ComplexField2D out = sweep_columns(sweep_rows(f));
    if (row_explicit_ != 0.0) out = sweep_rows(out);

    if (!mask_.empty())
      for (std::size_t k = 0; k < out.size(); ++k) out.values[k] *= mask_[k];

    if (!all_finite(out))
      throw NumericalError("non-finite field after propagation step" +
                           (step_index >= 0 ? " " + std::to_string(step_index) : std::string()));
    return out;
  }

 private:
  ComplexField2D sweep_rows(const ComplexField2D& f) const {
    const int nx = grid_.nx, ny = grid_.ny;
    const bool wrap = periodic();
    ComplexField2D out(grid_);
    std::vector<cplx> line(static_cast<std::size_t>(nx));
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * nx + i;
        const cplx c = f.values[k];
        if (row_explicit_ == 0.0) {
          line[i] = c;
          continue;
        }
        const int im = i > 0 ? i - 1 : (wrap ? nx - 1 : -1);
        const int ip = i + 1 < nx ? i + 1 : (wrap ? 0 : -1);
        const cplx l = im >= 0 ? f.values[k - i + im] : cplx(0.0);
        const cplx r = ip >= 0 ? f.values[k - i + ip] : cplx(0.0);
        line[i] = c + row_explicit_ * ((l - 2.0 * c + r) * ax_ + half_potential_[k] * c);
      }
      row_factors_[j].solve(std::span<cplx>(line.data(), nx));
      std::copy_n(line.begin(), nx, out.values.begin() + static_cast<std::ptrdiff_t>(j) * nx);
    }
    return out;
  }

  ComplexField2D sweep_columns(const ComplexField2D& f) const {
    const int nx = grid_.nx, ny = grid_.ny;
    const bool wrap = periodic();
    ComplexField2D out(grid_);
    std::vector<cplx> line(static_cast<std::size_t>(ny));
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) {
        const std::size_t k = static_cast<std::size_t>(j) * nx + i;
        const cplx c = f.values[k];
        if (col_explicit_ == 0.0) {
          line[j] = c;
          continue;
        }
        const int jm = j > 0 ? j - 1 : (wrap ? ny - 1 : -1);
        const int jp = j + 1 < ny ? j + 1 : (wrap ? 0 : -1);
        const cplx d = jm >= 0 ? f(i, jm) : cplx(0.0);
        const cplx u = jp >= 0 ? f(i, jp) : cplx(0.0);
        line[j] = c + col_explicit_ * ((d - 2.0 * c + u) * ay_ + half_potential_[k] * c);
      }
      col_factors_[i].solve(std::span<cplx>(line.data(), ny));
      for (int j = 0; j < ny; ++j) out(i, j) = line[j];
    }
    return out;
  }

  // Row solves use Dirichlet or periodic factors depending on the edges.
  class LineFactor {
   public:
    LineFactor(std::span<const cplx> diag, cplx lower, cplx upper, bool cyclic) : cyclic_(cyclic) {
      if (cyclic_)
        cyc_ = CyclicTridiagonalFactor(diag, lower, upper);
      else
        tri_ = TridiagonalFactor(diag, lower, upper);
    }
    void solve(std::span<cplx> rhs) const {
      if (cyclic_)
        cyc_.solve(rhs);
      else
        tri_.solve(rhs);
    }

   private:
    bool cyclic_;
    TridiagonalFactor tri_;
    CyclicTridiagonalFactor cyc_;
  };

  Grid2D grid_;
  PropagationConfig config_;
  double k0_ = 0.0;
  double k_ref_ = 0.0;
  double ax_ = 0.0;
  double ay_ = 0.0;
  cplx row_implicit_{};
  cplx col_implicit_{};
  cplx row_explicit_{};
  cplx col_explicit_{};
  std::vector<double> half_potential_;
  std::vector<LineFactor> row_factors_;
  std::vector<LineFactor> col_factors_;
  std::vector<double> mask_;
};

inline Stepper make_stepper(const IndexProfile& profile, const PropagationConfig& config) {
  return Stepper(profile, config);
}

/// Called after every step with the 1-based step index, the distance
/// travelled (z, or z' on the imaginary axis) and the current field.
using PropagationObserver = std::function<void(long step, double z_um, const ComplexField2D& field)>;

inline ComplexField2D propagate(const Stepper& stepper, ComplexField2D field, long n_steps,
                                const PropagationObserver& observer = {}) {
  if (n_steps < 1) throw ConfigError("propagation needs at least one step");
  for (long s = 1; s <= n_steps; ++s) {
    field = stepper.step(field, s);
    if (observer) observer(s, s * stepper.dz(), field);
  }
  return field;
}

}  // namespace pcf
