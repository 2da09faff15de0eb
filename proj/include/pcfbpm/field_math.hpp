#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "pcfbpm/grid.hpp"

namespace pcf {

/// How the transverse operator treats samples beyond the window edge.
enum class EdgeCondition {
  Dirichlet,  ///< ghost samples are zero
  Periodic,   ///< the window tiles the plane
};

enum class LaunchKind { Gaussian, PlaneWave };

struct LaunchSpec {
  LaunchKind kind = LaunchKind::Gaussian;
  double center_x_um = 0.0;
  double center_y_um = 0.0;
  /// 1/e field radius of the Gaussian.
  double waist_um = 2.0;

  bool operator==(const LaunchSpec&) const = default;
};

/// Sum of conj(a) * b * dx * dy.
inline cplx inner_product(const ComplexField2D& a, const ComplexField2D& b) {
  require_same_grid(a.grid, b.grid, "inner_product");
  cplx acc(0.0);
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a.values[k]) * b.values[k];
  return acc * a.grid.cell_area();
}

inline double power(const ComplexField2D& f) {
  double acc = 0.0;
  for (const auto& v : f.values) acc += std::norm(v);
  return acc * f.grid.cell_area();
}

inline ComplexField2D normalize(ComplexField2D f) {
  const double p = power(f);
  if (!(p > 0.0) || !std::isfinite(p)) throw NumericalError("cannot normalize a zero-power field");
  const double s = 1.0 / std::sqrt(p);
  for (auto& v : f.values) v *= s;
  return f;
}

inline ComplexField2D make_launch_field(const LaunchSpec& spec, const Grid2D& grid) {
  grid.validate();
  ComplexField2D f(grid);
  if (spec.kind == LaunchKind::PlaneWave) {
    std::fill(f.values.begin(), f.values.end(), cplx(1.0));
    return normalize(std::move(f));
  }
  if (!(spec.waist_um > 0.0)) throw ConfigError("launch waist must be positive");
  if (spec.waist_um < 2.0 * std::max(grid.dx_um, grid.dy_um))
    throw ConfigError("launch waist " + std::to_string(spec.waist_um) + " um is not resolved by the grid");
  const double inv_w2 = 1.0 / (spec.waist_um * spec.waist_um);
  for (int j = 0; j < grid.ny; ++j) {
    const double ry = grid.y(j) - spec.center_y_um;
    for (int i = 0; i < grid.nx; ++i) {
      const double rx = grid.x(i) - spec.center_x_um;
      f(i, j) = std::exp(-(rx * rx + ry * ry) * inv_w2);
    }
  }
  return normalize(std::move(f));
}

/// Five-point transverse Laplacian.
inline ComplexField2D laplacian(const ComplexField2D& f, EdgeCondition edges = EdgeCondition::Dirichlet) {
  const Grid2D& g = f.grid;
  const double ax = 1.0 / (g.dx_um * g.dx_um);
  const double ay = 1.0 / (g.dy_um * g.dy_um);
  const bool periodic = edges == EdgeCondition::Periodic;
  ComplexField2D out(g);
  for (int j = 0; j < g.ny; ++j) {
    const int jm = j > 0 ? j - 1 : (periodic ? g.ny - 1 : -1);
    const int jp = j + 1 < g.ny ? j + 1 : (periodic ? 0 : -1);
    for (int i = 0; i < g.nx; ++i) {
      const int im = i > 0 ? i - 1 : (periodic ? g.nx - 1 : -1);
      const int ip = i + 1 < g.nx ? i + 1 : (periodic ? 0 : -1);
      const cplx c = f(i, j);
      const cplx l = im >= 0 ? f(im, j) : cplx(0.0);
      const cplx r = ip >= 0 ? f(ip, j) : cplx(0.0);
      const cplx d = jm >= 0 ? f(i, jm) : cplx(0.0);
      const cplx u = jp >= 0 ? f(i, jp) : cplx(0.0);
      out(i, j) = (l - 2.0 * c + r) * ax + (d - 2.0 * c + u) * ay;
    }
  }
  return out;
}

namespace detail {

template <class IndexT>
cplx helmholtz_quotient(const ComplexField2D& f, const Sampled2D<IndexT>& index, double k0, EdgeCondition edges) {
  require_same_grid(f.grid, index.grid, "rayleigh quotient");
  const ComplexField2D lap = laplacian(f, edges);
  const double k2 = k0 * k0;
  cplx num(0.0);
  double den = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const IndexT n = index.values[k];
    num += std::conj(f.values[k]) * (lap.values[k] + k2 * (n * n) * f.values[k]);
    den += std::norm(f.values[k]);
  }
  if (!(den > 0.0)) throw NumericalError("rayleigh quotient of a zero-power field");
  return num / den;
}

}  // namespace detail

/// Variational estimate of beta^2 for the scalar Helmholtz operator
/// laplacian + k0^2 n^2 (real part; the operator is symmetric).
inline double rayleigh_quotient_beta2(const ComplexField2D& f, const IndexProfile& profile, double k0,
                                      EdgeCondition edges = EdgeCondition::Dirichlet) {
  return detail::helmholtz_quotient(f, profile, k0, edges).real();
}

/// Same quotient with a complex index and no real part taken.
inline cplx complex_rayleigh_quotient_beta2(const ComplexField2D& f, const ComplexIndexMap& index, double k0,
                                            EdgeCondition edges = EdgeCondition::Dirichlet) {
  return detail::helmholtz_quotient(f, index, k0, edges);
}

/// Relative eigen-residual ||(laplacian + k0^2 n^2 - beta2) f|| / (|beta2| ||f||).
inline double helmholtz_residual(const ComplexField2D& f, const IndexProfile& profile, double k0, double beta2,
                                 EdgeCondition edges = EdgeCondition::Dirichlet) {
  const ComplexField2D lap = laplacian(f, edges);
  const double k2 = k0 * k0;
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double n = profile.values[k];
    num += std::norm(lap.values[k] + (k2 * n * n - beta2) * f.values[k]);
    den += std::norm(f.values[k]);
  }
  return std::sqrt(num / den) / std::abs(beta2);
}

/// Rotates f so that its largest-magnitude sample is real and positive.
inline void apply_phase_convention(ComplexField2D& f) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double m = std::norm(f.values[k]);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  if (best_mag <= 0.0) return;
  const cplx rot = std::conj(f.values[best]) / std::abs(f.values[best]);
  for (auto& v : f.values) v *= rot;
  f.values[best] = std::abs(f.values[best]);
}

}  // namespace pcf
