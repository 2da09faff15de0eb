#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcf {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input that is detected before any computation starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during computation (non-finite values, zero fields,
/// non-convergence, negative radicands).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Uniform cell-centered sampling of a rectangular window.
///
/// Sample (i, j) sits at the center of cell i along x and cell j along y, so
/// the window [x0, x0 + nx*dx] x [y0, y0 + ny*dy] is tiled exactly.
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double dx_um = 0.0;
  double dy_um = 0.0;
  double x0_um = 0.0;
  double y0_um = 0.0;

  double x(int i) const { return x0_um + (i + 0.5) * dx_um; }
  double y(int j) const { return y0_um + (j + 0.5) * dy_um; }
  double width_um() const { return nx * dx_um; }
  double height_um() const { return ny * dy_um; }
  double cell_area() const { return dx_um * dy_um; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  void validate() const {
    if (nx < 8 || ny < 8)
      throw ConfigError("grid needs at least 8 samples per axis, got " + std::to_string(nx) + "x" +
                        std::to_string(ny));
    if (!(dx_um > 0.0) || !(dy_um > 0.0)) throw ConfigError("grid spacing must be positive");
    if (!std::isfinite(x0_um) || !std::isfinite(y0_um)) throw ConfigError("grid origin must be finite");
  }

  bool operator==(const Grid2D&) const = default;

  /// Window of nx*dx by ny*dy centered on the origin.
  static Grid2D centered(int nx, int ny, double dx, double dy) {
    Grid2D g{nx, ny, dx, dy, -0.5 * nx * dx, -0.5 * ny * dy};
    g.validate();
    return g;
  }

  /// Smallest centered grid with an even sample count whose window covers
  /// [-half_x, half_x] x [-half_y, half_y].
  static Grid2D covering(double half_x_um, double half_y_um, double dx, double dy) {
    if (!(dx > 0.0) || !(dy > 0.0)) throw ConfigError("grid spacing must be positive");
    const int nx = 2 * static_cast<int>(std::ceil(half_x_um / dx - 1e-9));
    const int ny = 2 * static_cast<int>(std::ceil(half_y_um / dy - 1e-9));
    return centered(nx, ny, dx, dy);
  }
};

/// Samples of type T on a Grid2D, stored row-major with y as the outer index.
template <class T>
struct Sampled2D {
  Grid2D grid;
  std::vector<T> values;

  Sampled2D() = default;
  explicit Sampled2D(const Grid2D& g, T fill = T{}) : grid(g), values(g.size(), fill) {}
  Sampled2D(const Grid2D& g, std::vector<T> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw GridMismatch("sample count does not match grid");
  }

  T& operator()(int i, int j) { return values[static_cast<std::size_t>(j) * grid.nx + i]; }
  const T& operator()(int i, int j) const { return values[static_cast<std::size_t>(j) * grid.nx + i]; }

  std::size_t size() const { return values.size(); }
};

using ComplexField2D = Sampled2D<cplx>;
/// Refractive index n(x, y).
using IndexProfile = Sampled2D<double>;
/// Complex refractive index, used where an absorber contributes loss.
using ComplexIndexMap = Sampled2D<cplx>;

inline void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": grids differ");
}

template <class T>
bool all_finite(const Sampled2D<T>& f) {
  for (const auto& v : f.values) {
    if constexpr (std::is_same_v<T, cplx>) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    } else {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

inline double wavenumber(double lambda_um) { return 2.0 * kPi / lambda_um; }

/// Hexagonal norm: the hexagon with vertices at (+-r, 0) is {hex_norm <= r}.
inline double hex_norm(double x, double y) {
  const double ay = std::abs(y);
  return std::max(2.0 * ay / std::sqrt(3.0), std::abs(x) + ay / std::sqrt(3.0));
}

}  // namespace pcf
