#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>
#include <vector>

#include "pcfbpm/grid.hpp"

namespace pcf {

enum class HoleShape { Circular, Square };

inline const char* to_string(HoleShape s) { return s == HoleShape::Circular ? "circular" : "square"; }

/// Index-guiding photonic crystal fiber cross-section: a triangular lattice of
/// air holes of pitch `pitch_um`, `rings` hexagonal rings around the origin,
/// with the central hole optionally omitted to form the solid core.
///
/// `hole_diameter_um` is the hole diameter for circular holes and the side
/// length for square holes (squares are axis-aligned).
struct PcfGeometry {
  double pitch_um = 2.3;
  double hole_diameter_um = 0.6;
  HoleShape hole_shape = HoleShape::Circular;
  int rings = 4;
  bool core_defect = true;
  double n_background = 1.45;
  double n_hole = 1.0;

  double d_over_pitch() const { return hole_diameter_um / pitch_um; }

  void validate() const {
    if (!(pitch_um > 0.0)) throw ConfigError("pitch must be positive");
    if (!(hole_diameter_um >= 0.0)) throw ConfigError("hole size must be non-negative");
    if (!(hole_diameter_um < pitch_um))
      throw ConfigError("holes overlap: hole size " + std::to_string(hole_diameter_um) +
                        " um must be smaller than the pitch " + std::to_string(pitch_um) + " um");
    if (!(n_hole > 0.0) || !(n_background > n_hole))
      throw ConfigError("index-guiding operation needs n_background > n_hole > 0");
    if (rings < 1) throw ConfigError("rings must be >= 1");
  }

  bool operator==(const PcfGeometry&) const = default;
};

struct HolePlacement {
  double x_um = 0.0;
  double y_um = 0.0;
  HoleShape shape = HoleShape::Circular;
  /// Diameter (circular) or side length (square).
  double size_um = 0.0;

  bool contains(double x, double y) const {
    const double ddx = x - x_um;
    const double ddy = y - y_um;
    const double h = 0.5 * size_um;
    if (shape == HoleShape::Circular) return ddx * ddx + ddy * ddy < h * h;
    return std::abs(ddx) < h && std::abs(ddy) < h;
  }

  /// Half-extent of the axis-aligned bounding box.
  double half_extent() const { return 0.5 * size_um; }
};

inline int expected_hole_count(int rings, bool core_defect) { return 3 * rings * (rings + 1) + (core_defect ? 0 : 1); }

/// Hole centers of the finite hexagonal lattice. Ring r contributes 6r holes
/// walked counter-clockwise starting from (r*pitch, 0).
inline std::vector<HolePlacement> build_hex_lattice(const PcfGeometry& geom) {
  geom.validate();
  std::vector<HolePlacement> holes;
  holes.reserve(static_cast<std::size_t>(expected_hole_count(geom.rings, geom.core_defect)));
  const auto place = [&](double x, double y) { holes.push_back({x, y, geom.hole_shape, geom.hole_diameter_um}); };
  if (!geom.core_defect) place(0.0, 0.0);
  for (int r = 1; r <= geom.rings; ++r) {
    for (int side = 0; side < 6; ++side) {
      const double a0 = side * kPi / 3.0;
      const double a1 = (side + 1) * kPi / 3.0;
      const double cx0 = r * geom.pitch_um * std::cos(a0), cy0 = r * geom.pitch_um * std::sin(a0);
      const double cx1 = r * geom.pitch_um * std::cos(a1), cy1 = r * geom.pitch_um * std::sin(a1);
      for (int t = 0; t < r; ++t) {
        const double s = static_cast<double>(t) / r;
        place(cx0 + s * (cx1 - cx0), cy0 + s * (cy1 - cy0));
      }
    }
  }
  return holes;
}

/// Half-widths of the smallest origin-centered box containing every hole.
inline std::pair<double, double> lattice_extent(const std::vector<HolePlacement>& holes) {
  double hx = 0.0, hy = 0.0;
  for (const auto& h : holes) {
    hx = std::max(hx, std::abs(h.x_um) + h.half_extent());
    hy = std::max(hy, std::abs(h.y_um) + h.half_extent());
  }
  return {hx, hy};
}

/// Area-weighted permittivity rasterization. Each cell's air fraction f is
/// estimated from subsamples x subsamples point samples; the stored index is
/// sqrt(f*n_hole^2 + (1-f)*n_background^2).
inline IndexProfile rasterize_index(const std::vector<HolePlacement>& holes, const PcfGeometry& geom,
                                    const Grid2D& grid, int subsamples) {
  grid.validate();
  if (subsamples < 1) throw ConfigError("subsamples must be >= 1");
  const double x_lo = grid.x0_um, x_hi = grid.x0_um + grid.width_um();
  const double y_lo = grid.y0_um, y_hi = grid.y0_um + grid.height_um();
  for (const auto& h : holes) {
    const double e = h.half_extent();
    if (h.x_um - e < x_lo || h.x_um + e > x_hi || h.y_um - e < y_lo || h.y_um + e > y_hi)
      throw ConfigError("grid window does not contain the hole at (" + std::to_string(h.x_um) + ", " +
                        std::to_string(h.y_um) + ") um");
  }

  // Candidate holes per cell from each hole's bounding box.
  std::vector<std::vector<int>> candidates(grid.size());
  for (std::size_t k = 0; k < holes.size(); ++k) {
    const auto& h = holes[k];
    if (h.size_um <= 0.0) continue;
    const double e = h.half_extent();
    const int i0 = std::max(0, static_cast<int>(std::floor((h.x_um - e - x_lo) / grid.dx_um)));
    const int i1 = std::min(grid.nx - 1, static_cast<int>(std::floor((h.x_um + e - x_lo) / grid.dx_um)));
    const int j0 = std::max(0, static_cast<int>(std::floor((h.y_um - e - y_lo) / grid.dy_um)));
    const int j1 = std::min(grid.ny - 1, static_cast<int>(std::floor((h.y_um + e - y_lo) / grid.dy_um)));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) candidates[static_cast<std::size_t>(j) * grid.nx + i].push_back(static_cast<int>(k));
  }

  const double eps_bg = geom.n_background * geom.n_background;
  const double eps_hole = geom.n_hole * geom.n_hole;
  const double inv_total = 1.0 / (static_cast<double>(subsamples) * subsamples);
  IndexProfile profile(grid, geom.n_background);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const auto& cand = candidates[static_cast<std::size_t>(j) * grid.nx + i];
      if (cand.empty()) continue;
      int inside = 0;
      for (int sj = 0; sj < subsamples; ++sj) {
        const double y = grid.y0_um + (j + (sj + 0.5) / subsamples) * grid.dy_um;
        for (int si = 0; si < subsamples; ++si) {
          const double x = grid.x0_um + (i + (si + 0.5) / subsamples) * grid.dx_um;
          for (int k : cand) {
            if (holes[static_cast<std::size_t>(k)].contains(x, y)) {
              ++inside;
              break;
            }
          }
        }
      }
      const double f = inside * inv_total;
      profile(i, j) = std::sqrt(f * eps_hole + (1.0 - f) * eps_bg);
    }
  }
  return profile;
}

/// Window that holds the whole lattice plus `margin_um` on every side.
inline Grid2D window_for(const PcfGeometry& geom, double dx_um, double dy_um, double margin_um) {
  const auto holes = build_hex_lattice(geom);
  auto [hx, hy] = lattice_extent(holes);
  // A d = 0 lattice still spans the hole centers.
  hx = std::max(hx, geom.rings * geom.pitch_um);
  hy = std::max(hy, geom.rings * geom.pitch_um * std::sqrt(3.0) / 2.0);
  return Grid2D::covering(hx + margin_um, hy + margin_um, dx_um, dy_um);
}

inline IndexProfile rasterize_geometry(const PcfGeometry& geom, const Grid2D& grid, int subsamples) {
  return rasterize_index(build_hex_lattice(geom), geom, grid, subsamples);
}

/// Smallest hexagonal-norm radius that contains every hole of the lattice;
/// the natural inner edge of a lattice jacket absorber.
inline double lattice_hex_radius(const PcfGeometry& geom) {
  double r = geom.rings * geom.pitch_um;
  for (const auto& h : build_hex_lattice(geom)) {
    const double e = h.half_extent();
    for (int k = 0; k < 64; ++k) {
      const double t = 2.0 * kPi * k / 64.0;
      double ox = e * std::cos(t), oy = e * std::sin(t);
      if (h.shape == HoleShape::Square) {
        const double m = std::max(std::abs(std::cos(t)), std::abs(std::sin(t)));
        ox /= m;
        oy /= m;
      }
      r = std::max(r, hex_norm(h.x_um + ox, h.y_um + oy));
    }
  }
  return r;
}

/// Rectangular pitch x pitch*sqrt(3) unit cell of the infinite lattice,
/// centered on the origin, sampled with `samples_per_pitch` cells along x.
/// One hole sits at the center and four quarter holes at the corners.
inline Grid2D cladding_cell_grid(const PcfGeometry& geom, int samples_per_pitch) {
  if (samples_per_pitch < 8) throw ConfigError("cladding cell needs at least 8 samples per pitch");
  const double height = geom.pitch_um * std::sqrt(3.0);
  const int ny = static_cast<int>(std::lround(samples_per_pitch * std::sqrt(3.0)));
  return Grid2D::centered(samples_per_pitch, ny, geom.pitch_um / samples_per_pitch, height / ny);
}

inline IndexProfile periodic_cladding_cell(const PcfGeometry& geom, const Grid2D& grid, int subsamples = 8) {
  geom.validate();
  grid.validate();
  const double w = geom.pitch_um;
  const double h = geom.pitch_um * std::sqrt(3.0);
  if (std::abs(grid.width_um() - w) > 1e-9 * w || std::abs(grid.height_um() - h) > 1e-9 * h ||
      std::abs(grid.x0_um + 0.5 * w) > 1e-9 * w || std::abs(grid.y0_um + 0.5 * h) > 1e-9 * h)
    throw ConfigError("cladding cell grid must span the centered pitch x pitch*sqrt(3) rectangle");
  std::vector<HolePlacement> holes;
  const double s = geom.hole_diameter_um;
  holes.push_back({0.0, 0.0, geom.hole_shape, s});
  for (double sx : {-0.5, 0.5})
    for (double sy : {-0.5, 0.5}) holes.push_back({sx * w, sy * h, geom.hole_shape, s});

  // Corner holes straddle the window edge, so bypass the containment check.
  PcfGeometry cell = geom;
  const double pad = s;
  Grid2D padded = grid;
  padded.nx += 2 * static_cast<int>(std::ceil(pad / grid.dx_um));
  padded.ny += 2 * static_cast<int>(std::ceil(pad / grid.dy_um));
  const int ox = (padded.nx - grid.nx) / 2;
  const int oy = (padded.ny - grid.ny) / 2;
  padded.x0_um -= ox * grid.dx_um;
  padded.y0_um -= oy * grid.dy_um;
  const IndexProfile big = rasterize_index(holes, cell, padded, subsamples);
  IndexProfile out(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out(i, j) = big(i + ox, j + oy);
  return out;
}

/// Fraction of the window area that is hole, from the rasterized permittivity.
inline double air_fill_fraction(const IndexProfile& profile, const PcfGeometry& geom) {
  const double eps_bg = geom.n_background * geom.n_background;
  const double eps_hole = geom.n_hole * geom.n_hole;
  double acc = 0.0;
  for (double n : profile.values) acc += (eps_bg - n * n) / (eps_bg - eps_hole);
  return acc / static_cast<double>(profile.size());
}

/// Analytic air fill fraction of the infinite lattice: one hole per
/// sqrt(3)/2 * pitch^2 of area.
inline double lattice_fill_fraction(const PcfGeometry& geom) {
  const double r = geom.d_over_pitch();
  if (geom.hole_shape == HoleShape::Circular) return kPi / (2.0 * std::sqrt(3.0)) * r * r;
  return 2.0 * r * r / std::sqrt(3.0);
}

inline void write_index_csv(const IndexProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "x_um,y_um,n\n" << std::setprecision(17);
  for (int j = 0; j < profile.grid.ny; ++j)
    for (int i = 0; i < profile.grid.nx; ++i)
      out << profile.grid.x(i) << ',' << profile.grid.y(j) << ',' << profile(i, j) << '\n';
  if (!out) throw Error("write failed for " + path);
}

/// Plain-text graymap; n_lo maps to 0 and n_hi to 255. A degenerate range
/// renders everything at 255.
inline void write_index_pgm(const IndexProfile& profile, const std::string& path, double n_lo, double n_hi) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "P2\n" << profile.grid.nx << ' ' << profile.grid.ny << "\n255\n";
  const double span = n_hi - n_lo;
  // Top row of the image is the largest y.
  for (int j = profile.grid.ny - 1; j >= 0; --j) {
    for (int i = 0; i < profile.grid.nx; ++i) {
      int level = 255;
      if (span > 0.0) level = static_cast<int>(std::lround(255.0 * std::clamp((profile(i, j) - n_lo) / span, 0.0, 1.0)));
      out << level << (i + 1 == profile.grid.nx ? '\n' : ' ');
    }
  }
  if (!out) throw Error("write failed for " + path);
}

}  // namespace pcf
