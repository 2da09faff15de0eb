#pragma once

#include <cmath>

#include "pcfbpm/grid.hpp"

namespace pcf::testing {

/// Circular step-index core of radius a, area-weighted in permittivity.
inline IndexProfile step_index_profile(const Grid2D& g, double a_um, double n_co, double n_cl, int sub = 8) {
  IndexProfile p(g, n_cl);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      int in = 0;
      for (int sj = 0; sj < sub; ++sj)
        for (int si = 0; si < sub; ++si) {
          const double x = g.x0_um + (i + (si + 0.5) / sub) * g.dx_um;
          const double y = g.y0_um + (j + (sj + 0.5) / sub) * g.dy_um;
          in += x * x + y * y < a_um * a_um;
        }
      const double f = in / double(sub * sub);
      p(i, j) = std::sqrt(f * n_co * n_co + (1 - f) * n_cl * n_cl);
    }
  return p;
}

}  // namespace pcf::testing
