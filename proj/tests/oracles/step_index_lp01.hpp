#pragma once

#include <cmath>
#include <stdexcept>

namespace pcf::oracle {

/// Effective index of the LP01 mode of a weakly guiding step-index fiber from
/// the scalar characteristic equation
///   U J1(U) / J0(U) = W K1(W) / K0(W),  U^2 + W^2 = V^2,
/// solved by bisection on U in (0, min(V, j0,1)).
inline double lp01_neff(double a_um, double n_co, double n_cl, double lambda_um) {
  const double k0 = 2.0 * M_PI / lambda_um;
  const double v = k0 * a_um * std::sqrt(n_co * n_co - n_cl * n_cl);
  const double j01 = 2.404825557695773;
  const auto f = [&](double u) {
    const double w = std::sqrt(v * v - u * u);
    return u * std::cyl_bessel_j(1.0, u) / std::cyl_bessel_j(0.0, u) -
           w * std::cyl_bessel_k(1.0, w) / std::cyl_bessel_k(0.0, w);
  };
  double lo = 1e-12 * v;
  double hi = std::min(v, j01) * (1.0 - 1e-12);
  if (!(f(lo) < 0.0 && f(hi) > 0.0)) throw std::runtime_error("LP01 root not bracketed");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  const double u = 0.5 * (lo + hi);
  return std::sqrt(n_co * n_co - (u / (k0 * a_um)) * (u / (k0 * a_um)));
}

}  // namespace pcf::oracle
