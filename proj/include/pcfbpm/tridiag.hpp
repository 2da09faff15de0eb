#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pcfbpm/grid.hpp"

namespace pcf {

/// LU factorization of a complex tridiagonal matrix with constant
/// off-diagonals (the shape produced by a second-difference operator on a
/// uniform grid). Solves in place with the Thomas recurrence.
class TridiagonalFactor {
 public:
  TridiagonalFactor() = default;

  /// `diag` holds the main diagonal; `lower` and `upper` are the constant
  /// sub- and super-diagonal entries.
  TridiagonalFactor(std::span<const cplx> diag, cplx lower, cplx upper)
      : lower_(lower), inv_pivot_(diag.size()), upper_mod_(diag.size()) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    cplx pivot = diag[0];
    for (std::size_t i = 0;; ++i) {
      if (pivot == cplx(0.0)) throw NumericalError("tridiagonal factorization hit a zero pivot");
      inv_pivot_[i] = 1.0 / pivot;
      upper_mod_[i] = upper * inv_pivot_[i];
      if (i + 1 == n) break;
      pivot = diag[i + 1] - lower * upper_mod_[i];
    }
  }

  std::size_t size() const { return inv_pivot_.size(); }

  void solve(std::span<cplx> rhs) const {
    const std::size_t n = inv_pivot_.size();
    if (n == 0) return;
    rhs[0] *= inv_pivot_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - lower_ * rhs[i - 1]) * inv_pivot_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= upper_mod_[i] * rhs[i + 1];
  }

 private:
  cplx lower_{};
  std::vector<cplx> inv_pivot_;
  std::vector<cplx> upper_mod_;
};

/// Periodic (cyclic) tridiagonal system: the corner entries A[0][n-1] = lower
/// and A[n-1][0] = upper couple the ends. Sherman-Morrison on top of a
/// TridiagonalFactor.
class CyclicTridiagonalFactor {
 public:
  CyclicTridiagonalFactor() = default;

  CyclicTridiagonalFactor(std::span<const cplx> diag, cplx lower, cplx upper) {
    const std::size_t n = diag.size();
    if (n < 3) throw ConfigError("cyclic tridiagonal system needs at least 3 unknowns");
    // A = B + u v^T with u = (gamma, 0..0, upper), v = (1, 0..0, lower/gamma).
    gamma_ = -diag[0];
    corner_ratio_ = lower / gamma_;
    std::vector<cplx> modified(diag.begin(), diag.end());
    modified[0] -= gamma_;
    modified[n - 1] -= upper * corner_ratio_;
    base_ = TridiagonalFactor(modified, lower, upper);
    z_.assign(n, cplx(0.0));
    z_[0] = gamma_;
    z_[n - 1] = upper;
    base_.solve(z_);
    denom_ = 1.0 + z_[0] + corner_ratio_ * z_[n - 1];
    if (denom_ == cplx(0.0)) throw NumericalError("singular cyclic tridiagonal system");
  }

  std::size_t size() const { return z_.size(); }

  void solve(std::span<cplx> rhs) const {
    const std::size_t n = z_.size();
    base_.solve(rhs);
    const cplx factor = (rhs[0] + corner_ratio_ * rhs[n - 1]) / denom_;
    for (std::size_t i = 0; i < n; ++i) rhs[i] -= factor * z_[i];
  }

 private:
  cplx gamma_{};
  cplx corner_ratio_{};
  cplx denom_{};
  TridiagonalFactor base_;
  std::vector<cplx> z_;
};

}  // namespace pcf
