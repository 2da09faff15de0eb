#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "pcfbpm/grid.hpp"

namespace pcf {

enum class SpectralWindow { Hann };

/// Correlation p(z_i) = <phi_in, phi(z_i)> sampled at z_i = i * dz, i >= 0.
struct CorrelationRecord {
  double dz_um = 0.0;
  std::vector<cplx> samples;
  SpectralWindow window = SpectralWindow::Hann;
  int pad_factor = 4;

  double length_um() const { return samples.empty() ? 0.0 : dz_um * static_cast<double>(samples.size() - 1); }
};

struct SpectralPeak {
  double beta_per_um = 0.0;
  /// Peak height divided by the window sum; approximates |c_m|^2.
  double amplitude = 0.0;
  /// Resolution-limited linewidth (Hann main-lobe half width).
  double width_per_um = 0.0;
};

namespace detail {

// FFTW planning is not thread-safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// Windowed, zero-padded transform S(beta) = sum_i w_i p_i exp(-i beta z_i),
/// returned on the FFT grid beta_k = 2 pi k / (N dz) with k wrapped to
/// [-N/2, N/2).
inline std::vector<cplx> correlation_spectrum(const CorrelationRecord& rec) {
  const std::size_t m = rec.samples.size();
  if (m < 4) throw ConfigError("correlation record needs at least 4 samples");
  if (rec.pad_factor < 1) throw ConfigError("pad factor must be >= 1");
  const std::size_t n = m * static_cast<std::size_t>(rec.pad_factor);
  std::vector<cplx> buf(n, cplx(0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const double w = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(m - 1)));
    buf[i] = w * rec.samples[i];
  }
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    plan = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return buf;
}

inline double spectral_bin_width(const CorrelationRecord& rec) {
  return 2.0 * kPi / (static_cast<double>(rec.samples.size() * static_cast<std::size_t>(rec.pad_factor)) * rec.dz_um);
}

/// Local maxima of |S| above `rel_threshold` * max|S|, refined by a parabola
/// through the log-magnitudes of the peak bin and its neighbours. A maximum
/// that a stronger peak's window sidelobes could account for is dropped.
/// Sorted by descending beta.
inline std::vector<SpectralPeak> find_spectral_peaks(const CorrelationRecord& rec, double rel_threshold = 1e-3) {
  const std::vector<cplx> spec = correlation_spectrum(rec);
  const std::size_t n = spec.size();
  std::vector<double> mag(n);
  for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(spec[k]);
  const double top = *std::max_element(mag.begin(), mag.end());
  std::vector<SpectralPeak> peaks;
  if (!(top > 0.0)) return peaks;

  double window_sum = 0.0;
  const std::size_t m = rec.samples.size();
  for (std::size_t i = 0; i < m; ++i)
    window_sum += 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(m - 1)));
  const double bin = spectral_bin_width(rec);
  const double width = 2.0 * kPi * 2.0 / rec.length_um();
  const double pad = static_cast<double>(rec.pad_factor);

  struct Candidate {
    double k;
    double height;
  };
  std::vector<Candidate> found;
  for (std::size_t k = 0; k < n; ++k) {
    const double c = mag[k];
    const double l = mag[(k + n - 1) % n];
    const double r = mag[(k + 1) % n];
    if (!(c > l && c >= r) || c < rel_threshold * top) continue;
    const double la = std::log(l), lb = std::log(c), lc = std::log(r);
    const double denom = la - 2.0 * lb + lc;
    double delta = 0.0, peak_log = lb;
    if (denom < 0.0) {
      delta = 0.5 * (la - lc) / denom;
      peak_log = lb - 0.25 * (la - lc) * delta;
    }
    found.push_back({static_cast<double>(k) - (k >= n / 2 ? static_cast<double>(n) : 0.0) + delta, std::exp(peak_log)});
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.height > b.height; });

  // Hann leakage at x unpadded bins from a line: |sin(pi x)| / (pi x |1 - x^2|).
  const auto leakage = [](double x) { return x < 1.5 ? 1.0 : 1.0 / (kPi * x * (x * x - 1.0)); };
  std::vector<Candidate> kept;
  for (const auto& c : found) {
    bool real_line = true;
    for (const auto& s : kept) {
      double d = std::abs(c.k - s.k);
      d = std::min(d, static_cast<double>(n) - d) / pad;
      real_line = real_line && c.height > 2.0 * leakage(d) * s.height;
    }
    if (real_line) kept.push_back(c);
  }
  for (const auto& c : kept) peaks.push_back({c.k * bin, c.height / window_sum, width});
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.beta_per_um > b.beta_per_um; });
  return peaks;
}

}  // namespace pcf
