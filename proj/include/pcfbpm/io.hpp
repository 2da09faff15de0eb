#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pcfbpm/grid.hpp"
#include "pcfbpm/modes.hpp"
#include "pcfbpm/vparam.hpp"

namespace pcf {

class FormatError : public Error {
 public:
  using Error::Error;
};

inline constexpr char kDumpMagic[4] = {'P', 'C', 'F', '1'};
inline constexpr std::uint32_t kDumpVersion = 1;
/// magic + version + nx + ny + four doubles.
inline constexpr std::size_t kDumpHeaderBytes = 4 + 3 * 4 + 4 * 8;

namespace detail {

template <class T>
void put_le(std::string& buf, T v) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = std::bit_cast<U>(v);
  for (std::size_t b = 0; b < sizeof(U); ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

template <class T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) bits |= static_cast<U>(p[b]) << (8 * b);
  return std::bit_cast<T>(bits);
}

}  // namespace detail

/// Canonical binary field dump. Little-endian regardless of host order.
inline std::string encode_field(const ComplexField2D& f) {
  if (f.values.size() != f.grid.size()) throw GridMismatch("field sample count does not match its grid");
  std::string buf;
  buf.reserve(kDumpHeaderBytes + 16 * f.size());
  buf.append(kDumpMagic, 4);
  detail::put_le<std::uint32_t>(buf, kDumpVersion);
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(f.grid.nx));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(f.grid.ny));
  for (double v : {f.grid.dx_um, f.grid.dy_um, f.grid.x0_um, f.grid.y0_um}) detail::put_le<double>(buf, v);
  for (const cplx& c : f.values) {
    detail::put_le<double>(buf, c.real());
    detail::put_le<double>(buf, c.imag());
  }
  return buf;
}

inline ComplexField2D decode_field(const std::string& bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 4 || std::memcmp(p, kDumpMagic, 4) != 0)
    throw FormatError("not a field dump: bad magic (expected PCF1)");
  if (bytes.size() < kDumpHeaderBytes)
    throw FormatError("truncated field dump: expected at least " + std::to_string(kDumpHeaderBytes) +
                      " header bytes, got " + std::to_string(bytes.size()));
  const auto version = detail::get_le<std::uint32_t>(p + 4);
  if (version != kDumpVersion)
    throw FormatError("unsupported field dump version " + std::to_string(version) + " (expected " +
                      std::to_string(kDumpVersion) + ")");
  const auto nx = detail::get_le<std::uint32_t>(p + 8);
  const auto ny = detail::get_le<std::uint32_t>(p + 12);
  Grid2D g;
  g.nx = static_cast<int>(nx);
  g.ny = static_cast<int>(ny);
  g.dx_um = detail::get_le<double>(p + 16);
  g.dy_um = detail::get_le<double>(p + 24);
  g.x0_um = detail::get_le<double>(p + 32);
  g.y0_um = detail::get_le<double>(p + 40);
  const std::size_t expected = kDumpHeaderBytes + 16 * static_cast<std::size_t>(nx) * ny;
  if (bytes.size() != expected)
    throw FormatError(std::string(bytes.size() < expected ? "truncated" : "oversized") + " field dump: expected " +
                      std::to_string(expected) + " bytes, got " + std::to_string(bytes.size()));
  ComplexField2D f;
  f.grid = g;
  f.values.resize(g.size());
  const unsigned char* q = p + kDumpHeaderBytes;
  for (std::size_t k = 0; k < f.values.size(); ++k, q += 16)
    f.values[k] = cplx(detail::get_le<double>(q), detail::get_le<double>(q + 8));
  return f;
}

inline void write_field_dump(const ComplexField2D& f, const std::filesystem::path& path) {
  const std::string buf = encode_field(f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("write failed for " + path.string());
}

inline ComplexField2D read_field_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_field(ss.str());
}

/// Text dump with columns x_um, y_um, re, im. Lossy beyond 17 significant
/// digits; the binary dump is the canonical format.
inline void write_field_csv(const ComplexField2D& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "x_um,y_um,re,im\n" << std::setprecision(17);
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) {
      const cplx c = f(i, j);
      out << f.grid.x(i) << ',' << f.grid.y(j) << ',' << c.real() << ',' << c.imag() << '\n';
    }
  if (!out) throw Error("write failed for " + path.string());
}

inline nlohmann::json modes_summary(const std::vector<ModeSolution>& modes, double lambda_um) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : modes) {
    nlohmann::json j{{"order", m.order},
                     {"n_eff", m.n_eff},
                     {"beta_per_um", m.beta_per_um},
                     {"residual", m.residual},
                     {"iterations", m.iterations},
                     {"converged", m.converged},
                     {"guided", m.guided},
                     {"polished", m.polished},
                     {"method", to_string(m.method)},
                     {"n_ref", m.n_ref}};
    if (m.beta_imag_per_um) j["beta_imag_per_um"] = *m.beta_imag_per_um;
    arr.push_back(std::move(j));
  }
  return nlohmann::json{{"lambda_um", lambda_um}, {"modes", std::move(arr)}};
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

/// Columns kind, d_over_pitch, abscissa, V, single_mode. Failed points carry
/// an empty V and single_mode. The abscissa convention is in the crossings
/// summary.
inline std::string sweep_csv(const std::vector<VCurve>& curves) {
  std::ostringstream out;
  out << "kind,d_over_pitch,abscissa,V,single_mode\n" << std::setprecision(12);
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      out << to_string(c.kind) << ',' << c.d_over_pitch << ',' << p.abscissa << ',';
      if (p.ok())
        out << p.V << ',' << (single_mode(p.V) ? 1 : 0);
      else
        out << ',';
      out << '\n';
    }
  return out.str();
}

inline nlohmann::json crossings_summary(const std::vector<VCurve>& curves) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : curves) {
    nlohmann::json j{{"kind", to_string(c.kind)},
                     {"abscissa", to_string(c.abscissa)},
                     {"d_over_pitch", c.d_over_pitch},
                     {"cutoff_V", kSingleModeCutoff}};
    if (c.crossing) {
      j["crosses"] = true;
      j["crossing"] = c.crossing->abscissa;
      j["uncertainty"] = c.crossing->uncertainty;
    } else {
      j["crosses"] = false;
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& p : c.points)
      if (!p.ok()) failures.push_back({{"abscissa", p.abscissa}, {"error", p.error}});
    if (!failures.empty()) j["failed_points"] = std::move(failures);
    arr.push_back(std::move(j));
  }
  return nlohmann::json{{"curves", std::move(arr)}};
}

}  // namespace pcf
