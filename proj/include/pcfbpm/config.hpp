#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "pcfbpm/bpm.hpp"
#include "pcfbpm/geometry.hpp"
#include "pcfbpm/modes.hpp"

namespace pcf {

enum class DInterpretation { Diameter, Radius };
enum class SolverKind { ImaginaryDistance, Correlation };

struct GeometrySection {
  double pitch_um = 2.3;
  /// Hole size as written by the user; see `interpretation`.
  double d_um = 0.6;
  DInterpretation interpretation = DInterpretation::Diameter;
  HoleShape hole_shape = HoleShape::Circular;
  int rings = 4;
  bool core_defect = true;
  double n_background = 1.45;
  double n_hole = 1.0;

  PcfGeometry resolve() const {
    PcfGeometry g;
    g.pitch_um = pitch_um;
    g.hole_diameter_um = interpretation == DInterpretation::Radius ? 2.0 * d_um : d_um;
    g.hole_shape = hole_shape;
    g.rings = rings;
    g.core_defect = core_defect;
    g.n_background = n_background;
    g.n_hole = n_hole;
    g.validate();
    return g;
  }
  bool operator==(const GeometrySection&) const = default;
};

struct GridSection {
  double dx_um = 0.1;
  double dy_um = 0.1;
  /// Silica margin between the outermost holes and the window edge.
  double margin_um = 2.0;
  int subsamples = 8;
  bool operator==(const GridSection&) const = default;
};

struct PropagationSection {
  double lambda_um = 1.55;
  /// Defaults to 0.1 um for real-axis runs and 0.5 um on the imaginary axis.
  std::optional<double> dz_um;
  std::optional<double> n_ref;
  int absorber_width_cells = 20;
  double absorber_strength = 0.02;
  /// Extra absorber outside the lattice. Its inner edge is the hexagon through
  /// the outermost hole centers, moved out by jacket_offset_um.
  bool jacket = true;
  double jacket_offset_um = 0.0;
  double jacket_ramp_um = 1.0;
  double jacket_strength = 0.1;
  bool operator==(const PropagationSection&) const = default;
};

struct SolverSection {
  SolverKind method = SolverKind::ImaginaryDistance;
  int n_modes = 1;
  double tol = 1e-12;
  long max_steps = 20000;
  LaunchKind launch = LaunchKind::Gaussian;
  double launch_x_um = 0.0;
  double launch_y_um = 0.0;
  double waist_um = 2.0;
  std::uint64_t seed = 20240917;
  long correlation_steps = 4000;
  int pad_factor = 4;
  bool imaginary_beta = false;
  bool polish = true;
  bool operator==(const SolverSection&) const = default;
};

struct OutputSection {
  std::string directory = "out";
  bool csv = false;
  /// Field snapshot every this many imaginary-distance steps; 0 disables.
  long snapshot_every = 0;
  bool operator==(const OutputSection&) const = default;
};

struct RunConfig {
  GeometrySection geometry;
  GridSection grid;
  PropagationSection propagation;
  SolverSection solver;
  OutputSection output;
  bool operator==(const RunConfig&) const = default;
};

namespace detail {

using boost::property_tree::ptree;

inline double parse_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& s) {
  Int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

template <class E>
E parse_enum(const std::string& key, const std::string& s, const std::map<std::string, E>& names) {
  const auto it = names.find(s);
  if (it != names.end()) return it->second;
  std::string allowed;
  for (const auto& [n, _] : names) allowed += (allowed.empty() ? "" : "|") + n;
  throw ConfigError(key + ": expected one of " + allowed + ", got '" + s + "'");
}

inline const std::map<std::string, DInterpretation>& d_names() {
  static const std::map<std::string, DInterpretation> m{{"diameter", DInterpretation::Diameter},
                                                        {"radius", DInterpretation::Radius}};
  return m;
}
inline const std::map<std::string, HoleShape>& shape_names() {
  static const std::map<std::string, HoleShape> m{{"circular", HoleShape::Circular}, {"square", HoleShape::Square}};
  return m;
}
inline const std::map<std::string, SolverKind>& method_names() {
  static const std::map<std::string, SolverKind> m{{"imaginary", SolverKind::ImaginaryDistance},
                                                   {"correlation", SolverKind::Correlation}};
  return m;
}
inline const std::map<std::string, LaunchKind>& launch_names() {
  static const std::map<std::string, LaunchKind> m{{"gaussian", LaunchKind::Gaussian},
                                                   {"planewave", LaunchKind::PlaneWave}};
  return m;
}

template <class E>
std::string enum_name(E v, const std::map<std::string, E>& names) {
  for (const auto& [n, e] : names)
    if (e == v) return n;
  return "?";
}

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

// Collects the keys of one section; finish() rejects any key that was never
// taken.
class SectionReader {
 public:
  SectionReader(const ptree& tree, std::string name) : name_(std::move(name)) {
    if (auto sec = tree.get_child_optional(name_)) {
      for (const auto& [k, v] : *sec) {
        if (!v.empty()) throw ConfigError("[" + name_ + "] " + k + ": nested values are not allowed");
        values_[k] = v.data();
      }
    }
  }

  std::optional<std::string> take(const std::string& key) {
    claimed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string qualified(const std::string& key) const { return "[" + name_ + "] " + key; }

  void finish() const {
    for (const auto& [k, _] : values_)
      if (!claimed_.count(k)) throw ConfigError("unknown key " + qualified(k));
  }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> claimed_;
};

}  // namespace detail

/// Parses the sectioned key=value run configuration. Missing keys keep their
/// defaults; unknown sections or keys are errors.
inline RunConfig parse_run_config(std::istream& in) {
  using namespace detail;
  ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  static const std::set<std::string> sections{"geometry", "grid", "propagation", "solver", "output"};
  for (const auto& [k, v] : tree) {
    if (v.empty()) throw ConfigError("key '" + k + "' must live inside a section");
    if (!sections.count(k)) throw ConfigError("unknown section [" + k + "]");
  }

  RunConfig c;
  auto num = [](SectionReader& r, const std::string& key, double& dst) {
    if (auto s = r.take(key)) dst = parse_double(r.qualified(key), *s);
  };
  auto integer = [](SectionReader& r, const std::string& key, auto& dst) {
    if (auto s = r.take(key)) dst = parse_int<std::remove_reference_t<decltype(dst)>>(r.qualified(key), *s);
  };
  auto flag = [](SectionReader& r, const std::string& key, bool& dst) {
    if (auto s = r.take(key)) dst = parse_bool(r.qualified(key), *s);
  };
  auto choice = [](SectionReader& r, const std::string& key, auto& dst, const auto& names) {
    if (auto s = r.take(key)) dst = parse_enum(r.qualified(key), *s, names);
  };

  {
    SectionReader r(tree, "geometry");
    auto& g = c.geometry;
    num(r, "pitch_um", g.pitch_um);
    num(r, "d_um", g.d_um);
    choice(r, "d_interpretation", g.interpretation, d_names());
    choice(r, "hole_shape", g.hole_shape, shape_names());
    integer(r, "rings", g.rings);
    flag(r, "core_defect", g.core_defect);
    num(r, "n_background", g.n_background);
    num(r, "n_hole", g.n_hole);
    r.finish();
  }
  {
    SectionReader r(tree, "grid");
    auto& g = c.grid;
    num(r, "dx_um", g.dx_um);
    num(r, "dy_um", g.dy_um);
    num(r, "margin_um", g.margin_um);
    integer(r, "subsamples", g.subsamples);
    r.finish();
  }
  {
    SectionReader r(tree, "propagation");
    auto& p = c.propagation;
    num(r, "lambda_um", p.lambda_um);
    if (auto s = r.take("dz_um")) p.dz_um = parse_double(r.qualified("dz_um"), *s);
    if (auto s = r.take("n_ref")) p.n_ref = parse_double(r.qualified("n_ref"), *s);
    integer(r, "absorber_width_cells", p.absorber_width_cells);
    num(r, "absorber_strength", p.absorber_strength);
    flag(r, "jacket", p.jacket);
    num(r, "jacket_offset_um", p.jacket_offset_um);
    num(r, "jacket_ramp_um", p.jacket_ramp_um);
    num(r, "jacket_strength", p.jacket_strength);
    r.finish();
  }
  {
    SectionReader r(tree, "solver");
    auto& s = c.solver;
    choice(r, "method", s.method, method_names());
    integer(r, "n_modes", s.n_modes);
    num(r, "tol", s.tol);
    integer(r, "max_steps", s.max_steps);
    choice(r, "launch", s.launch, launch_names());
    num(r, "launch_x_um", s.launch_x_um);
    num(r, "launch_y_um", s.launch_y_um);
    num(r, "waist_um", s.waist_um);
    integer(r, "seed", s.seed);
    integer(r, "correlation_steps", s.correlation_steps);
    integer(r, "pad_factor", s.pad_factor);
    flag(r, "imaginary_beta", s.imaginary_beta);
    flag(r, "polish", s.polish);
    r.finish();
  }
  {
    SectionReader r(tree, "output");
    auto& o = c.output;
    if (auto s = r.take("directory")) o.directory = *s;
    flag(r, "csv", o.csv);
    integer(r, "snapshot_every", o.snapshot_every);
    r.finish();
  }
  return c;
}

inline RunConfig parse_run_config(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse_run_config(in);
}

/// Serializes every key at full precision, so that parsing the result gives
/// back an equal RunConfig. `header` lines are emitted as comments.
inline std::string format_run_config(const RunConfig& c, const std::vector<std::string>& header = {}) {
  using namespace detail;
  std::ostringstream o;
  for (const auto& h : header) o << "# " << h << '\n';
  if (!header.empty()) o << '\n';
  const auto b = [](bool v) { return v ? "true" : "false"; };
  const auto& g = c.geometry;
  o << "[geometry]\n"
    << "pitch_um=" << fmt(g.pitch_um) << '\n'
    << "d_um=" << fmt(g.d_um) << '\n'
    << "d_interpretation=" << enum_name(g.interpretation, d_names()) << '\n'
    << "hole_shape=" << enum_name(g.hole_shape, shape_names()) << '\n'
    << "rings=" << g.rings << '\n'
    << "core_defect=" << b(g.core_defect) << '\n'
    << "n_background=" << fmt(g.n_background) << '\n'
    << "n_hole=" << fmt(g.n_hole) << "\n\n";
  const auto& gr = c.grid;
  o << "[grid]\n"
    << "dx_um=" << fmt(gr.dx_um) << '\n'
    << "dy_um=" << fmt(gr.dy_um) << '\n'
    << "margin_um=" << fmt(gr.margin_um) << '\n'
    << "subsamples=" << gr.subsamples << "\n\n";
  const auto& p = c.propagation;
  o << "[propagation]\n"
    << "lambda_um=" << fmt(p.lambda_um) << '\n';
  if (p.dz_um) o << "dz_um=" << fmt(*p.dz_um) << '\n';
  if (p.n_ref) o << "n_ref=" << fmt(*p.n_ref) << '\n';
  o << "absorber_width_cells=" << p.absorber_width_cells << '\n'
    << "absorber_strength=" << fmt(p.absorber_strength) << '\n'
    << "jacket=" << b(p.jacket) << '\n'
    << "jacket_offset_um=" << fmt(p.jacket_offset_um) << '\n'
    << "jacket_ramp_um=" << fmt(p.jacket_ramp_um) << '\n'
    << "jacket_strength=" << fmt(p.jacket_strength) << "\n\n";
  const auto& s = c.solver;
  o << "[solver]\n"
    << "method=" << enum_name(s.method, method_names()) << '\n'
    << "n_modes=" << s.n_modes << '\n'
    << "tol=" << fmt(s.tol) << '\n'
    << "max_steps=" << s.max_steps << '\n'
    << "launch=" << enum_name(s.launch, launch_names()) << '\n'
    << "launch_x_um=" << fmt(s.launch_x_um) << '\n'
    << "launch_y_um=" << fmt(s.launch_y_um) << '\n'
    << "waist_um=" << fmt(s.waist_um) << '\n'
    << "seed=" << s.seed << '\n'
    << "correlation_steps=" << s.correlation_steps << '\n'
    << "pad_factor=" << s.pad_factor << '\n'
    << "imaginary_beta=" << b(s.imaginary_beta) << '\n'
    << "polish=" << b(s.polish) << "\n\n";
  const auto& out = c.output;
  o << "[output]\n"
    << "directory=" << out.directory << '\n'
    << "csv=" << b(out.csv) << '\n'
    << "snapshot_every=" << out.snapshot_every << '\n';
  return o.str();
}

inline double default_dz_um(SolverKind method) { return method == SolverKind::ImaginaryDistance ? 0.5 : 0.1; }

/// The configuration with every method-dependent default written out.
inline RunConfig resolved_config(RunConfig c) {
  if (!c.propagation.dz_um) c.propagation.dz_um = default_dz_um(c.solver.method);
  return c;
}

/// Everything a solve needs, checked before any propagation starts.
struct ResolvedRun {
  PcfGeometry geometry;
  Grid2D grid;
  IndexProfile profile;
  PropagationConfig propagation;
};

inline ResolvedRun resolve_run(const RunConfig& c) {
  ResolvedRun r;
  r.geometry = c.geometry.resolve();
  if (c.grid.margin_um < 0.0) throw ConfigError("[grid] margin_um must be non-negative");
  r.grid = window_for(r.geometry, c.grid.dx_um, c.grid.dy_um, c.grid.margin_um);
  r.profile = rasterize_geometry(r.geometry, r.grid, c.grid.subsamples);

  const auto& p = c.propagation;
  r.propagation.lambda_um = p.lambda_um;
  r.propagation.dz_um = p.dz_um.value_or(default_dz_um(c.solver.method));
  r.propagation.n_ref = p.n_ref;
  r.propagation.boundary.width_cells = p.absorber_width_cells;
  r.propagation.boundary.strength = p.absorber_strength;
  r.propagation.boundary.jacket_ramp_um = p.jacket_ramp_um;
  r.propagation.boundary.jacket_strength = p.jacket_strength;
  if (p.jacket) {
    r.propagation.boundary.jacket_radius_um = r.geometry.rings * r.geometry.pitch_um + p.jacket_offset_um;
    if (!(r.propagation.boundary.jacket_radius_um > 0.0)) throw ConfigError("[propagation] jacket radius must be positive");
  }

  const auto& s = c.solver;
  if (s.n_modes < 1) throw ConfigError("[solver] n_modes must be >= 1");
  if (!(s.tol > 0.0)) throw ConfigError("[solver] tol must be positive");
  if (s.max_steps < 1) throw ConfigError("[solver] max_steps must be >= 1");
  if (s.correlation_steps < 4) throw ConfigError("[solver] correlation_steps must be >= 4");
  if (s.pad_factor < 1) throw ConfigError("[solver] pad_factor must be >= 1");
  if (c.output.snapshot_every < 0) throw ConfigError("[output] snapshot_every must be >= 0");
  if (c.output.directory.empty()) throw ConfigError("[output] directory must not be empty");

  // Constructing a stepper runs every propagation-level check.
  PropagationConfig probe = r.propagation;
  probe.axis = s.method == SolverKind::ImaginaryDistance ? Axis::ImaginaryDistance : Axis::RealDistance;
  Stepper check(r.profile, probe);
  make_launch_field(LaunchSpec{s.launch, s.launch_x_um, s.launch_y_um, s.waist_um}, r.grid);
  return r;
}

}  // namespace pcf
