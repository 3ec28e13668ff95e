#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

// Flat key=value run configuration for the command-line tool: typed scalars
// and numeric arrays, validation that reports every violation at once
// (not fail-fast), and an emitter whose output parses back to an equal
// config.

namespace zaremba::config {

// Everything a single CLI run needs.  Unused fields keep their defaults;
// which fields matter depends on `command`.
struct RunConfig {
  std::string command;  // eig-scan | field-grid | zaremba-eval | optimize | validate

  // Geometry: a named curve, or "custom" with trigonometric coefficients
  //   x(t) = curve_x_c0 + sum curve_x_cos[m-1] cos(mt) + curve_x_sin[m-1] sin(mt)
  // and likewise for y.
  std::string curve = "disk";
  double curve_x_c0 = 0.0, curve_y_c0 = 0.0;
  std::vector<double> curve_x_cos, curve_x_sin, curve_y_cos, curve_y_sin;

  // Partition: parallel arrays of Neumann arc centers (arclength) and
  // half-lengths.  Empty means pure Dirichlet.
  std::vector<double> arc_centers, arc_half_lengths;

  // Numeric parameters.
  double k = 1.0;                 // wavenumber (field-grid, zaremba-eval)
  double k_lo = 1.0, k_hi = 2.0;  // scan interval (eig-scan)
  double k_star = 1.0;            // target (optimize)
  double c_tol = 1e-3;
  double eps0 = 0.1;
  int nodes_per_arc = 64;
  double grid_step = 0.01;    // sigma_min scan step
  int grid_resolution = 64;   // field-grid samples per axis
  double source_x = 0.0, source_y = 0.0;
  double receiver_x = 0.0, receiver_y = 0.5;

  std::string output_dir = ".";

  bool operator==(const RunConfig&) const = default;
};

struct ParseResult {
  std::optional<RunConfig> config;  // engaged iff violations is empty
  std::vector<std::string> violations;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline bool parse_double(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end && std::isfinite(out);
}

inline bool parse_int(const std::string& s, int& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

inline bool parse_array(const std::string& s, std::vector<double>& out) {
  out.clear();
  if (trim(s).empty()) return true;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!parse_double(trim(item), v)) return false;
    out.push_back(v);
  }
  return true;
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string format_array(const std::vector<double>& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ',';
    s += format_double(a[i]);
  }
  return s;
}

}  // namespace detail

// Parses a flat key=value document ('#' starts a comment, blank lines
// ignored).  Returns either a validated config or the full list of
// violations; unknown keys are rejected to catch typos.
inline ParseResult parse(const std::string& text) {
  RunConfig c;
  std::vector<std::string> bad;

  std::map<std::string, double*> doubles = {
      {"curve_x_c0", &c.curve_x_c0},   {"curve_y_c0", &c.curve_y_c0},
      {"k", &c.k},                     {"k_lo", &c.k_lo},
      {"k_hi", &c.k_hi},               {"k_star", &c.k_star},
      {"c_tol", &c.c_tol},             {"eps0", &c.eps0},
      {"grid_step", &c.grid_step},     {"source_x", &c.source_x},
      {"source_y", &c.source_y},       {"receiver_x", &c.receiver_x},
      {"receiver_y", &c.receiver_y}};
  std::map<std::string, int*> ints = {{"nodes_per_arc", &c.nodes_per_arc},
                                      {"grid_resolution", &c.grid_resolution}};
  std::map<std::string, std::string*> strings = {
      {"command", &c.command}, {"curve", &c.curve}, {"output_dir", &c.output_dir}};
  std::map<std::string, std::vector<double>*> arrays = {
      {"curve_x_cos", &c.curve_x_cos}, {"curve_x_sin", &c.curve_x_sin},
      {"curve_y_cos", &c.curve_y_cos}, {"curve_y_sin", &c.curve_y_sin},
      {"arc_centers", &c.arc_centers}, {"arc_half_lengths", &c.arc_half_lengths}};

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      bad.push_back("line " + std::to_string(lineno) + ": expected key=value");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (auto it = doubles.find(key); it != doubles.end()) {
      if (!detail::parse_double(val, *it->second))
        bad.push_back(key + ": not a finite number: '" + val + "'");
    } else if (auto it = ints.find(key); it != ints.end()) {
      if (!detail::parse_int(val, *it->second))
        bad.push_back(key + ": not an integer: '" + val + "'");
    } else if (auto it = strings.find(key); it != strings.end()) {
      *it->second = val;
    } else if (auto it = arrays.find(key); it != arrays.end()) {
      if (!detail::parse_array(val, *it->second))
        bad.push_back(key + ": not a comma-separated number list: '" + val + "'");
    } else {
      bad.push_back("unknown key: '" + key + "'");
    }
  }

  // Range validation; every violation is itemized.
  static const std::vector<std::string> commands = {
      "eig-scan", "field-grid", "zaremba-eval", "optimize", "validate"};
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end())
    bad.push_back("command: must be one of eig-scan, field-grid, zaremba-eval, "
                  "optimize, validate (got '" + c.command + "')");
  if (c.curve != "disk" && c.curve != "kite" && c.curve != "custom")
    bad.push_back("curve: must be disk, kite, or custom (got '" + c.curve + "')");
  if (c.curve == "custom" && c.curve_x_cos.empty() && c.curve_x_sin.empty() &&
      c.curve_y_cos.empty() && c.curve_y_sin.empty())
    bad.push_back("curve: custom requires trigonometric coefficients");
  if (c.arc_centers.size() != c.arc_half_lengths.size())
    bad.push_back("arc_centers and arc_half_lengths: lengths differ");
  for (double h : c.arc_half_lengths)
    if (h <= 0.0) bad.push_back("arc_half_lengths: entries must be positive");
  if (c.k <= 0.0) bad.push_back("k: must be positive");
  if (c.k_star <= 0.0) bad.push_back("k_star: must be positive");
  if (c.k_lo <= 0.0 || c.k_hi <= c.k_lo)
    bad.push_back("k_lo/k_hi: need 0 < k_lo < k_hi");
  if (c.c_tol <= 0.0) bad.push_back("c_tol: must be positive");
  if (c.eps0 <= 0.0) bad.push_back("eps0: must be positive");
  if (c.nodes_per_arc < 8) bad.push_back("nodes_per_arc: must be >= 8");
  if (c.grid_step <= 0.0) bad.push_back("grid_step: must be positive");
  if (c.grid_resolution < 2) bad.push_back("grid_resolution: must be >= 2");

  ParseResult r;
  r.violations = std::move(bad);
  if (r.violations.empty()) r.config = std::move(c);
  return r;
}

// Emits a document that parse() maps back to an equal config.
inline std::string emit(const RunConfig& c) {
  std::ostringstream os;
  os << "command = " << c.command << '\n';
  os << "curve = " << c.curve << '\n';
  os << "curve_x_c0 = " << detail::format_double(c.curve_x_c0) << '\n';
  os << "curve_y_c0 = " << detail::format_double(c.curve_y_c0) << '\n';
  os << "curve_x_cos = " << detail::format_array(c.curve_x_cos) << '\n';
  os << "curve_x_sin = " << detail::format_array(c.curve_x_sin) << '\n';
  os << "curve_y_cos = " << detail::format_array(c.curve_y_cos) << '\n';
  os << "curve_y_sin = " << detail::format_array(c.curve_y_sin) << '\n';
  os << "arc_centers = " << detail::format_array(c.arc_centers) << '\n';
  os << "arc_half_lengths = " << detail::format_array(c.arc_half_lengths) << '\n';
  os << "k = " << detail::format_double(c.k) << '\n';
  os << "k_lo = " << detail::format_double(c.k_lo) << '\n';
  os << "k_hi = " << detail::format_double(c.k_hi) << '\n';
  os << "k_star = " << detail::format_double(c.k_star) << '\n';
  os << "c_tol = " << detail::format_double(c.c_tol) << '\n';
  os << "eps0 = " << detail::format_double(c.eps0) << '\n';
  os << "nodes_per_arc = " << c.nodes_per_arc << '\n';
  os << "grid_step = " << detail::format_double(c.grid_step) << '\n';
  os << "grid_resolution = " << c.grid_resolution << '\n';
  os << "source_x = " << detail::format_double(c.source_x) << '\n';
  os << "source_y = " << detail::format_double(c.source_y) << '\n';
  os << "receiver_x = " << detail::format_double(c.receiver_x) << '\n';
  os << "receiver_y = " << detail::format_double(c.receiver_y) << '\n';
  os << "output_dir = " << c.output_dir << '\n';
  return os.str();
}

}  // namespace zaremba::config
