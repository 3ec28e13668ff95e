// Command-line entry point: eigenvalue scans, field grids, point
// evaluation of the mixed-boundary Green's function, the boundary-partition
// optimizer, and the property-validation suite.  Every subcommand reads a
// flat key=value config file and writes delimited-text results under the
// config's output_dir.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
// The environment variable ZAREMBA_THREADS overrides the worker thread
// count used for scan grids and grid-point evaluations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zaremba/config.hpp"
#include "zaremba/field.hpp"
#include "zaremba/geometry.hpp"
#include "zaremba/io.hpp"
#include "zaremba/optimize.hpp"
#include "zaremba/parallel.hpp"
#include "zaremba/spectral.hpp"
#include "zaremba/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

zaremba::config::RunConfig load_config(const std::string& path,
                                       const std::string& expected_command) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto parsed = zaremba::config::parse(buf.str());
  if (!parsed.config) {
    std::string msg = "invalid config " + path + ":";
    for (const auto& v : parsed.violations) msg += "\n  - " + v;
    throw ConfigError(msg);
  }
  if (parsed.config->command != expected_command)
    throw ConfigError("config file " + path + " declares command '" +
                      parsed.config->command + "' but subcommand '" +
                      expected_command + "' was invoked");
  return *parsed.config;
}

zaremba::CurvePtr build_curve(const zaremba::config::RunConfig& c) {
  if (c.curve != "custom") return zaremba::make_curve_by_name(c.curve);
  zaremba::detail::TrigSeries x, y;
  x.c0 = c.curve_x_c0;
  x.a = c.curve_x_cos;
  x.b = c.curve_x_sin;
  y.c0 = c.curve_y_c0;
  y.a = c.curve_y_cos;
  y.b = c.curve_y_sin;
  return std::make_shared<zaremba::Curve>(std::move(x), std::move(y), "custom");
}

zaremba::Partition build_partition(const zaremba::config::RunConfig& c) {
  auto curve = build_curve(c);
  zaremba::Partition p = zaremba::Partition::pure_dirichlet(curve);
  for (std::size_t i = 0; i < c.arc_centers.size(); ++i)
    p = p.with_arc(c.arc_centers[i], c.arc_half_lengths[i]);
  return p;
}

std::string output_path(const zaremba::config::RunConfig& c, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(c.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + c.output_dir + ": " +
                        ec.message());
  return (std::filesystem::path(c.output_dir) / name).string();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(16);
  os << v;
  return os.str();
}

int run_eig_scan(const zaremba::config::RunConfig& c) {
  const zaremba::Partition partition = build_partition(c);
  zaremba::spectral::ScanOptions opts;
  opts.nodes_per_arc = c.nodes_per_arc;

  // Raw (k, sigma_min) samples over the scan grid, for plotting.
  auto mesh = zaremba::bie::build_mesh(partition, opts.nodes_per_arc, opts.mesh);
  const int n = static_cast<int>(std::ceil((c.k_hi - c.k_lo) / c.grid_step)) + 1;
  std::vector<std::vector<double>> samples(n);
  zaremba::parallel::parallel_for(n, [&](int i) {
    const double k = std::min(c.k_lo + i * c.grid_step, c.k_hi);
    samples[i] = {k, zaremba::spectral::detail::sigma_at(*mesh, k)};
  });
  zaremba::io::emit_table({"k", "sigma_min"}, samples,
                          output_path(c, "scan_samples.csv"));

  const auto chars =
      zaremba::spectral::sigma_min_scan(partition, c.k_lo, c.k_hi, c.grid_step, opts);
  std::vector<std::vector<double>> rows;
  for (const auto& cv : chars)
    rows.push_back({cv.k, static_cast<double>(cv.multiplicity), cv.sigma_min,
                    static_cast<double>(cv.node_count)});
  zaremba::io::emit_table({"k", "multiplicity", "sigma_min", "node_count"}, rows,
                          output_path(c, "char_values.csv"));

  for (const auto& cv : chars)
    std::cout << "char_value k=" << fmt(cv.k) << " multiplicity=" << cv.multiplicity
              << " sigma_min=" << fmt(cv.sigma_min) << '\n';
  std::cout << chars.size() << " characteristic value(s) in [" << c.k_lo << ", "
            << c.k_hi << "]\n";
  return kExitOk;
}

int run_field_grid(const zaremba::config::RunConfig& c) {
  const zaremba::Partition partition = build_partition(c);
  const auto& curve = *partition.curve();
  const zaremba::PointInDomain source(curve, {c.source_x, c.source_y});

  zaremba::field::FieldOptions fo;
  fo.nodes_per_arc = c.nodes_per_arc;
  const zaremba::field::ZarembaField field =
      zaremba::field::solve_field(c.k, partition, source, fo);

  // Bounding box of the boundary; points outside the domain or inside the
  // evaluation floor are masked (emitted with zero value).
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (int i = 0; i < 2048; ++i) {
    const zaremba::Vec2 p = curve.point(zaremba::two_pi * i / 2048.0);
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  const double floor =
      fo.floor_spacings * curve.total_arclength() / field.mesh()->size();

  const int m = c.grid_resolution;
  std::vector<zaremba::io::GridSample> samples(m * m);
  zaremba::parallel::parallel_for(m * m, [&](int idx) {
    const int i = idx / m, j = idx % m;
    zaremba::io::GridSample& s = samples[idx];
    s.x = x0 + (x1 - x0) * j / (m - 1);
    s.y = y0 + (y1 - y0) * i / (m - 1);
    const zaremba::Vec2 p{s.x, s.y};
    s.interior = curve.contains(p) && curve.boundary_distance(p) >= floor &&
                 (p - field.source()).norm() > 1e-12;
    if (s.interior) {
      const auto z = field.eval_complex(p);
      s.re = z.real();
      s.im = z.imag();
    }
  });
  zaremba::io::emit_grid(samples, output_path(c, "grid.csv"));

  int interior = 0;
  for (const auto& s : samples) interior += s.interior ? 1 : 0;
  std::cout << "field grid " << m << "x" << m << " at k=" << c.k << ": " << interior
            << " interior points\n";
  return kExitOk;
}

int run_zaremba_eval(const zaremba::config::RunConfig& c) {
  const zaremba::Partition partition = build_partition(c);
  const auto& curve = *partition.curve();
  const zaremba::PointInDomain source(curve, {c.source_x, c.source_y});
  const zaremba::Vec2 receiver{c.receiver_x, c.receiver_y};
  if (!curve.contains(receiver)) throw ConfigError("receiver is not inside the domain");

  zaremba::field::FieldOptions fo;
  fo.nodes_per_arc = c.nodes_per_arc;
  const auto z = zaremba::field::solve_field(c.k, partition, source, fo)
                     .eval_complex(receiver);
  zaremba::io::emit_table({"k", "re_z", "im_z"}, {{c.k, z.real(), z.imag()}},
                          output_path(c, "zaremba_eval.csv"));
  std::cout << "Z(x_S, y) = " << fmt(z.real()) << "  (imag " << fmt(z.imag())
            << ", cancellation diagnostic)\n";
  return kExitOk;
}

int run_optimize(const zaremba::config::RunConfig& c) {
  zaremba::optimize::OptimizeConfig oc;
  oc.curve = build_curve(c);
  oc.x_s = {c.source_x, c.source_y};
  oc.y = {c.receiver_x, c.receiver_y};
  oc.k_star = c.k_star;
  oc.c_tol = c.c_tol;
  oc.eps0 = c.eps0;
  oc.nodes_per_arc = c.nodes_per_arc;
  oc.validate();

  const zaremba::optimize::OptimizeTrace trace = zaremba::optimize::run(oc);

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    const auto& it = trace.iterations[i];
    rows.push_back({static_cast<double>(i), it.growth ? 1.0 : 0.0, it.eps, it.k,
                    it.method == zaremba::optimize::UpdateMethod::kFast ? 1.0 : 0.0,
                    it.restored ? 1.0 : 0.0, it.partition.neumann_length()});
  }
  zaremba::io::emit_table(
      {"iter", "growth", "eps", "k", "fast_update", "restored", "neumann_length"},
      rows, output_path(c, "iterations.csv"));

  std::ostringstream report;
  report << "target k_star        = " << fmt(c.k_star) << '\n'
         << "initial char value   = " << fmt(trace.k_initial) << '\n'
         << "final char value     = " << fmt(trace.k_final) << '\n'
         << "Z_Dirichlet          = " << fmt(trace.z_dirichlet) << '\n'
         << "Z_End                = " << fmt(trace.z_end) << '\n'
         << "gain |Z_End/Z_D|     = " << fmt(trace.gain) << '\n'
         << "arc center angle     = " << fmt(trace.theta_center) << " rad\n"
         << "Neumann arclength    = " << fmt(trace.l_n) << '\n'
         << "iterations           = " << trace.iterations.size() << '\n'
         << "success              = " << (trace.success ? "yes" : "no") << '\n';
  if (!trace.success) report << "failure              = " << trace.failure << '\n';
  if (trace.final_partition) {
    for (const auto& a : trace.final_partition->neumann_arcs()) {
      const zaremba::Vec2 ctr =
          oc.curve->point(oc.curve->tau_of_arclength(a.center_s));
      report << "neumann arc: center_s = " << fmt(a.center_s) << "  center = ("
             << fmt(ctr.x()) << ", " << fmt(ctr.y()) << ")  length = "
             << fmt(a.length()) << '\n';
    }
  }
  {
    const std::string path = output_path(c, "report.txt");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << report.str();
    if (!out) throw IoError("write failed: " + path);
  }
  std::cout << report.str();
  if (!trace.success) {
    std::cerr << "optimize failed: " << trace.failure << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int run_validate(int nodes_per_arc) {
  const auto checks = zaremba::validate::run_all(nodes_per_arc);
  bool all = true;
  for (const auto& ch : checks) {
    std::cout << (ch.pass ? "PASS" : "FAIL") << "  " << ch.name << "  " << ch.detail
              << '\n';
    all = all && ch.pass;
  }
  std::cout << (all ? "validate: all checks passed\n" : "validate: FAILURES\n");
  return all ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "2D Helmholtz boundary-integral toolkit: mixed Dirichlet/Neumann "
      "eigenvalue scans, Green's-function evaluation, and boundary-partition "
      "optimization.\n"
      "Set ZAREMBA_THREADS to override the worker thread count."};
  app.require_subcommand(1);

  std::string config_path;
  int validate_nodes = 64;

  auto* eig = app.add_subcommand("eig-scan",
                                 "Scan sigma_min(A(k)) over [k_lo, k_hi] and refine "
                                 "characteristic values");
  eig->add_option("config", config_path, "key=value config file")->required();
  auto* grid = app.add_subcommand("field-grid",
                                  "Evaluate Z(x_S, .) on a rectangular grid masked "
                                  "to the interior");
  grid->add_option("config", config_path, "key=value config file")->required();
  auto* zev = app.add_subcommand("zaremba-eval",
                                 "Evaluate Z(x_S, y) at a single receiver point");
  zev->add_option("config", config_path, "key=value config file")->required();
  auto* opt = app.add_subcommand("optimize",
                                 "Grow a Neumann arc to drag an eigenvalue onto "
                                 "k_star and maximize transmission");
  opt->add_option("config", config_path, "key=value config file")->required();
  auto* val = app.add_subcommand("validate",
                                 "Run the full property suite (jump relations, "
                                 "reciprocity, residuals, round-trips, Wronskians, "
                                 "winding consistency)");
  val->add_option("config", config_path,
                  "optional config file (nodes_per_arc is honored)");
  val->add_option("--nodes-per-arc", validate_nodes,
                  "quadrature nodes per boundary piece")
      ->check(CLI::Range(8, 4096));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (eig->parsed()) return run_eig_scan(load_config(config_path, "eig-scan"));
    if (grid->parsed()) return run_field_grid(load_config(config_path, "field-grid"));
    if (zev->parsed())
      return run_zaremba_eval(load_config(config_path, "zaremba-eval"));
    if (opt->parsed()) return run_optimize(load_config(config_path, "optimize"));
    if (val->parsed()) {
      if (!config_path.empty())
        validate_nodes = load_config(config_path, "validate").nodes_per_arc;
      return run_validate(validate_nodes);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const zaremba::bie::NearResonance& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const zaremba::spectral::NotInContour& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const zaremba::spectral::WindingError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
