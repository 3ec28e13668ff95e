#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "zaremba/bie.hpp"
#include "zaremba/field.hpp"
#include "zaremba/geometry.hpp"
#include "zaremba/specfun.hpp"
#include "zaremba/spectral.hpp"

// Property battery shared by the `validate` CLI subcommand and the test
// suite: cross-module invariants that certify the numerics end to end.

namespace zaremba::validate {

using bie::cplx;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct Check {
  std::string name;
  bool pass;
  std::string detail;  // measured quantity vs tolerance
};

namespace detail {

inline Check make(const std::string& name, double measured, double tol) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << "measured " << measured << " vs tol " << tol;
  return {name, measured <= tol, os.str()};
}

}  // namespace detail

// Wronskian identity J_0(x) Y_0'(x) - J_0'(x) Y_0(x) = 2/(pi x) on a fixed
// deterministic sample of (0.1, 50), using J_0' = -J_1 and Y_0' = -Y_1.
inline Check check_wronskian() {
  std::mt19937 rng(20240613);
  std::uniform_real_distribution<double> uni(0.1, 50.0);
  double worst = 0.0;
  auto probe = [&](double x) {
    const double w = specfun::bessel_j(0, x) * (-specfun::bessel_y(1, x)) -
                     (-specfun::bessel_j(1, x)) * specfun::bessel_y(0, x);
    worst = std::max(worst, std::abs(w - 2.0 / (std::numbers::pi * x)));
  };
  for (double x : {0.5, 5.0, 25.0}) probe(x);
  for (int i = 0; i < 100; ++i) probe(uni(rng));
  return detail::make("wronskian", worst, 1e-10);
}

// Arclength inversion round-trip s -> tau -> s on the disk and the kite.
inline Check check_arclength_roundtrip() {
  std::mt19937 rng(8877);
  double worst = 0.0;
  for (const CurvePtr& curve : {make_disk(1.0), make_kite()}) {
    std::uniform_real_distribution<double> uni(0.0, curve->total_arclength());
    for (int i = 0; i < 200; ++i) {
      const double s = uni(rng);
      worst = std::max(worst, std::abs(curve->arclength(curve->tau_of_arclength(s)) - s));
    }
  }
  return detail::make("arclength_roundtrip", worst, 1e-10);
}

// Jump relation of the single-layer potential on the unit disk: for the
// density cos(tau), separation of variables gives the interior trace
//   dS/dnu |_in = (i pi k / 2) J_1'(k) H_1(k) cos(tau),
// and the exterior trace differs from it by exactly the density (Wronskian
// of J_1, Y_1).  The computed trace must match the interior value, which
// certifies both the quadrature and the sign of the 1/2 jump.
inline Check check_jump_relation(int nodes_per_arc) {
  const auto disk = make_disk(1.0);
  const auto mesh = bie::build_mesh(Partition::pure_dirichlet(disk), nodes_per_arc);
  const cplx k(1.0);
  const int n = mesh->size();
  bie::Density psi;
  psi.psi.resize(n);
  for (int i = 0; i < n; ++i) psi.psi(i) = std::cos(mesh->nodes()[i].tau);
  const VectorXcd interior = bie::eval_trace_dn(psi, *mesh, k);

  const cplx j1p = specfun::bessel_j(0, k) - specfun::bessel_j(1, k) / k;
  const cplx h1 = specfun::hankel1(1, k);
  const cplx coeff = cplx(0.0, std::numbers::pi / 2.0) * k * j1p * h1;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx exact = coeff * std::cos(mesh->nodes()[i].tau);
    worst = std::max(worst, std::abs(interior(i) - exact));
    // Interior minus exterior recovers the density (the jump itself).
    const cplx exterior = exact - psi.psi(i);
    worst = std::max(worst, std::abs((interior(i) - exterior) - psi.psi(i)));
  }
  return detail::make("jump_relation", worst, 1e-8);
}

// Green's reciprocity of the Zaremba function on a mixed disk partition.
inline Check check_reciprocity(int nodes_per_arc) {
  const auto disk = make_disk(1.0);
  const auto p = Partition::pure_dirichlet(disk).with_arc(std::numbers::pi / 2.0, 0.3);
  const Vec2 a(0.0, 0.0), b(0.3, 0.4);
  field::FieldOptions fo;
  fo.nodes_per_arc = nodes_per_arc;
  const double zab = field::solve_field(1.0, p, PointInDomain(*disk, a), fo).eval(b);
  const double zba = field::solve_field(1.0, p, PointInDomain(*disk, b), fo).eval(a);
  return detail::make("reciprocity", std::abs(zab - zba), 1e-6);
}

// Boundary conditions of a mixed-partition Zaremba field: the Dirichlet
// trace of Z vanishes on Dirichlet nodes and its normal derivative vanishes
// on Neumann nodes.
inline Check check_boundary_residuals(int nodes_per_arc) {
  const auto disk = make_disk(1.0);
  const auto p = Partition::pure_dirichlet(disk).with_arc(std::numbers::pi / 2.0, 0.3);
  field::FieldOptions fo;
  fo.nodes_per_arc = nodes_per_arc;
  const auto field = field::solve_field(1.0, p, PointInDomain(*disk, Vec2(0.0, 0.0)), fo);
  const auto& mesh = *field.mesh();
  const VectorXcd trace =
      bie::eval_trace_s(field.density(), mesh, cplx(field.k()));
  const VectorXd& dn = field.dn_boundary();
  double worst = 0.0;
  for (int i = 0; i < mesh.size(); ++i) {
    const auto& node = mesh.nodes()[i];
    if (node.bc == BcType::kDirichlet) {
      const cplx z = -bie::fundamental_solution(cplx(field.k()), field.source(), node.x) +
                     trace(i);
      worst = std::max(worst, std::abs(z));
    } else {
      worst = std::max(worst, std::abs(dn(i)));
    }
  }
  return detail::make("boundary_residuals", worst, 1e-6);
}

// Contour-winding consistency: for randomized ellipses on the real axis the
// rounded winding number of tr A^-1 A' equals the number of refined
// sigma_min characteristic values inside.
inline Check check_winding_consistency(int nodes_per_arc) {
  const auto disk = make_disk(1.0);
  const auto p = Partition::pure_dirichlet(disk).with_arc(std::numbers::pi / 2.0, 0.2);
  // Census on the scan-grade 64-node mesh: the characteristic values there
  // are converged far below the 0.02 rejection margin, and on finer meshes
  // the junction-weight sigma floor can mask shallow dips from the 0.01
  // scan grid (the winding integral still sees them, which is the point of
  // this check).
  spectral::ScanOptions so;
  so.nodes_per_arc = 64;
  const auto found = spectral::sigma_min_scan(p, 1.0, 4.5, 0.01, so);
  spectral::UpdateOptions uo;
  uo.nodes_per_arc = nodes_per_arc;

  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> cdist(1.2, 4.3), adist(0.05, 0.35);
  int tested = 0, failures = 0;
  while (tested < 20) {
    const double center = cdist(rng), a = adist(rng);
    // Reject contours passing too close to a characteristic value.
    bool safe = true;
    int inside = 0;
    for (const auto& cv : found) {
      const double d = std::abs(cv.k - center);
      if (std::abs(d - a) < 0.02) safe = false;
      if (d < a) ++inside;
    }
    if (!safe || center - a < 1.05) continue;
    ++tested;
    const spectral::EllipseContour contour(cplx(center), a, 0.1 * a);
    if (spectral::contour_winding(p, contour, uo) != inside) ++failures;
  }
  return detail::make("winding_consistency", static_cast<double>(failures), 0.0);
}

// Runs the whole battery at the given resolution (N = 2 * nodes_per_arc on
// the one-arc partitions used above).
inline std::vector<Check> run_all(int nodes_per_arc = 64) {
  return {check_wronskian(),
          check_arclength_roundtrip(),
          check_jump_relation(nodes_per_arc),
          check_reciprocity(nodes_per_arc),
          check_boundary_residuals(nodes_per_arc),
          check_winding_consistency(nodes_per_arc)};
}

}  // namespace zaremba::validate
