#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "zaremba/bie.hpp"

using namespace zaremba;
using bie::cplx;

// Platform Hankel oracle (the library's own Bessel code is tested
// separately in the specfun suite).
static cplx ref_h(int n, double x) {
  return {std::cyl_bessel_j(n, x), std::cyl_neumann(n, x)};
}

TEST_CASE("fundamental solution is the outgoing Hankel kernel") {
  const Vec2 x{0.2, -0.1}, y{1.3, 0.8};
  const double k = 2.7, r = (x - y).norm();
  const cplx expected = cplx(0.0, 0.25) * ref_h(0, k * r);
  const cplx got = bie::fundamental_solution(cplx(k), x, y);
  CHECK(std::abs(got - expected) < 1e-12);
  CHECK_THROWS_AS(bie::fundamental_solution(cplx(k), x, x), std::invalid_argument);
}

TEST_CASE("single layer solves the Helmholtz equation in the interior") {
  // Arbitrary smooth density on the kite; check (Laplacian + k^2) S = 0 at
  // an interior point with a 5-point finite-difference Laplacian.
  auto kite = make_kite();
  auto mesh = bie::build_mesh(Partition::pure_dirichlet(kite), 256);
  const int n = mesh->size();
  bie::Density d;
  d.psi.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = mesh->nodes()[i].tau;
    d.psi(i) = cplx(std::cos(t) + 0.3 * std::sin(2 * t), 0.2 * std::cos(3 * t));
  }
  const double k = 2.0, fd = 1e-4;
  const Vec2 p{-0.4, 0.1};
  auto S = [&](const Vec2& x) { return bie::eval_single_layer(d, *mesh, cplx(k), x); };
  const cplx lap = (S({p.x() + fd, p.y()}) + S({p.x() - fd, p.y()}) +
                    S({p.x(), p.y() + fd}) + S({p.x(), p.y() - fd}) - 4.0 * S(p)) /
                   (fd * fd);
  const cplx resid = lap + k * k * S(p);
  CHECK(std::abs(resid) / std::abs(S(p)) < 1e-5);
}

TEST_CASE("quadrature is spectrally exact for a constant density on the disk") {
  // S[1](center) = (i/4) H0(k) * 2 pi, since every boundary point is at
  // distance 1 from the center.
  auto disk = make_disk(1.0);
  auto mesh = bie::build_mesh(Partition::pure_dirichlet(disk), 64);
  bie::Density d;
  d.psi = Eigen::VectorXcd::Ones(mesh->size());
  for (double k : {0.7, 2.3}) {
    const cplx expected = cplx(0.0, 0.25) * ref_h(0, k) * two_pi;
    const cplx got = bie::eval_single_layer(d, *mesh, cplx(k), Vec2::Zero());
    CHECK(std::abs(got - expected) < 1e-12);
  }
}

TEST_CASE("interior jump relation of the single layer, exact disk identity") {
  // For density psi = cos(tau) on the unit circle the single layer is
  // (i pi / 2) J1(k r<) H1(k r>) cos(tau), so the interior normal-derivative
  // trace is (i pi k / 2) J1'(k) H1(k) cos(tau).
  auto disk = make_disk(1.0);
  auto mesh = bie::build_mesh(Partition::pure_dirichlet(disk), 96);
  const int n = mesh->size();
  bie::Density d;
  d.psi.resize(n);
  for (int i = 0; i < n; ++i) d.psi(i) = std::cos(mesh->nodes()[i].tau);
  for (double k : {1.0, 3.7}) {
    const double j1p = std::cyl_bessel_j(0, k) - std::cyl_bessel_j(1, k) / k;
    const cplx coeff = cplx(0.0, std::numbers::pi / 2.0) * k * j1p * ref_h(1, k);
    const Eigen::VectorXcd trace = bie::eval_trace_dn(d, *mesh, cplx(k));
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst,
                       std::abs(trace(i) - coeff * std::cos(mesh->nodes()[i].tau)));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("Dirichlet solve reproduces an exact exterior-source solution") {
  // G(z0, .) with z0 outside the domain solves Helmholtz inside; imposing
  // its boundary trace as Dirichlet data must reproduce it at interior
  // points. Exercises assembly, the log-split quadrature, and the solver.
  auto kite = make_kite();
  auto mesh = bie::build_mesh(Partition::pure_dirichlet(kite), 128);
  const double k = 1.9;
  const Vec2 z0{3.0, 2.0};
  Eigen::VectorXcd rhs(mesh->size());
  for (int i = 0; i < mesh->size(); ++i)
    rhs(i) = bie::fundamental_solution(cplx(k), z0, mesh->nodes()[i].x);
  const bie::Density d = bie::assemble(cplx(k), mesh).solve(rhs);
  for (const Vec2 p : {Vec2{-0.3, 0.2}, Vec2{0.1, -0.6}, Vec2{-0.5, -0.4}}) {
    const cplx got = bie::eval_single_layer(d, *mesh, cplx(k), p);
    const cplx expected = bie::fundamental_solution(cplx(k), z0, p);
    CHECK(std::abs(got - expected) < 1e-9);
  }
}

TEST_CASE("mixed solve satisfies both boundary conditions") {
  auto disk = make_disk(1.0);
  Partition p(disk, {Arc(disk, std::numbers::pi / 2, 0.4)});
  auto mesh = bie::build_mesh(p, 96);
  const double k = 1.3;
  const Vec2 z0{2.5, -1.0};
  Eigen::VectorXcd rhs(mesh->size());
  for (int i = 0; i < mesh->size(); ++i) {
    const auto& nd = mesh->nodes()[i];
    rhs(i) = nd.bc == BcType::kDirichlet
                 ? bie::fundamental_solution(cplx(k), z0, nd.x)
                 : -bie::kernel_normal_derivative(cplx(k), nd.x, nd.normal, z0);
  }
  const bie::Density d = bie::assemble(cplx(k), mesh).solve(rhs);
  // The mixed data above is the trace of G(z0, .), so the solution must
  // reproduce it in the interior...
  for (const Vec2 pt : {Vec2{0.0, 0.0}, Vec2{-0.2, 0.5}}) {
    CHECK(std::abs(bie::eval_single_layer(d, *mesh, cplx(k), pt) -
                   bie::fundamental_solution(cplx(k), z0, pt)) < 1e-8);
  }
  // ...and the boundary traces must match the imposed data. The Neumann-row
  // action of the operator is minus the interior dn trace, hence the sign.
  const Eigen::VectorXcd ts = bie::eval_trace_s(d, *mesh, cplx(k));
  const Eigen::VectorXcd tdn = bie::eval_trace_dn(d, *mesh, cplx(k));
  double worst = 0.0;
  for (int i = 0; i < mesh->size(); ++i) {
    const auto& nd = mesh->nodes()[i];
    const cplx got = nd.bc == BcType::kDirichlet ? ts(i) : -tdn(i);
    worst = std::max(worst, std::abs(got - rhs(i)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("solve refuses a near-singular operator") {
  auto disk = make_disk(1.0);
  auto mesh = bie::build_mesh(Partition::pure_dirichlet(disk), 64);
  const double k_root = 2.404825557695773;  // first J0 root, oracle-pinned
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Ones(mesh->size());
  CHECK_THROWS_AS(bie::assemble(cplx(k_root), mesh).solve(rhs), bie::NearResonance);
  CHECK_NOTHROW(bie::assemble(cplx(2.1), mesh).solve(rhs));
}

TEST_CASE("evaluation floor rejects points hugging the boundary") {
  auto disk = make_disk(1.0);
  auto mesh = bie::build_mesh(Partition::pure_dirichlet(disk), 64);
  bie::Density d;
  d.psi = Eigen::VectorXcd::Ones(mesh->size());
  CHECK_THROWS(bie::eval_single_layer(d, *mesh, cplx(1.0), Vec2{0.9999, 0.0}, 5.0));
  CHECK_NOTHROW(bie::eval_single_layer(d, *mesh, cplx(1.0), Vec2{0.5, 0.0}, 5.0));
}
