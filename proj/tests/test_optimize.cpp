#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "zaremba/optimize.hpp"

using namespace zaremba;

TEST_CASE("config validation rejects degenerate runs") {
  optimize::OptimizeConfig c;
  c.curve = make_disk(1.0);
  c.x_s = {0.0, 0.0};
  c.y = {0.0, 0.5};
  c.k_star = 1.0;
  CHECK_NOTHROW(c.validate());

  auto bad = c;
  bad.y = bad.x_s;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.eps0 = 5.0;  // more than arclength/20
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.c_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.curve = nullptr;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("symmetric transmission problem nucleates on the receiver axis") {
  // Source at the center, receiver on the +y axis: the nucleation product
  // dZ/dn(x_S, .) * dZ/dn(y, .) is symmetric about tau = pi/2 and extremal
  // there.
  auto disk = make_disk(1.0);
  Partition p0 = Partition::pure_dirichlet(disk);
  const PointInDomain src(*disk, {0.0, 0.0}), rcv(*disk, {0.0, 0.4});
  // Slightly below the first characteristic value, as the optimizer does.
  const double k_nuc = 2.404825557695773 - 1e-3;
  const auto fs = field::solve_field(k_nuc, p0, src);
  const field::ZarembaField fr(k_nuc, fs.mesh(), rcv);
  const double tau = optimize::nucleation_site(fs, fr);
  const double dist = std::abs(std::remainder(tau - std::numbers::pi / 2, two_pi));
  CHECK(dist < 0.05);
}

TEST_CASE("short drag to a nearby target lands just above it") {
  auto disk = make_disk(1.0);
  optimize::OptimizeConfig c;
  c.curve = disk;
  c.x_s = {0.0, 0.0};
  c.y = {0.0, 0.5};
  c.k_star = 2.35;  // close below the first Dirichlet value 2.4048
  c.c_tol = 1e-2;
  c.eps0 = 0.1;
  const auto trace = optimize::run(c);
  REQUIRE(trace.success);
  CHECK(trace.k_initial == doctest::Approx(2.404826).epsilon(1e-5));
  // Landing rule: in [k_star, k_star + c_tol/10], never below the target.
  CHECK(trace.k_final >= c.k_star);
  CHECK(trace.k_final <= c.k_star + c.c_tol / 10.0);
  REQUIRE(trace.final_partition.has_value());
  REQUIRE(trace.final_partition->neumann_arcs().size() == 1);
  // Symmetry pins the arc to the top of the disk.
  const double center_angle = trace.final_partition->neumann_arcs()[0].center_s;
  CHECK(std::abs(std::remainder(center_angle - std::numbers::pi / 2, two_pi)) < 0.05);
  CHECK(trace.l_n == doctest::Approx(trace.final_partition->neumann_length()));
  CHECK(trace.gain > 1.0);  // on-resonance beats the off-resonance baseline
  // Every recorded k stays at or below the starting value: arcs only grow.
  for (std::size_t i = 1; i < trace.iterations.size(); ++i)
    CHECK(trace.iterations[i].k <= trace.k_initial + 1e-9);
}
