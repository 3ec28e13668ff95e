#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "zaremba/geometry.hpp"

using namespace zaremba;

// Independent arclength oracle: adaptive Simpson on the speed |r'(t)|,
// refining until the estimate is stable to 1e-12.
static double simpson_length(const Curve& c, double a, double b, double fa, double fm,
                             double fb, double whole, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = c.speed(lm), frm = c.speed(rm);
  const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
  if (depth > 40 || std::abs(left + right - whole) < 1e-13 * (1 + std::abs(whole)))
    return left + right;
  return simpson_length(c, a, m, fa, flm, fm, left, depth + 1) +
         simpson_length(c, m, b, fm, frm, fb, right, depth + 1);
}

static double oracle_arclength(const Curve& c, double a, double b) {
  const double fa = c.speed(a), fb = c.speed(b), fm = c.speed(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
  return simpson_length(c, a, b, fa, fm, fb, whole, 0);
}

TEST_CASE("disk geometry is exact") {
  auto disk = make_disk(1.0);
  CHECK(disk->total_arclength() == doctest::Approx(two_pi).epsilon(1e-13));
  for (double t : {0.0, 0.7, 2.5, 5.9}) {
    CHECK(disk->speed(t) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(disk->curvature(t) == doctest::Approx(1.0).epsilon(1e-12));
    const Vec2 n = disk->outward_normal(t);
    CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(n.dot(disk->point(t)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("kite arclength matches the adaptive Simpson oracle") {
  auto kite = make_kite();
  CHECK(kite->total_arclength() ==
        doctest::Approx(oracle_arclength(*kite, 0.0, two_pi)).epsilon(1e-11));
  // Partial arclengths too.
  for (double t : {0.3, 1.9, 4.4}) {
    CHECK(kite->arclength(t) ==
          doctest::Approx(oracle_arclength(*kite, 0.0, t)).epsilon(1e-10));
  }
}

TEST_CASE("arclength parameterization round-trips") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (auto curve : {make_disk(1.0), make_kite()}) {
    const double L = curve->total_arclength();
    for (int i = 0; i < 200; ++i) {
      const double s = dist(rng) * L;
      CHECK(std::abs(curve->arclength(curve->tau_of_arclength(s)) - s) < 1e-10 * L);
    }
  }
}

TEST_CASE("outward normal points out of the domain") {
  auto kite = make_kite();
  for (double t = 0.05; t < two_pi; t += 0.31) {
    const Vec2 p = kite->point(t);
    const Vec2 n = kite->outward_normal(t);
    CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(kite->contains(p + 1e-4 * n));
    CHECK(kite->contains(p - 1e-4 * n));
  }
}

TEST_CASE("winding-based containment on the kite") {
  auto kite = make_kite();
  CHECK(kite->contains({-0.5, 0.0}));
  CHECK(kite->contains({0.0, 0.5}));
  CHECK_FALSE(kite->contains({2.0, 0.0}));
  CHECK_FALSE(kite->contains({-3.0, -3.0}));
}

TEST_CASE("partition editing: nucleation, growth, merging") {
  auto disk = make_disk(1.0);
  Partition p = Partition::pure_dirichlet(disk);
  CHECK(p.is_pure_dirichlet());
  CHECK(p.neumann_length() == doctest::Approx(0.0));

  Partition p1 = p.with_arc(1.0, 0.1);
  CHECK(p1.neumann_arcs().size() == 1);
  CHECK(p1.neumann_length() == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(p1.dirichlet_length() == doctest::Approx(two_pi - 0.2).epsilon(1e-13));

  Partition p2 = p1.extended(0, 0.05);
  CHECK(p2.neumann_length() == doctest::Approx(0.3).epsilon(1e-13));
  CHECK(p2.neumann_arcs()[0].center_s == doctest::Approx(1.0).epsilon(1e-13));

  // Overlapping arcs merge into their union; disjoint ones stay separate.
  Partition q = p.with_arc(1.0, 0.2).with_arc(1.3, 0.2);
  CHECK(q.neumann_arcs().size() == 1);
  CHECK(q.neumann_length() == doctest::Approx(0.7).epsilon(1e-12));
  Partition q2 = p.with_arc(1.0, 0.2).with_arc(2.0, 0.2);
  CHECK(q2.neumann_arcs().size() == 2);

  // Arc centers wrap modulo the total length.
  Partition w = p.with_arc(two_pi + 1.0, 0.1);
  CHECK(w.neumann_arcs()[0].center_s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate partitions are rejected") {
  auto disk = make_disk(1.0);
  Partition p = Partition::pure_dirichlet(disk);
  CHECK_THROWS_AS(p.with_arc(0.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(p.with_arc(0.0, two_pi), std::invalid_argument);
  // Growing an arc until no Dirichlet part remains is rejected.
  Partition big = p.with_arc(0.0, 3.0);
  CHECK_THROWS(big.extended(0, 0.5));
}

TEST_CASE("PointInDomain validates membership and the boundary floor") {
  auto disk = make_disk(1.0);
  CHECK_NOTHROW(PointInDomain(*disk, {0.3, 0.2}));
  CHECK_THROWS_AS(PointInDomain(*disk, {1.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(PointInDomain(*disk, {0.999, 0.0}, 0.1), std::invalid_argument);
}

TEST_CASE("named curve factory") {
  CHECK(make_curve_by_name("disk")->total_arclength() ==
        doctest::Approx(two_pi).epsilon(1e-13));
  CHECK_NOTHROW(make_curve_by_name("kite"));
  CHECK_THROWS_AS(make_curve_by_name("pentagon"), std::invalid_argument);
}
