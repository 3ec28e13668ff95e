#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "zaremba/specfun.hpp"

using zaremba::specfun::bessel_j;
using zaremba::specfun::bessel_j_prime;
using zaremba::specfun::bessel_y;
using zaremba::specfun::hankel1;
using cplx = std::complex<double>;

// Independent oracle: the platform's C++17 special functions. The library
// deliberately does not call them (self-containedness), which makes them a
// fair cross-check here.
static double ref_j(int n, double x) { return std::cyl_bessel_j(n, x); }
static double ref_y(int n, double x) { return std::cyl_neumann(n, x); }

TEST_CASE("J and Y match the platform oracle across the series/asymptotic cutoff") {
  // Dense sweep straddling the switchover at |x| = 12.
  for (double x = 0.05; x <= 40.0; x += 0.173) {
    for (int n : {0, 1}) {
      CHECK(std::abs(bessel_j(n, x) - ref_j(n, x)) < 1e-11);
      CHECK(std::abs(bessel_y(n, x) - ref_y(n, x)) < 1e-11);
    }
  }
}

TEST_CASE("values are continuous at the cutoff itself") {
  for (int n : {0, 1}) {
    const double below = bessel_j(n, 12.0 - 1e-9);
    const double above = bessel_j(n, 12.0 + 1e-9);
    CHECK(std::abs(below - above) < 1e-8);
  }
}

TEST_CASE("Wronskian J_n(x) Y_n'(x) - J_n'(x) Y_n(x) = 2/(pi x)") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(0.1, 60.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = dist(rng);
    for (int n : {0, 1}) {
      const double w = bessel_j(n, x) * zaremba::specfun::bessel_y_prime(n, x) -
                       bessel_j_prime(n, x) * bessel_y(n, x);
      CHECK(w == doctest::Approx(2.0 / (std::numbers::pi * x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("Hankel function is J + iY, and decays upward in the complex plane") {
  for (double x : {0.5, 3.0, 11.0, 13.0, 30.0}) {
    const cplx h = hankel1(0, cplx(x));
    CHECK(h.real() == doctest::Approx(ref_j(0, x)).epsilon(1e-12));
    CHECK(h.imag() == doctest::Approx(ref_y(0, x)).epsilon(1e-12));
  }
  // |H0(x + iy)| must shrink as y grows (the defining property used to pick
  // the + branch).
  const double a = std::abs(hankel1(0, cplx(20.0, 1.0)));
  const double b = std::abs(hankel1(0, cplx(20.0, 4.0)));
  CHECK(b < a);
}

TEST_CASE("derivative identities against centered differences") {
  for (double x : {0.7, 5.0, 14.0}) {
    const double h = 1e-6;
    for (int n : {0, 1}) {
      const double fd = (bessel_j(n, x + h) - bessel_j(n, x - h)) / (2 * h);
      CHECK(bessel_j_prime(n, x) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

// Bisection on the platform oracle: an implementation-independent root
// finder used to pin the characteristic-value constants appearing in the
// spectral tests.
static double oracle_root(int order, double lo, double hi) {
  auto f = [&](double x) { return std::cyl_bessel_j(order, x); };
  REQUIRE(f(lo) * f(hi) < 0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST_CASE("pinned spectral constants are genuine Bessel roots") {
  CHECK(oracle_root(0, 2.0, 3.0) == doctest::Approx(2.404826).epsilon(1e-6));
  CHECK(oracle_root(1, 3.0, 4.5) == doctest::Approx(3.831706).epsilon(1e-6));
  CHECK(oracle_root(2, 4.5, 6.0) == doctest::Approx(5.135622).epsilon(1e-6));
  // First positive root of J1' via bisection on the recurrence
  // J1'(x) = J0(x) - J1(x)/x.
  auto j1p = [](double x) { return std::cyl_bessel_j(0, x) - std::cyl_bessel_j(1, x) / x; };
  double lo = 1.0, hi = 2.5;
  REQUIRE(j1p(lo) * j1p(hi) < 0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (j1p(lo) * j1p(mid) <= 0 ? hi : lo) = mid;
  }
  CHECK(0.5 * (lo + hi) == doctest::Approx(1.841184).epsilon(1e-6));
}
