#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

// Bessel and Hankel functions of orders 0 and 1 for real and complex
// arguments in the right half plane. Power series below |z| = 12, Hankel
// asymptotic expansion above; the switchover is validated by the Wronskian
// sweep in the test suite.

namespace zaremba::specfun {

using cplx = std::complex<double>;

inline constexpr double euler_gamma = 0.57721566490153286060651209;
inline constexpr double kSeriesCutoff = 12.0;
inline constexpr int kSeriesTerms = 64;

namespace detail {

inline cplx j0_series(cplx z) {
  const cplx q = -0.25 * z * z;
  cplx term = 1.0, sum = 1.0;
  for (int m = 1; m < kSeriesTerms; ++m) {
    term *= q / double(m * m);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

inline cplx j1_series(cplx z) {
  const cplx q = -0.25 * z * z;
  cplx term = 1.0, sum = 1.0;
  for (int m = 1; m < kSeriesTerms; ++m) {
    term *= q / double(m * (m + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return 0.5 * z * sum;
}

inline cplx y0_series(cplx z) {
  const cplx q = -0.25 * z * z;
  cplx term = 1.0, sum = 0.0;
  double harmonic = 0.0;
  for (int m = 1; m < kSeriesTerms; ++m) {
    term *= q / double(m * m);
    harmonic += 1.0 / m;
    const cplx c = harmonic * term;
    sum += c;
    if (std::abs(c) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  const cplx lg = std::log(0.5 * z) + euler_gamma;
  return (2.0 / std::numbers::pi) * (lg * j0_series(z) - sum);
}

inline cplx y1_series(cplx z) {
  const cplx q = -0.25 * z * z;
  cplx term = 1.0, sum = 1.0;  // m = 0 term: (H_0 + H_1) = 1
  double hm = 0.0, hm1 = 1.0;
  for (int m = 1; m < kSeriesTerms; ++m) {
    term *= q / double(m * (m + 1));
    hm += 1.0 / m;
    hm1 += 1.0 / (m + 1);
    const cplx c = (hm + hm1) * term;
    sum += c;
    if (std::abs(c) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  const cplx lg = std::log(0.5 * z) + euler_gamma;
  return (2.0 / std::numbers::pi) * lg * j1_series(z) - 2.0 / (std::numbers::pi * z) -
         (z / (2.0 * std::numbers::pi)) * sum;
}

// Hankel asymptotic expansion, kind = +1 for H^(1), -1 for H^(2).
inline cplx hankel_asymptotic(int n, cplx z, int kind) {
  const cplx i(0.0, 1.0);
  const double mu = 4.0 * n * n;
  cplx term = 1.0, sum = 1.0;
  double prev = 1.0;
  for (int m = 1; m <= 30; ++m) {
    const double num = mu - double(2 * m - 1) * double(2 * m - 1);
    term *= num / (8.0 * m) * (double(kind) * i / z);
    if (std::abs(term) > prev) break;  // divergence onset of the asymptotic series
    sum += term;
    prev = std::abs(term);
    if (prev < 1e-17) break;
  }
  const cplx omega = z - (0.5 * n + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * z)) *
         std::exp(double(kind) * i * omega) * sum;
}

}  // namespace detail

inline cplx bessel_j(int n, cplx z) {
  if (n != 0 && n != 1) throw std::invalid_argument("bessel_j: order must be 0 or 1");
  if (std::abs(z) < kSeriesCutoff)
    return n == 0 ? detail::j0_series(z) : detail::j1_series(z);
  return 0.5 * (detail::hankel_asymptotic(n, z, +1) + detail::hankel_asymptotic(n, z, -1));
}

inline cplx bessel_y(int n, cplx z) {
  if (n != 0 && n != 1) throw std::invalid_argument("bessel_y: order must be 0 or 1");
  if (z == cplx(0.0)) throw std::invalid_argument("bessel_y: argument must be nonzero");
  if (std::abs(z) < kSeriesCutoff)
    return n == 0 ? detail::y0_series(z) : detail::y1_series(z);
  const cplx i(0.0, 1.0);
  return (detail::hankel_asymptotic(n, z, +1) - detail::hankel_asymptotic(n, z, -1)) /
         (2.0 * i);
}

inline cplx hankel1(int n, cplx z) {
  if (n != 0 && n != 1) throw std::invalid_argument("hankel1: order must be 0 or 1");
  if (std::abs(z) >= kSeriesCutoff) return detail::hankel_asymptotic(n, z, +1);
  return bessel_j(n, z) + cplx(0.0, 1.0) * bessel_y(n, z);
}

inline double bessel_j(int n, double x) { return bessel_j(n, cplx(x)).real(); }

inline double bessel_y(int n, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("bessel_y: real argument must be positive");
  return bessel_y(n, cplx(x)).real();
}

// d/dx J0 = -J1, d/dx J1 = J0 - J1/x, same recurrences for Y.
inline double bessel_j_prime(int n, double x) {
  return n == 0 ? -bessel_j(1, x) : bessel_j(0, x) - bessel_j(1, x) / x;
}
inline double bessel_y_prime(int n, double x) {
  return n == 0 ? -bessel_y(1, x) : bessel_y(0, x) - bessel_y(1, x) / x;
}

}  // namespace zaremba::specfun
