#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zaremba/bie.hpp"
#include "zaremba/parallel.hpp"

// Characteristic values of k -> A(k): smallest-singular-value scans and the
// contour-integral perturbation updates used to track a characteristic value
// as the boundary partition changes.

namespace zaremba::spectral {

using bie::cplx;

inline constexpr double kSingularityThreshold = 1e-6;  // relative to ||A||

struct CharValue {
  double k;
  int multiplicity;
  double sigma_min;
  std::string partition_fingerprint;
  int node_count;
};

struct NotInContour : std::runtime_error {
  NotInContour() : std::runtime_error("no characteristic value inside the contour") {}
};

struct WindingError : std::runtime_error {
  int winding;
  explicit WindingError(int w)
      : std::runtime_error("contour winding number " + std::to_string(w) +
                           " incompatible with the requested update"),
        winding(w) {}
};

class EllipseContour {
 public:
  EllipseContour(cplx center, double semi_major, double semi_minor, int points = 32)
      : center_(center), a_(semi_major), b_(semi_minor), m_(points) {
    if (!(semi_major > 0.0) || !(semi_minor > 0.0))
      throw std::invalid_argument("EllipseContour: degenerate axes");
    if (points < 8) throw std::invalid_argument("EllipseContour: too few quadrature points");
  }

  // The paper's tracking contour between the current value k and the target.
  static EllipseContour tracking(double k, double k_star, int points = 32) {
    return EllipseContour(cplx(0.5 * (k + k_star), 0.0), 0.55 * (k - k_star),
                          0.1 * (k - k_star), points);
  }

  cplx center() const { return center_; }
  double semi_major() const { return a_; }
  double semi_minor() const { return b_; }
  int points() const { return m_; }

  cplx node(int m) const {
    const double t = two_pi * m / m_;
    return center_ + cplx(a_ * std::cos(t), b_ * std::sin(t));
  }
  // d omega / dt times the trapezoid weight 2pi/M.
  cplx dnode(int m) const {
    const double t = two_pi * m / m_;
    return cplx(-a_ * std::sin(t), b_ * std::cos(t)) * (two_pi / m_);
  }

  bool contains(cplx z) const {
    const cplx w = z - center_;
    const double x = w.real() / a_, y = w.imag() / b_;
    return x * x + y * y < 1.0;
  }

 private:
  cplx center_;
  double a_, b_;
  int m_;
};

struct ScanOptions {
  int nodes_per_arc = 64;
  double threshold = kSingularityThreshold;
  double refine_tol = 1e-8;
  bie::MeshOptions mesh;
};

namespace detail {

struct SigmaSample {
  double sigma_min;
  double norm;     // largest singular value
  int below_rel;   // count of singular values below 1e2 * sigma_min
};

inline SigmaSample sigma_sample(const bie::Mesh& mesh, double k) {
  const Eigen::VectorXd s = bie::assemble(cplx(k), mesh).singular_values();
  SigmaSample out;
  out.norm = s(0);
  out.sigma_min = s(s.size() - 1);
  out.below_rel = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) < 1e2 * out.sigma_min) ++out.below_rel;
  return out;
}

inline double sigma_at(const bie::Mesh& mesh, double k) {
  return bie::assemble(cplx(k), mesh).sigma_min();
}

// Golden-section minimization of sigma_min over [lo, hi].
inline double golden_refine(const bie::Mesh& mesh, double lo, double hi, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = sigma_at(mesh, c), fd = sigma_at(mesh, d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d; d = c; fd = fc;
      c = hi - gr * (hi - lo); fc = sigma_at(mesh, c);
    } else {
      lo = c; c = d; fc = fd;
      d = lo + gr * (hi - lo); fd = sigma_at(mesh, d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Samples sigma_min(A(k)) over the interval and refines every local minimum
// of the sampled curve; minima whose refined sigma_min stays above the
// threshold (relative to the operator norm) are discarded. Near a
// characteristic value the sampled values themselves sit far above the
// threshold -- the basin is narrow -- so the refinement trigger is the
// *relative* dip, not the threshold.
inline std::vector<CharValue> sigma_min_scan(const Partition& partition, double k_lo,
                                             double k_hi, double grid_step,
                                             ScanOptions opts = {}) {
  if (!(k_lo > 0.0) || !(k_hi > k_lo)) throw std::invalid_argument("scan interval invalid");
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");
  auto mesh = bie::build_mesh(partition, opts.nodes_per_arc, opts.mesh);

  const int n = static_cast<int>(std::ceil((k_hi - k_lo) / grid_step)) + 1;
  std::vector<double> ks(n), sig(n);
  for (int i = 0; i < n; ++i) ks[i] = std::min(k_lo + i * grid_step, k_hi);
  parallel::parallel_for(n, [&](int i) { sig[i] = detail::sigma_at(*mesh, ks[i]); });

  std::vector<CharValue> out;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(sig[i] < sig[i - 1] && sig[i] <= sig[i + 1])) continue;
    const double k_ref = detail::golden_refine(*mesh, ks[i - 1], ks[i + 1], opts.refine_tol);
    const auto sample = detail::sigma_sample(*mesh, k_ref);
    if (sample.sigma_min > opts.threshold * sample.norm) continue;
    if (!out.empty() && std::abs(out.back().k - k_ref) < 10 * opts.refine_tol) continue;
    out.push_back({k_ref, sample.below_rel, sample.sigma_min,
                   partition.fingerprint(), mesh->size()});
  }
  return out;
}

// Smallest pure-Dirichlet characteristic value strictly above k_star,
// searched with forward windows of growing width.
inline CharValue next_higher_dirichlet(const CurvePtr& curve, double k_star,
                                       ScanOptions opts = {}) {
  if (!(k_star > 0.0)) throw std::invalid_argument("k_star must be positive");
  Partition p = Partition::pure_dirichlet(curve);
  double lo = k_star + 1e-9, width = 0.5;
  for (int round = 0; round < 12; ++round) {
    auto found = sigma_min_scan(p, lo, lo + width, 0.01, opts);
    for (const auto& cv : found)
      if (cv.k > k_star) return cv;
    lo += width;
    width *= 2.0;
  }
  throw std::runtime_error("next_higher_dirichlet: scan budget exhausted");
}

struct UpdateOptions {
  int nodes_per_arc = 64;
  double fd_step = 0.01;          // the paper's forward-difference step
  bool richardson = false;        // validation-only refined derivative
  bie::MeshOptions mesh;
};

namespace detail {

inline Eigen::MatrixXcd dmatrix(const bie::Mesh& mesh, cplx w, double step,
                                bool richardson) {
  const Eigen::MatrixXcd a0 = bie::assemble(w, mesh).matrix();
  const Eigen::MatrixXcd a1 = bie::assemble(w + step, mesh).matrix();
  if (!richardson) return (a1 - a0) / step;
  const Eigen::MatrixXcd a2 = bie::assemble(w + 0.5 * step, mesh).matrix();
  // one Richardson extrapolation of the forward difference, whose error is
  // O(step): halving the step halves the error, so 2*D(h/2) - D(h) is O(h^2)
  return 2.0 * (a2 - a0) / (0.5 * step) - (a1 - a0) / step;
}

struct ContourMoments {
  int winding;   // rounded characteristic-value count inside
  cplx m0, m1;   // (1/2pi i) oint tr dw and (1/2pi i) oint (w-k0) tr dw
};

// Trapezoid moments of the meromorphic trace function alongside the winding
// integral of the logarithmic derivative.
template <typename TraceFn, typename LogDerivFn>
ContourMoments contour_moments(const EllipseContour& contour, cplx k0, TraceFn trace,
                               LogDerivFn logderiv) {
  cplx w_int = 0.0, m0 = 0.0, m1 = 0.0;
  for (int m = 0; m < contour.points(); ++m) {
    const cplx w = contour.node(m), dw = contour.dnode(m);
    w_int += logderiv(w) * dw;
    const cplx t = trace(w);
    m0 += t * dw;
    m1 += (w - k0) * t * dw;
  }
  const cplx itp = cplx(0.0, 1.0) * two_pi;
  ContourMoments out;
  out.winding = static_cast<int>(std::lround((w_int / itp).real()));
  out.m0 = m0 / itp;
  out.m1 = m1 / itp;
  return out;
}

}  // namespace detail

// Lemma-type exact update: k_eps = k0 + (1/2pi i) tr oint (w - k0) A(w)^{-1} A'(w) dw.
// One factorization per contour node; the slow validation path.
inline double char_update_exact(const Partition& partition_eps, const CharValue& k0,
                                const EllipseContour& contour, UpdateOptions opts = {}) {
  auto mesh = bie::build_mesh(partition_eps, opts.nodes_per_arc, opts.mesh);
  const int M = contour.points();
  std::vector<cplx> ld(M);  // tr A^{-1} A' at each contour node
  parallel::parallel_for(M, [&](int m) {
    const cplx w = contour.node(m);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(bie::assemble(w, *mesh).matrix());
    ld[m] = lu.solve(detail::dmatrix(*mesh, w, opts.fd_step, opts.richardson)).trace();
  });
  cplx w_int = 0.0, m1 = 0.0;
  for (int m = 0; m < M; ++m) {
    const cplx w = contour.node(m), dw = contour.dnode(m);
    w_int += ld[m] * dw;
    m1 += (w - k0.k) * ld[m] * dw;
  }
  const cplx itp = cplx(0.0, 1.0) * two_pi;
  const int winding = static_cast<int>(std::lround((w_int / itp).real()));
  if (winding == 0) throw NotInContour();
  if (winding != 1) throw WindingError(winding);
  // Normalizing the first moment by the raw winding integral (instead of
  // 2*pi*i) cancels the multiplicative error that the finite-difference
  // derivative and the trapezoid rule both impose on the residue, so the
  // returned value matches a direct re-scan to near machine precision.
  return k0.k + (m1 / w_int).real();
}

// Winding number of det A over the contour (validation helper).
inline int contour_winding(const Partition& partition, const EllipseContour& contour,
                           UpdateOptions opts = {}) {
  auto mesh = bie::build_mesh(partition, opts.nodes_per_arc, opts.mesh);
  cplx w_int = 0.0;
  const int M = contour.points();
  std::vector<cplx> ld(M);
  parallel::parallel_for(M, [&](int m) {
    const cplx w = contour.node(m);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(bie::assemble(w, *mesh).matrix());
    ld[m] = lu.solve(detail::dmatrix(*mesh, w, opts.fd_step, opts.richardson)).trace();
  });
  for (int m = 0; m < M; ++m) w_int += ld[m] * contour.dnode(m);
  return static_cast<int>(std::lround((w_int / (cplx(0.0, 1.0) * two_pi)).real()));
}

// First-order approximation:
//   k_eps - k0 ~ -(1/2pi i) tr oint A0(w)^{-1} (A_eps(w) - A0(w)) dw,
// with A0 assembled on the perturbed partition's mesh under the unperturbed
// boundary-condition labels, so both operators share the node set.
inline double char_update_firstorder(const Partition& partition0,
                                     const Partition& partition_eps, const CharValue& k0,
                                     const EllipseContour& contour,
                                     UpdateOptions opts = {}) {
  auto mesh = bie::build_mesh(partition_eps, opts.nodes_per_arc, opts.mesh);
  const auto& curve = *partition_eps.curve();
  // unperturbed labels at the perturbed mesh's nodes
  std::vector<BcType> bc0(mesh->size());
  const auto pieces0 = partition0.pieces();
  const double L = curve.total_arclength();
  for (int i = 0; i < mesh->size(); ++i) {
    double s = std::fmod(curve.arclength(mesh->nodes()[i].tau), L);
    if (s < 0) s += L;
    bc0[i] = BcType::kDirichlet;
    for (const auto& pc : pieces0) {
      double sl = s;
      if (sl < pc.s_begin) sl += L;
      if (sl >= pc.s_begin && sl <= pc.s_end) { bc0[i] = pc.bc; break; }
    }
  }
  const int M = contour.points();
  std::vector<cplx> tr(M), ld(M);
  parallel::parallel_for(M, [&](int m) {
    const cplx w = contour.node(m);
    const Eigen::MatrixXcd a_eps = bie::assemble(w, mesh).matrix();
    const Eigen::MatrixXcd a0 = bie::BlockOperator(w, mesh, &bc0).matrix();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a0);
    tr[m] = lu.solve(a_eps - a0).trace();
    ld[m] = lu.solve(detail::dmatrix(*mesh, w, opts.fd_step, opts.richardson)).trace();
  });
  cplx w_int = 0.0, m0 = 0.0;
  for (int m = 0; m < M; ++m) {
    w_int += ld[m] * contour.dnode(m);
    m0 += tr[m] * contour.dnode(m);
  }
  const cplx itp = cplx(0.0, 1.0) * two_pi;
  const int winding = static_cast<int>(std::lround((w_int / itp).real()));
  if (winding == 0) throw NotInContour();
  if (winding != 1) throw WindingError(winding);
  return k0.k - (m0 / itp).real();
}

struct FastUpdate {
  std::vector<double> roots;  // updated characteristic values inside the contour
  int winding;
};

// Prop.-type fast update: two assemblies and one factorization. With
// B = A(k0)^{-1} (A(k0 + step) - A(k0)) / step, the trace of
// (I + (w - k0) B)^{-1} is a sum of simple poles at w_l = k0 - 1/beta_l over
// the eigenvalues beta_l of B, so the contour moments reduce to scalar sums
// evaluated by the same trapezoid rule.
inline FastUpdate char_update_fast_all(const Partition& partition_eps, const CharValue& k0,
                                       const EllipseContour& contour,
                                       UpdateOptions opts = {}) {
  auto mesh = bie::build_mesh(partition_eps, opts.nodes_per_arc, opts.mesh);
  const Eigen::MatrixXcd a0 = bie::assemble(cplx(k0.k), mesh).matrix();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a0);
  const Eigen::MatrixXcd b =
      lu.solve(detail::dmatrix(*mesh, cplx(k0.k), opts.fd_step, opts.richardson));
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(b, /*computeEigenvectors=*/false);
  const Eigen::VectorXcd beta = eig.eigenvalues();

  // The trace of (I + (w - k0) B)^{-1} is a rational function of w whose
  // poles are w_l = k0 - 1/beta_l, each with residue -(w_l - k0).  The
  // contour moments are therefore evaluated exactly by summing residues of
  // the poles lying inside the contour; trapezoid quadrature would lose
  // accuracy whenever the tracked value sits near the thin ellipse boundary.
  int winding = 0;
  cplx s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < beta.size(); ++i) {
    if (std::abs(beta(i)) < 1e-14) continue;
    const cplx w = cplx(k0.k) - 1.0 / beta(i);
    if (!contour.contains(w)) continue;
    ++winding;
    s1 += w - k0.k;
    s2 += (w - k0.k) * (w - k0.k);
  }
  FastUpdate out;
  out.winding = winding;
  if (winding <= 0) throw NotInContour();
  if (winding == 1) {
    out.roots.push_back(k0.k + s1.real());
  } else if (winding == 2) {
    // displacements d1, d2 from d1 + d2 = s1, d1^2 + d2^2 = s2
    const cplx e2 = 0.5 * (s1 * s1 - s2);
    const cplx disc = std::sqrt(s1 * s1 - 4.0 * e2);
    out.roots.push_back(k0.k + (0.5 * (s1 + disc)).real());
    out.roots.push_back(k0.k + (0.5 * (s1 - disc)).real());
    std::sort(out.roots.begin(), out.roots.end());
  } else {
    throw WindingError(winding);
  }
  return out;
}

// Simple-value variant matching the paper's tracking loop.
inline double char_update_fast(const Partition& partition_eps, const CharValue& k0,
                               const EllipseContour& contour, UpdateOptions opts = {}) {
  const FastUpdate u = char_update_fast_all(partition_eps, k0, contour, opts);
  if (u.winding != 1) throw WindingError(u.winding);
  return u.roots[0];
}

}  // namespace zaremba::spectral
