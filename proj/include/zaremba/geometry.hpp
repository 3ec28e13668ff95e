#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Smooth closed planar curves given by truncated trigonometric series,
// arcs on them measured by arclength, and Dirichlet/Neumann partitions
// of the boundary.

namespace zaremba {

using Vec2 = Eigen::Vector2d;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

namespace detail {

// One coordinate of a trigonometric polynomial:
//   f(t) = c0 + sum_m a_m cos(m t) + b_m sin(m t).
struct TrigSeries {
  double c0 = 0.0;
  std::vector<double> a;  // cosine coefficients, a[m-1] for mode m
  std::vector<double> b;  // sine coefficients

  double eval(double t) const {
    double v = c0;
    for (std::size_t m = 1; m <= a.size(); ++m) v += a[m - 1] * std::cos(m * t);
    for (std::size_t m = 1; m <= b.size(); ++m) v += b[m - 1] * std::sin(m * t);
    return v;
  }
  double d1(double t) const {
    double v = 0.0;
    for (std::size_t m = 1; m <= a.size(); ++m) v -= m * a[m - 1] * std::sin(m * t);
    for (std::size_t m = 1; m <= b.size(); ++m) v += m * b[m - 1] * std::cos(m * t);
    return v;
  }
  double d2(double t) const {
    double v = 0.0;
    for (std::size_t m = 1; m <= a.size(); ++m) v -= m * m * a[m - 1] * std::cos(m * t);
    for (std::size_t m = 1; m <= b.size(); ++m) v -= m * m * b[m - 1] * std::sin(m * t);
    return v;
  }
};

// 8-point Gauss-Legendre on [a, b].
inline double gauss8(double a, double b, const auto& f) {
  static const double xg[4] = {0.1834346424956498, 0.5255324099163290,
                               0.7966664774136267, 0.9602898564975363};
  static const double wg[4] = {0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    s += wg[i] * (f(c - hw * xg[i]) + f(c + hw * xg[i]));
  return s * hw;
}

}  // namespace detail

// Smooth closed curve parametrized over tau in [0, 2pi), counterclockwise,
// with outward normal obtained by rotating the tangent by -pi/2.
class Curve {
 public:
  Curve(detail::TrigSeries x, detail::TrigSeries y, std::string name = "custom")
      : x_(std::move(x)), y_(std::move(y)), name_(std::move(name)) {
    build_tables();
    validate();
  }

  const std::string& name() const { return name_; }

  Vec2 point(double t) const { return {x_.eval(t), y_.eval(t)}; }
  Vec2 d1(double t) const { return {x_.d1(t), y_.d1(t)}; }
  Vec2 d2(double t) const { return {x_.d2(t), y_.d2(t)}; }
  double speed(double t) const { return d1(t).norm(); }

  Vec2 outward_normal(double t) const {
    const Vec2 g = d1(t);
    return Vec2(g.y(), -g.x()) / g.norm();
  }

  double curvature(double t) const {
    const Vec2 g1 = d1(t), g2 = d2(t);
    const double sp = g1.norm();
    return (g1.x() * g2.y() - g1.y() * g2.x()) / (sp * sp * sp);
  }

  double total_arclength() const { return total_length_; }

  // Arclength from tau=0 to tau=t (t may be outside [0,2pi)).
  double arclength(double t) const {
    double wraps = std::floor(t / two_pi);
    double tr = t - wraps * two_pi;
    const int i = std::min<int>(static_cast<int>(tr / table_dt_), table_n_ - 1);
    const double s = cum_[i] + detail::gauss8(i * table_dt_, tr,
                                              [this](double u) { return speed(u); });
    return wraps * total_length_ + s;
  }

  // Inverts the arclength function; monotone Newton with bisection safeguard.
  double tau_of_arclength(double s) const {
    double wraps = std::floor(s / total_length_);
    double sr = s - wraps * total_length_;
    auto it = std::upper_bound(cum_.begin(), cum_.end(), sr);
    int i = std::max<int>(0, static_cast<int>(it - cum_.begin()) - 1);
    double lo = i * table_dt_, hi = std::min((i + 2) * table_dt_, two_pi);
    double t = lo + (sr - cum_[i]) / std::max(speed(lo), 1e-30);
    t = std::clamp(t, lo, hi);
    for (int iter = 0; iter < 100; ++iter) {
      const double f = arclength(t) - sr;
      if (std::abs(f) < 1e-13 * std::max(1.0, total_length_)) break;
      if (f > 0) hi = t; else lo = t;
      double tn = t - f / speed(t);
      t = (tn > lo && tn < hi) ? tn : 0.5 * (lo + hi);
    }
    return t + wraps * two_pi;
  }

  // Winding-number interior test against a dense boundary polygon.
  bool contains(const Vec2& p) const {
    double angle = 0.0;
    for (int i = 0; i < poly_n_; ++i) {
      const Vec2 a = poly_[i] - p, b = poly_[(i + 1) % poly_n_] - p;
      angle += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
    }
    return std::abs(angle) > std::numbers::pi;
  }

  // Distance from p to the boundary (dense sampling plus local refinement).
  double boundary_distance(const Vec2& p) const {
    int best = 0;
    double bd = (poly_[0] - p).squaredNorm();
    for (int i = 1; i < poly_n_; ++i) {
      const double d = (poly_[i] - p).squaredNorm();
      if (d < bd) { bd = d; best = i; }
    }
    // golden-section refine around the best sample
    double lo = (best - 1) * poly_dt_, hi = (best + 1) * poly_dt_;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    auto f = [&](double t) { return (point(t) - p).squaredNorm(); };
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 60; ++it) {
      if (fc < fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = f(c); }
      else { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = f(d); }
    }
    return std::sqrt(std::min(fc, fd));
  }

  Vec2 centroid() const { return centroid_; }

 private:
  void build_tables() {
    table_n_ = 2048;
    table_dt_ = two_pi / table_n_;
    cum_.resize(table_n_ + 1);
    cum_[0] = 0.0;
    for (int i = 0; i < table_n_; ++i)
      cum_[i + 1] = cum_[i] + detail::gauss8(i * table_dt_, (i + 1) * table_dt_,
                                             [this](double u) { return speed(u); });
    total_length_ = cum_[table_n_];

    poly_n_ = 4096;
    poly_dt_ = two_pi / poly_n_;
    poly_.resize(poly_n_);
    Vec2 c = Vec2::Zero();
    double area = 0.0;
    for (int i = 0; i < poly_n_; ++i) poly_[i] = point(i * poly_dt_);
    for (int i = 0; i < poly_n_; ++i) {
      const Vec2 &a = poly_[i], &b = poly_[(i + 1) % poly_n_];
      const double cr = a.x() * b.y() - a.y() * b.x();
      area += cr;
      c += cr * (a + b);
    }
    area *= 0.5;
    signed_area_ = area;
    centroid_ = c / (6.0 * area);
  }

  void validate() const {
    if ((point(0.0) - point(two_pi)).norm() > 1e-12)
      throw std::invalid_argument("curve is not closed");
    double min_speed = std::numeric_limits<double>::max();
    for (int i = 0; i < 720; ++i)
      min_speed = std::min(min_speed, speed(i * two_pi / 720));
    if (min_speed <= 1e-10)
      throw std::invalid_argument("curve is not regular (|gamma'| vanishes)");
    if (signed_area_ <= 0.0)
      throw std::invalid_argument("curve must be oriented counterclockwise");
  }

  detail::TrigSeries x_, y_;
  std::string name_;
  int table_n_ = 0;
  double table_dt_ = 0.0;
  std::vector<double> cum_;
  double total_length_ = 0.0;
  int poly_n_ = 0;
  double poly_dt_ = 0.0;
  std::vector<Vec2> poly_;
  Vec2 centroid_ = Vec2::Zero();
  double signed_area_ = 0.0;
};

using CurvePtr = std::shared_ptr<const Curve>;

inline CurvePtr make_disk(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be positive");
  detail::TrigSeries x, y;
  x.a = {radius};
  y.b = {radius};
  return std::make_shared<Curve>(std::move(x), std::move(y), "disk");
}

// Kite-shaped boundary (cos t + 0.65 cos 2t - 0.65, 1.5 sin t).
inline CurvePtr make_kite() {
  detail::TrigSeries x, y;
  x.c0 = -0.65;
  x.a = {1.0, 0.65};
  y.b = {1.5};
  return std::make_shared<Curve>(std::move(x), std::move(y), "kite");
}

inline CurvePtr make_curve_by_name(const std::string& name) {
  if (name == "disk") return make_disk(1.0);
  if (name == "kite") return make_kite();
  throw std::invalid_argument("unknown curve name: " + name);
}

// Boundary arc centered at arclength coordinate center_s with arclength
// measure exactly 2*half_length.
struct Arc {
  CurvePtr host;
  double center_s = 0.0;
  double half_length = 0.0;

  Arc(CurvePtr c, double center, double half) : host(std::move(c)) {
    if (!(half > 0.0)) throw std::invalid_argument("arc half_length must be positive");
    const double L = host->total_arclength();
    if (!(2.0 * half < L))
      throw std::invalid_argument("arc longer than the hosting boundary");
    center_s = std::fmod(center, L);
    if (center_s < 0) center_s += L;
    half_length = half;
  }

  double length() const { return 2.0 * half_length; }
  double s_begin() const { return center_s - half_length; }
  double s_end() const { return center_s + half_length; }
  double tau_begin() const { return host->tau_of_arclength(s_begin()); }
  double tau_end() const { return host->tau_of_arclength(s_end()); }
};

inline Arc arc_by_arclength(const CurvePtr& curve, double center_s, double half_length) {
  return Arc(curve, center_s, half_length);
}

enum class BcType { kDirichlet, kNeumann };

// A maximal boundary piece carrying a single boundary-condition type,
// described by its arclength interval [s_begin, s_end] (s_end may exceed
// the total length when the piece wraps through s = 0).
struct BoundaryPiece {
  BcType bc;
  double s_begin;
  double s_end;
  double length() const { return s_end - s_begin; }
};

// Decomposition of the boundary into Neumann arcs and their Dirichlet
// complement. Immutable; editing operations return new partitions.
class Partition {
 public:
  explicit Partition(CurvePtr curve) : curve_(std::move(curve)) {}

  static Partition pure_dirichlet(CurvePtr curve) { return Partition(std::move(curve)); }

  static Partition pure_neumann(CurvePtr curve) {
    Partition p(std::move(curve));
    p.whole_neumann_ = true;
    return p;
  }

  Partition(CurvePtr curve, std::vector<Arc> neumann_arcs) : curve_(std::move(curve)) {
    for (auto& a : neumann_arcs) add_arc_merging(a);
    check_dirichlet_nonempty();
  }

  const CurvePtr& curve() const { return curve_; }
  const std::vector<Arc>& neumann_arcs() const { return arcs_; }
  bool is_pure_dirichlet() const { return !whole_neumann_ && arcs_.empty(); }
  bool is_pure_neumann() const { return whole_neumann_; }

  double neumann_length() const {
    if (whole_neumann_) return curve_->total_arclength();
    double l = 0.0;
    for (const auto& a : arcs_) l += a.length();
    return l;
  }
  double dirichlet_length() const { return curve_->total_arclength() - neumann_length(); }

  // Returns a new partition with a Neumann arc nucleated at center_s.
  Partition with_arc(double center_s, double half_length) const {
    if (whole_neumann_) throw std::invalid_argument("boundary is already fully Neumann");
    Partition p = *this;
    Arc a(curve_, center_s, half_length);
    p.add_arc_merging(a);
    p.check_dirichlet_nonempty();
    return p;
  }

  // Grows the selected Neumann arc by delta of arclength on each end,
  // merging with neighbours whose closures it reaches.
  Partition extended(std::size_t arc_index, double delta) const {
    if (arc_index >= arcs_.size()) throw std::out_of_range("arc index out of range");
    if (!(delta > 0.0)) throw std::invalid_argument("extension delta must be positive");
    Partition p(curve_);
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
      if (i == arc_index) {
        Arc grown(curve_, arcs_[i].center_s, arcs_[i].half_length + delta);
        p.add_arc_merging(grown);
      } else {
        p.add_arc_merging(arcs_[i]);
      }
    }
    p.check_dirichlet_nonempty();
    return p;
  }

  // Ordered alternating pieces covering the whole boundary.
  std::vector<BoundaryPiece> pieces() const {
    const double L = curve_->total_arclength();
    std::vector<BoundaryPiece> out;
    if (whole_neumann_) {
      out.push_back({BcType::kNeumann, 0.0, L});
      return out;
    }
    if (arcs_.empty()) {
      out.push_back({BcType::kDirichlet, 0.0, L});
      return out;
    }
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
      const Arc& a = arcs_[i];
      out.push_back({BcType::kNeumann, a.s_begin(), a.s_end()});
      const Arc& b = arcs_[(i + 1) % arcs_.size()];
      double gap_begin = a.s_end();
      double gap_end = (i + 1 < arcs_.size()) ? b.s_begin() : b.s_begin() + L;
      if (gap_end - gap_begin > 1e-12)
        out.push_back({BcType::kDirichlet, gap_begin, gap_end});
    }
    return out;
  }

  // Stable identifier used in diagnostics records.
  std::string fingerprint() const {
    std::string f = curve_->name();
    if (whole_neumann_) return f + ":N";
    char buf[64];
    for (const auto& a : arcs_) {
      std::snprintf(buf, sizeof buf, ":%.12g@%.12g", a.length(), a.center_s);
      f += buf;
    }
    return f;
  }

  bool operator==(const Partition& o) const {
    if (whole_neumann_ != o.whole_neumann_ || arcs_.size() != o.arcs_.size()) return false;
    for (std::size_t i = 0; i < arcs_.size(); ++i)
      if (arcs_[i].center_s != o.arcs_[i].center_s ||
          arcs_[i].half_length != o.arcs_[i].half_length)
        return false;
    return curve_ == o.curve_;
  }

 private:
  // Inserts an arc, merging with any arc whose closure it touches.
  void add_arc_merging(const Arc& arc) {
    const double L = curve_->total_arclength();
    Arc cur = arc;
    bool merged = true;
    while (merged) {
      merged = false;
      for (std::size_t i = 0; i < arcs_.size(); ++i) {
        if (overlap(cur, arcs_[i], L)) {
          cur = merge(cur, arcs_[i], L);
          arcs_.erase(arcs_.begin() + i);
          merged = true;
          break;
        }
      }
    }
    if (cur.length() >= L)
      throw std::invalid_argument("Neumann arcs cover the whole boundary");
    arcs_.push_back(cur);
    std::sort(arcs_.begin(), arcs_.end(),
              [](const Arc& a, const Arc& b) { return a.center_s < b.center_s; });
  }

  static bool overlap(const Arc& a, const Arc& b, double L) {
    double d = std::abs(std::remainder(a.center_s - b.center_s, L));
    return d <= a.half_length + b.half_length + 1e-14;
  }

  static Arc merge(const Arc& a, const Arc& b, double L) {
    // work in coordinates near a's center
    double cb = a.center_s + std::remainder(b.center_s - a.center_s, L);
    double lo = std::min(a.s_begin(), cb - b.half_length);
    double hi = std::max(a.s_end(), cb + b.half_length);
    return Arc(a.host, 0.5 * (lo + hi), 0.5 * (hi - lo));
  }

  void check_dirichlet_nonempty() const {
    if (!whole_neumann_ && !arcs_.empty() &&
        dirichlet_length() <= 1e-9 * curve_->total_arclength())
      throw std::invalid_argument("extension would consume the whole Dirichlet part");
  }

  CurvePtr curve_;
  std::vector<Arc> arcs_;
  bool whole_neumann_ = false;
};

inline Partition extend_arc(const Partition& p, std::size_t arc_index, double delta) {
  return p.extended(arc_index, delta);
}

// A point strictly inside the domain bounded by the curve.
struct PointInDomain {
  Vec2 p;
  PointInDomain(const Curve& curve, Vec2 point, double boundary_floor = 0.0) : p(point) {
    if (!curve.contains(p))
      throw std::invalid_argument("point is not inside the domain");
    if (boundary_floor > 0.0 && curve.boundary_distance(p) < boundary_floor)
      throw std::invalid_argument("point is too close to the boundary");
  }
};

}  // namespace zaremba
