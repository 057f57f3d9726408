#ifndef RODLAB_CURVE_HPP
#define RODLAB_CURVE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "rodlab/errors.hpp"
#include "rodlab/vec2.hpp"

namespace rodlab {

/// Planar polyline parametrized over [0, 1]: affine on each breakpoint
/// interval, vertices at the breakpoints.
class PolylineCurve {
public:
  PolylineCurve(std::vector<double> breakpoints, std::vector<Vec2> vertices)
      : bp_(std::move(breakpoints)), vx_(std::move(vertices)) {
    if (bp_.size() < 2 || bp_.size() != vx_.size())
      throw precondition_error("curve needs matching breakpoints/vertices, >= 2");
    if (bp_.front() != 0.0 || bp_.back() != 1.0)
      throw precondition_error("curve breakpoints must span [0, 1]");
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i)
      if (!(bp_[i] < bp_[i + 1]))
        throw precondition_error("curve breakpoints must be strictly increasing");
    for (const Vec2& v : vx_)
      if (!std::isfinite(v.x) || !std::isfinite(v.y))
        throw precondition_error("curve vertices must be finite");
  }

  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<Vec2>& vertices() const { return vx_; }
  std::size_t num_segments() const { return bp_.size() - 1; }

  /// Index i with t in [bp_[i], bp_[i+1]); the last segment owns t = 1.
  std::size_t segment_index(double t) const {
    if (t < 0.0 || t > 1.0)
      throw precondition_error("curve parameter outside [0, 1]");
    auto it = std::upper_bound(bp_.begin(), bp_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - bp_.begin());
    if (i > 0) --i;
    if (i >= num_segments()) i = num_segments() - 1;
    return i;
  }

  Vec2 eval(double t) const {
    std::size_t i = segment_index(t);
    double s = (t - bp_[i]) / (bp_[i + 1] - bp_[i]);
    return (1.0 - s) * vx_[i] + s * vx_[i + 1];
  }

  /// Per-segment constant slope dy/dt.
  Vec2 slope(std::size_t i) const {
    return (vx_[i + 1] - vx_[i]) / (bp_[i + 1] - bp_[i]);
  }

  /// Right-limit convention at breakpoints; left limit at t = 1.
  Vec2 derivative(double t) const {
    std::size_t i = segment_index(t);
    return slope(i);
  }

  double segment_length(std::size_t i) const { return dist(vx_[i], vx_[i + 1]); }

  /// Total variation (parametric length) sum |y_{i+1} - y_i|.
  double length() const {
    double s = 0.0;
    for (std::size_t i = 0; i < num_segments(); ++i) s += segment_length(i);
    return s;
  }

  void bounding_box(Vec2& lo, Vec2& hi) const {
    lo = hi = vx_[0];
    for (const Vec2& v : vx_) {
      lo.x = std::min(lo.x, v.x);
      lo.y = std::min(lo.y, v.y);
      hi.x = std::max(hi.x, v.x);
      hi.y = std::max(hi.y, v.y);
    }
  }

  double sup_norm() const {
    double m = 0.0;
    for (const Vec2& v : vx_) m = std::max(m, norm(v));
    return m;
  }

private:
  std::vector<double> bp_;
  std::vector<Vec2> vx_;
};

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by
/// Newton iteration on the Legendre recurrence.
inline const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre(int n) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>>
      cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::fabs(dt) < 1e-16) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  auto res = cache.emplace(n, std::make_pair(std::move(x), std::move(w)));
  return res.first->second;
}

template <typename F>
double gauss_on(const F& f, double a, double b, int n) {
  const auto& [x, w] = gauss_legendre(n);
  double mid = 0.5 * (a + b), hal = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += w[i] * f(mid + hal * x[i]);
  return s * hal;
}

template <typename F>
double adaptive_gauss(const F& f, double a, double b, double tol, int depth) {
  double c7 = gauss_on(f, a, b, 7);
  double c15 = gauss_on(f, a, b, 15);
  if (std::fabs(c15 - c7) <= tol || depth >= 40) return c15;
  double m = 0.5 * (a + b);
  return adaptive_gauss(f, a, m, 0.5 * tol, depth + 1) +
         adaptive_gauss(f, m, b, 0.5 * tol, depth + 1);
}

/// Integral of |d0 + s*v|^p over [0, h].  For even p the integrand is a
/// polynomial of degree p in s and the fixed-order rule is exact; otherwise
/// adaptive quadrature to tolerance 1e-12, split at the nearest-approach
/// point so each half is smooth.
inline double lp_segment_integral(Vec2 d0, Vec2 v, double h, double p) {
  auto ipart = [&](double s) {
    return std::pow(norm2(d0 + s * v), 0.5 * p);
  };
  bool even = (p == std::floor(p)) && (static_cast<long>(p) % 2 == 0);
  if (even) {
    int n = static_cast<int>(p) / 2 + 1;
    return gauss_on(ipart, 0.0, h, n);
  }
  double tol = 1e-12 * std::max(1.0, h * std::pow(norm(d0) + norm(v), p));
  double split = -1.0;
  if (norm2(v) > 0.0) split = -dot(d0, v) / norm2(v);
  if (split > 0.0 && split < h)
    return adaptive_gauss(ipart, 0.0, split, 0.5 * tol, 0) +
           adaptive_gauss(ipart, split, h, 0.5 * tol, 0);
  return adaptive_gauss(ipart, 0.0, h, tol, 0);
}

inline std::vector<double> merged_breakpoints(const PolylineCurve& a,
                                              const PolylineCurve& b) {
  std::vector<double> m;
  m.reserve(a.breakpoints().size() + b.breakpoints().size());
  std::merge(a.breakpoints().begin(), a.breakpoints().end(),
             b.breakpoints().begin(), b.breakpoints().end(),
             std::back_inserter(m));
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return m;
}

}  // namespace detail

/// W^{1,p} distance (|a-b|_Lp^p + |a'-b'|_Lp^p)^{1/p}; p >= 1.
inline double sobolev_distance(const PolylineCurve& a, const PolylineCurve& b,
                               double p) {
  if (p < 1.0) throw precondition_error("sobolev_distance requires p >= 1");
  std::vector<double> grid = detail::merged_breakpoints(a, b);
  double pos = 0.0, der = 0.0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    double t0 = grid[i], t1 = grid[i + 1], h = t1 - t0;
    Vec2 d0 = a.eval(t0) - b.eval(t0);
    Vec2 da = a.derivative(t0), db = b.derivative(t0);
    Vec2 dv = da - db;
    pos += detail::lp_segment_integral(d0, dv, h, p);
    der += std::pow(norm2(dv), 0.5 * p) * h;
  }
  return std::pow(pos + der, 1.0 / p);
}

/// Uniform distance; exact for polylines (per-segment max sits at an
/// endpoint of the merged refinement).
inline double c0_distance(const PolylineCurve& a, const PolylineCurve& b) {
  std::vector<double> grid = detail::merged_breakpoints(a, b);
  double m = 0.0;
  for (double t : grid) m = std::max(m, dist(a.eval(t), b.eval(t)));
  return m;
}

/// Same image and orientation, breakpoints proportional to arclength.
/// Zero-length segments are dropped; a curve of zero total length has no
/// constant-speed parametrization.
inline PolylineCurve constant_speed_reparam(const PolylineCurve& c) {
  double total = c.length();
  if (total <= 0.0)
    throw precondition_error("constant-speed reparametrization needs positive length");
  std::vector<double> bp;
  std::vector<Vec2> vx;
  bp.push_back(0.0);
  vx.push_back(c.vertices().front());
  double acc = 0.0;
  for (std::size_t i = 0; i < c.num_segments(); ++i) {
    double l = c.segment_length(i);
    if (l == 0.0) continue;
    acc += l;
    bp.push_back(acc / total);
    vx.push_back(c.vertices()[i + 1]);
  }
  bp.back() = 1.0;
  return PolylineCurve(std::move(bp), std::move(vx));
}

/// Integral of |c'|^p (exact: slopes are piecewise constant).
inline double dirichlet_energy(const PolylineCurve& c, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.num_segments(); ++i) {
    double h = c.breakpoints()[i + 1] - c.breakpoints()[i];
    s += std::pow(norm2(c.slope(i)), 0.5 * p) * h;
  }
  return s;
}

}  // namespace rodlab

#endif  // RODLAB_CURVE_HPP
