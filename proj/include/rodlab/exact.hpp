#ifndef RODLAB_EXACT_HPP
#define RODLAB_EXACT_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "rodlab/vec2.hpp"

namespace rodlab {

/// Arbitrary-precision rational.  Construction from double is exact (every
/// finite double is a dyadic rational), so predicates evaluated over Rat are
/// exact statements about the stored coordinates.
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

struct RPoint {
  Rat x;
  Rat y;

  RPoint() = default;
  RPoint(Rat px, Rat py) : x(std::move(px)), y(std::move(py)) {}
  explicit RPoint(Vec2 v) : x(v.x), y(v.y) {}

  Vec2 approx() const { return {to_double(x), to_double(y)}; }
  friend bool operator==(const RPoint& a, const RPoint& b) {
    return a.x == b.x && a.y == b.y;
  }
  friend bool operator!=(const RPoint& a, const RPoint& b) {
    return !(a == b);
  }
};

inline int sign(const Rat& r) {
  if (r > 0) return 1;
  if (r < 0) return -1;
  return 0;
}

/// Exact sign of cross(b - a, c - a): +1 if a,b,c counterclockwise.
inline int orientation(const RPoint& a, const RPoint& b, const RPoint& c) {
  Rat det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return sign(det);
}

/// Orientation with a floating-point fast path.  The static filter constant
/// is the standard forward-error bound for the 2x2 determinant; ambiguous
/// cases fall back to exact arithmetic.
inline int orientation_filtered(Vec2 a, Vec2 b, Vec2 c) {
  double l = (b.x - a.x) * (c.y - a.y);
  double r = (b.y - a.y) * (c.x - a.x);
  double det = l - r;
  double mag = std::fabs(l) + std::fabs(r);
  constexpr double kFilter = 3.3306690738754716e-16;
  if (det > kFilter * mag) return 1;
  if (det < -kFilter * mag) return -1;
  if (mag == 0.0) return 0;
  return orientation(RPoint(a), RPoint(b), RPoint(c));
}

inline Rat sq(const Rat& r) { return r * r; }

inline Rat dist2(const RPoint& a, const RPoint& b) {
  return sq(a.x - b.x) + sq(a.y - b.y);
}

/// True if c lies on the closed segment [a, b] (collinearity included).
inline bool on_segment(const RPoint& a, const RPoint& b, const RPoint& c) {
  if (orientation(a, b, c) != 0) return false;
  if (a.x != b.x)
    return (std::min(a.x, b.x) <= c.x) && (c.x <= std::max(a.x, b.x));
  return (std::min(a.y, b.y) <= c.y) && (c.y <= std::max(a.y, b.y));
}

enum class SegXKind {
  none,     ///< disjoint
  proper,   ///< transversal crossing at one interior-ish point
  touch,    ///< single shared point, not a transversal crossing
  overlap,  ///< collinear segments sharing more than one point
};

struct SegX {
  SegXKind kind = SegXKind::none;
  RPoint point;      ///< proper/touch: the shared point
  RPoint overlap_a;  ///< overlap: endpoints of the shared subsegment
  RPoint overlap_b;
};

/// Exact classification of the intersection of segments [p1,p2] and [q1,q2].
inline SegX segment_intersection(const RPoint& p1, const RPoint& p2,
                                 const RPoint& q1, const RPoint& q2) {
  SegX out;
  int o1 = orientation(p1, p2, q1);
  int o2 = orientation(p1, p2, q2);
  int o3 = orientation(q1, q2, p1);
  int o4 = orientation(q1, q2, p2);

  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    // All collinear (this also covers degenerate zero-length inputs).
    bool use_x = (p1.x != p2.x) || (q1.x != q2.x);
    auto key = [&](const RPoint& p) { return use_x ? p.x : p.y; };
    const RPoint* plo = key(p1) <= key(p2) ? &p1 : &p2;
    const RPoint* phi = key(p1) <= key(p2) ? &p2 : &p1;
    const RPoint* qlo = key(q1) <= key(q2) ? &q1 : &q2;
    const RPoint* qhi = key(q1) <= key(q2) ? &q2 : &q1;
    const RPoint* lo = key(*plo) >= key(*qlo) ? plo : qlo;  // max of mins
    const RPoint* hi = key(*phi) <= key(*qhi) ? phi : qhi;  // min of maxs
    if (key(*lo) > key(*hi)) return out;
    if (key(*lo) == key(*hi)) {
      out.kind = SegXKind::touch;
      out.point = *lo;
      return out;
    }
    out.kind = SegXKind::overlap;
    out.overlap_a = *lo;
    out.overlap_b = *hi;
    return out;
  }

  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) {
    out.kind = SegXKind::proper;
    Rat denom = (p2.x - p1.x) * (q2.y - q1.y) - (p2.y - p1.y) * (q2.x - q1.x);
    Rat t = ((q1.x - p1.x) * (q2.y - q1.y) - (q1.y - p1.y) * (q2.x - q1.x)) /
            denom;
    out.point = RPoint(p1.x + t * (p2.x - p1.x), p1.y + t * (p2.y - p1.y));
    return out;
  }

  // Some orientation vanishes: possible single-point touch at an endpoint.
  if (o1 == 0 && on_segment(p1, p2, q1)) {
    out.kind = SegXKind::touch;
    out.point = q1;
    return out;
  }
  if (o2 == 0 && on_segment(p1, p2, q2)) {
    out.kind = SegXKind::touch;
    out.point = q2;
    return out;
  }
  if (o3 == 0 && on_segment(q1, q2, p1)) {
    out.kind = SegXKind::touch;
    out.point = p1;
    return out;
  }
  if (o4 == 0 && on_segment(q1, q2, p2)) {
    out.kind = SegXKind::touch;
    out.point = p2;
    return out;
  }
  return out;
}

/// Exact squared distance from point w to the closed segment [a, b].
inline Rat segment_dist2(const RPoint& a, const RPoint& b, const RPoint& w) {
  Rat ux = b.x - a.x, uy = b.y - a.y;
  Rat len2 = ux * ux + uy * uy;
  if (len2 == 0) return dist2(a, w);
  Rat s = ((w.x - a.x) * ux + (w.y - a.y) * uy) / len2;
  if (s <= 0) return dist2(a, w);
  if (s >= 1) return dist2(b, w);
  Rat cx = (w.x - a.x) * uy - (w.y - a.y) * ux;
  return cx * cx / len2;
}

/// Renders r as a decimal string with enough digits to round-trip the
/// nearest double, plus an exact "num/den" form for certificates.
inline std::string rat_decimal(const Rat& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", to_double(r));
  return std::string(buf);
}

inline std::string rat_exact(const Rat& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace rodlab

#endif  // RODLAB_EXACT_HPP
