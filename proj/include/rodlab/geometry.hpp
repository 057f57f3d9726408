#ifndef RODLAB_GEOMETRY_HPP
#define RODLAB_GEOMETRY_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "rodlab/curve.hpp"
#include "rodlab/errors.hpp"
#include "rodlab/exact.hpp"
#include "rodlab/rng.hpp"
#include "rodlab/vec2.hpp"

namespace rodlab {

enum class ViolationKind { crossing, touch, overlap };

struct Violation {
  ViolationKind kind = ViolationKind::crossing;
  std::size_t seg_a = 0;
  std::size_t seg_b = 0;
  RPoint witness;    ///< crossing/touch point; midpoint of overlap range
  RPoint overlap_a;  ///< overlap only: endpoints of the shared subsegment
  RPoint overlap_b;
};

struct IntersectionReport {
  bool injective = true;
  std::vector<Violation> violations;
};

namespace detail {

inline std::vector<RPoint> exact_vertices(const PolylineCurve& c) {
  std::vector<RPoint> out;
  out.reserve(c.vertices().size());
  for (const Vec2& v : c.vertices()) out.emplace_back(v);
  return out;
}

inline bool curve_is_closed(const PolylineCurve& c) {
  return c.vertices().front() == c.vertices().back();
}

/// Classify one segment pair of a chain; consecutive segments may share
/// their common vertex, a closed chain may share the closure point.
inline std::optional<Violation> classify_pair(const std::vector<RPoint>& v,
                                              std::size_t i, std::size_t j,
                                              bool closed) {
  const RPoint &a0 = v[i], &a1 = v[i + 1], &b0 = v[j], &b1 = v[j + 1];
  SegX x = segment_intersection(a0, a1, b0, b1);
  if (x.kind == SegXKind::none) return std::nullopt;

  bool consecutive = (j == i + 1);
  bool closure_pair = closed && i == 0 && j + 2 == v.size();
  Violation out;
  out.seg_a = i;
  out.seg_b = j;
  switch (x.kind) {
    case SegXKind::proper:
      out.kind = ViolationKind::crossing;
      out.witness = x.point;
      return out;
    case SegXKind::touch:
      if (consecutive && x.point == a1) return std::nullopt;
      if (closure_pair && x.point == a0 && x.point == b1) return std::nullopt;
      out.kind = ViolationKind::touch;
      out.witness = x.point;
      return out;
    case SegXKind::overlap:
      out.kind = ViolationKind::overlap;
      out.overlap_a = x.overlap_a;
      out.overlap_b = x.overlap_b;
      out.witness = RPoint((x.overlap_a.x + x.overlap_b.x) / 2,
                           (x.overlap_a.y + x.overlap_b.y) / 2);
      return out;
    default:
      return std::nullopt;
  }
}

}  // namespace detail

/// Exact self-intersection report for the polyline image as a parametrized
/// map.  Segment pairs are pruned by an interval sweep over x with bounding
/// box rejection; surviving pairs are classified exactly.  Zero-length
/// segments are reported as degenerate overlaps.
inline IntersectionReport self_intersections(const PolylineCurve& c) {
  IntersectionReport rep;
  const std::size_t m = c.num_segments();
  const std::vector<Vec2>& vx = c.vertices();
  std::vector<RPoint> rv = detail::exact_vertices(c);
  bool closed = detail::curve_is_closed(c);

  for (std::size_t i = 0; i < m; ++i) {
    if (vx[i] == vx[i + 1]) {
      Violation deg;
      deg.kind = ViolationKind::overlap;
      deg.seg_a = deg.seg_b = i;
      deg.witness = rv[i];
      deg.overlap_a = deg.overlap_b = rv[i];
      rep.violations.push_back(deg);
    }
  }

  struct Entry {
    double xmin, xmax, ymin, ymax;
    std::size_t idx;
  };
  std::vector<Entry> order(m);
  for (std::size_t i = 0; i < m; ++i) {
    order[i] = {std::min(vx[i].x, vx[i + 1].x), std::max(vx[i].x, vx[i + 1].x),
                std::min(vx[i].y, vx[i + 1].y), std::max(vx[i].y, vx[i + 1].y),
                i};
  }
  std::sort(order.begin(), order.end(),
            [](const Entry& a, const Entry& b) { return a.xmin < b.xmin; });

  std::vector<std::pair<std::size_t, std::size_t>> hits;
  std::vector<Entry> active;
  for (const Entry& e : order) {
    active.erase(std::remove_if(active.begin(), active.end(),
                                [&](const Entry& a) { return a.xmax < e.xmin; }),
                 active.end());
    for (const Entry& a : active) {
      if (a.ymin > e.ymax || a.ymax < e.ymin) continue;
      std::size_t i = std::min(a.idx, e.idx), j = std::max(a.idx, e.idx);
      hits.emplace_back(i, j);
    }
    active.push_back(e);
  }
  std::sort(hits.begin(), hits.end());
  for (auto [i, j] : hits) {
    auto v = detail::classify_pair(rv, i, j, closed);
    if (v) rep.violations.push_back(*v);
  }
  std::sort(rep.violations.begin(), rep.violations.end(),
            [](const Violation& a, const Violation& b) {
              return std::tie(a.seg_a, a.seg_b) < std::tie(b.seg_a, b.seg_b);
            });
  rep.injective = rep.violations.empty();
  return rep;
}

/// 1-D Hausdorff measure of the image: segments are grouped by their exact
/// supporting line and per-line parameter intervals are merged, so retraced
/// portions count once.
inline double image_length(const PolylineCurve& c) {
  using Int = boost::multiprecision::cpp_int;
  struct LineKey {
    Int a, b, cc;
    bool operator<(const LineKey& o) const {
      return std::tie(a, b, cc) < std::tie(o.a, o.b, o.cc);
    }
  };
  std::vector<RPoint> rv = detail::exact_vertices(c);
  // Per line: 1-D intervals in the dominant coordinate plus the metric
  // factor |d| / |d_axis| needed to convert coordinate spans to lengths.
  struct LineData {
    bool use_x = true;
    double factor = 1.0;
    std::vector<std::pair<Rat, Rat>> iv;
  };
  std::map<LineKey, LineData> lines;

  for (std::size_t i = 0; i < c.num_segments(); ++i) {
    const RPoint &p = rv[i], &q = rv[i + 1];
    Rat dx = q.x - p.x, dy = q.y - p.y;
    if (dx == 0 && dy == 0) continue;
    // Line through p with normal (-dy, dx):  -dy*x + dx*y = c0.
    Rat A = -dy, B = dx, C = A * p.x + B * p.y;
    Int da = denominator(A), db = denominator(B), dc = denominator(C);
    Int mult = lcm(lcm(da, db), dc);
    Int ia = numerator(A) * (mult / da);
    Int ib = numerator(B) * (mult / db);
    Int ic = numerator(C) * (mult / dc);
    Int g = gcd(gcd(abs(ia), abs(ib)), abs(ic));
    if (g != 0) {
      ia /= g;
      ib /= g;
      ic /= g;
    }
    if (ia < 0 || (ia == 0 && ib < 0)) {
      ia = -ia;
      ib = -ib;
      ic = -ic;
    }
    LineKey key{ia, ib, ic};
    auto& data = lines[key];
    bool use_x = abs(dx) >= abs(dy);
    if (data.iv.empty()) {
      data.use_x = use_x;
      double ddx = to_double(dx), ddy = to_double(dy);
      double len = std::hypot(ddx, ddy);
      data.factor = len / std::fabs(data.use_x ? ddx : ddy);
    }
    Rat lo = data.use_x ? std::min(p.x, q.x) : std::min(p.y, q.y);
    Rat hi = data.use_x ? std::max(p.x, q.x) : std::max(p.y, q.y);
    data.iv.emplace_back(std::move(lo), std::move(hi));
  }

  double total = 0.0;
  for (auto& [key, data] : lines) {
    std::sort(data.iv.begin(), data.iv.end());
    Rat covered = 0;
    Rat cur_lo = data.iv.front().first, cur_hi = data.iv.front().second;
    for (std::size_t i = 1; i < data.iv.size(); ++i) {
      if (data.iv[i].first <= cur_hi) {
        cur_hi = std::max(cur_hi, data.iv[i].second);
      } else {
        covered += cur_hi - cur_lo;
        cur_lo = data.iv[i].first;
        cur_hi = data.iv[i].second;
      }
    }
    covered += cur_hi - cur_lo;
    total += to_double(covered) * data.factor;
  }
  return total;
}

/// Topological degree (winding number) of a closed curve about a point not
/// on its image; exact signed upward/downward crossing count.
inline int winding_degree(const PolylineCurve& c, Vec2 point) {
  if (!detail::curve_is_closed(c))
    throw precondition_error("winding_degree needs a closed curve");
  std::vector<RPoint> rv = detail::exact_vertices(c);
  RPoint w(point);
  for (std::size_t i = 0; i < c.num_segments(); ++i)
    if (on_segment(rv[i], rv[i + 1], w))
      throw precondition_error("winding_degree undefined on the curve image");
  int wind = 0;
  for (std::size_t i = 0; i < c.num_segments(); ++i) {
    const RPoint &a = rv[i], &b = rv[i + 1];
    if (a.y <= w.y && w.y < b.y && orientation(a, b, w) > 0) ++wind;
    if (b.y <= w.y && w.y < a.y && orientation(a, b, w) < 0) --wind;
  }
  return wind;
}

struct DegreeMap {
  std::size_t nx = 0, ny = 0;
  Vec2 lo, hi;
  std::vector<std::optional<int>> values;  ///< row-major, y outer

  Vec2 sample(std::size_t ix, std::size_t iy) const {
    double fx = nx > 1 ? static_cast<double>(ix) / (nx - 1) : 0.5;
    double fy = ny > 1 ? static_cast<double>(iy) / (ny - 1) : 0.5;
    return {lo.x + fx * (hi.x - lo.x), lo.y + fy * (hi.y - lo.y)};
  }
};

/// Degree sampled on a grid over [lo, hi]; samples within `band` of the
/// image (floating-point distance) are left undefined.
inline DegreeMap degree_map(const PolylineCurve& c, Vec2 lo, Vec2 hi,
                            std::size_t nx, std::size_t ny, double band) {
  if (!(lo.x < hi.x) || !(lo.y < hi.y) || nx < 2 || ny < 2)
    throw precondition_error("degree_map needs a nondegenerate grid");
  DegreeMap map;
  map.nx = nx;
  map.ny = ny;
  map.lo = lo;
  map.hi = hi;
  map.values.assign(nx * ny, std::nullopt);
  const std::vector<Vec2>& vx = c.vertices();
  std::vector<RPoint> rv = detail::exact_vertices(c);

  auto dist_to_image = [&](Vec2 s) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.num_segments(); ++i) {
      Vec2 a = vx[i], b = vx[i + 1], d = b - a;
      double l2 = norm2(d);
      double u = l2 > 0 ? std::clamp(dot(s - a, d) / l2, 0.0, 1.0) : 0.0;
      best = std::min(best, dist(s, a + u * d));
    }
    return best;
  };

  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      Vec2 s = map.sample(ix, iy);
      double d = dist_to_image(s);
      if (d <= band) continue;
      bool on_image = false;
      if (d <= 1e-9) {
        RPoint w(s);
        for (std::size_t i = 0; i < c.num_segments() && !on_image; ++i)
          on_image = on_segment(rv[i], rv[i + 1], w);
      }
      if (on_image) continue;
      map.values[iy * nx + ix] = winding_degree(c, s);
    }
  }
  return map;
}

enum class WitnessStatus { witness_found, interpenetration_detected, unknown };

struct WitnessResult {
  WitnessStatus status = WitnessStatus::unknown;
  std::optional<PolylineCurve> witness;
  double c0_gap = 0.0;
  /// Set when a stable transversal crossing certifies the obstruction.
  std::optional<Violation> obstruction;
  double obstruction_radius = 0.0;
};

namespace detail {

/// Clearance radius of a proper crossing: largest r such that B(w, r) meets
/// the curve only in the two crossing strands and contains none of their
/// endpoints.  Positive clearance makes the crossing parity stable under
/// perturbations below r/4, certifying non-approximability.
inline double crossing_clearance(const PolylineCurve& c, const Violation& v) {
  std::vector<RPoint> rv = exact_vertices(c);
  const RPoint& w = v.witness;
  Rat best2(-1);
  auto consider = [&](const Rat& d2) {
    if (best2 < 0 || d2 < best2) best2 = d2;
  };
  for (std::size_t i = 0; i < c.num_segments(); ++i) {
    if (i == v.seg_a || i == v.seg_b) continue;
    consider(segment_dist2(rv[i], rv[i + 1], w));
  }
  consider(dist2(rv[v.seg_a], w));
  consider(dist2(rv[v.seg_a + 1], w));
  consider(dist2(rv[v.seg_b], w));
  consider(dist2(rv[v.seg_b + 1], w));
  if (best2 <= 0) return 0.0;
  return std::sqrt(to_double(best2));
}

}  // namespace detail

/// Searches for an injective curve within C0 distance `tol` of c.  Already
/// injective curves witness themselves.  A proper transversal crossing with
/// positive clearance is a stable obstruction and certifies interpenetration
/// regardless of tol.  Otherwise structured tears and seeded jiggles are
/// tried within a fixed budget; exhaustion means unknown.
inline WitnessResult find_injective_witness(const PolylineCurve& c, double tol,
                                            std::uint64_t seed = 1,
                                            int budget = 200) {
  if (!(tol > 0.0)) throw precondition_error("witness tolerance must be positive");
  WitnessResult res;
  IntersectionReport rep = self_intersections(c);
  if (rep.injective) {
    res.status = WitnessStatus::witness_found;
    res.witness = c;
    res.c0_gap = 0.0;
    return res;
  }
  for (const Violation& v : rep.violations) {
    if (v.kind != ViolationKind::crossing) continue;
    double r = detail::crossing_clearance(c, v);
    if (r > 0.0) {
      res.status = WitnessStatus::interpenetration_detected;
      res.obstruction = v;
      res.obstruction_radius = 0.25 * r;
      return res;
    }
  }

  Rng rng(seed);
  const std::vector<double>& bp = c.breakpoints();
  const std::vector<Vec2>& base = c.vertices();
  for (int attempt = 0; attempt < budget; ++attempt) {
    double amp = tol * std::pow(0.5, 1 + attempt % 8);
    std::vector<Vec2> cand = base;
    if (attempt % 2 == 0) {
      // Structured tear: shift the later strand of each violation along its
      // normal; alternate the side between attempts.
      double side = (attempt % 4 == 0) ? 1.0 : -1.0;
      for (const Violation& v : rep.violations) {
        std::size_t j = v.seg_b;
        Vec2 d = base[std::min(j + 1, base.size() - 1)] - base[j];
        if (norm2(d) == 0.0) d = {1.0, 0.0};
        Vec2 n = normalized(perp(d));
        cand[j] += side * amp * n;
        if (j + 1 < cand.size()) cand[j + 1] += side * amp * n;
      }
    } else {
      for (std::size_t k = 0; k < cand.size(); ++k)
        cand[k] += amp * rng.uniform() * rng.unit_vec();
    }
    PolylineCurve w(bp, cand);
    if (!self_intersections(w).injective) continue;
    double gap = c0_distance(w, c);
    if (gap > tol) continue;
    res.status = WitnessStatus::witness_found;
    res.witness = std::move(w);
    res.c0_gap = gap;
    return res;
  }
  res.status = WitnessStatus::unknown;
  return res;
}

}  // namespace rodlab

#endif  // RODLAB_GEOMETRY_HPP
