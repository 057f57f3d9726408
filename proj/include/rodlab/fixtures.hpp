#ifndef RODLAB_FIXTURES_HPP
#define RODLAB_FIXTURES_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "rodlab/curve.hpp"
#include "rodlab/errors.hpp"
#include "rodlab/geometry.hpp"
#include "rodlab/rng.hpp"
#include "rodlab/vec2.hpp"

namespace rodlab::fixtures {

namespace detail {

inline std::vector<double> uniform_breaks(std::size_t nseg) {
  std::vector<double> bp(nseg + 1);
  for (std::size_t i = 0; i <= nseg; ++i)
    bp[i] = static_cast<double>(i) / static_cast<double>(nseg);
  bp.back() = 1.0;
  return bp;
}

inline PolylineCurve from_vertices(const std::vector<Vec2>& vx) {
  return PolylineCurve(uniform_breaks(vx.size() - 1), vx);
}

}  // namespace detail

inline PolylineCurve straight() {
  return detail::from_vertices({{0.0, 0.0}, {1.0, 0.0}});
}

/// Out and back along the same segment: violates the 1-D non-interpenetration
/// inequality (length 2 over an image of measure 1) yet is approximable by
/// injective curves.
inline PolylineCurve fold() {
  return detail::from_vertices({{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}});
}

/// One transversal self-crossing; parametric length and image measure agree.
inline PolylineCurve x_crossing() {
  return detail::from_vertices({{0.0, 0.0}, {1.0, 1.0}, {1.0, 0.0}, {0.0, 1.0}});
}

/// A later vertex lands on the interior of an earlier segment without
/// crossing it.
inline PolylineCurve tangential_touch() {
  return detail::from_vertices(
      {{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {1.0, 0.0}, {0.0, 2.0}});
}

inline PolylineCurve w_zigzag() {
  return detail::from_vertices(
      {{0.0, 0.0}, {0.25, 1.0}, {0.5, 0.0}, {0.75, 1.0}, {1.0, 0.0}});
}

/// Closed curve tracing a rectangle whose top edge is run three times and
/// carries two triangular horns; winding number 1 inside the rectangle and
/// inside both horns, 0 outside.
inline PolylineCurve horned_devil() {
  return detail::from_vertices({{3.5, -3.0},
                                {7.0, -3.0},
                                {7.0, 0.0},
                                {5.4, 0.0},
                                {5.0, 2.9},
                                {4.6, 0.0},
                                {0.2, 0.0},
                                {6.8, 0.0},
                                {2.6, 0.0},
                                {2.2, 2.9},
                                {1.8, 0.0},
                                {0.0, 0.0},
                                {0.0, -3.0},
                                {3.5, -3.0}});
}

/// Two unit-length vertical arms a distance `gap` apart joined by a short
/// base; breakpoints give the base a tenth of the parameter interval.
inline PolylineCurve u_shape(double gap = 0.1) {
  if (!(gap > 0.0)) throw precondition_error("arm gap must be positive");
  return PolylineCurve({0.0, 0.45, 0.55, 1.0},
                       {{0.0, 1.0}, {0.0, 0.0}, {gap, 0.0}, {gap, 1.0}});
}

/// k-th member of the flat-middle family: speed 1/k outside the middle window
/// [1/2 - 1/k, 1/2 + 1/k] and k/2 inside, second component zero.
inline PolylineCurve simple_seq(std::size_t k) {
  if (k < 3) throw precondition_error("family index must be at least 3");
  const double dk = static_cast<double>(k);
  const double a = 0.5 - 1.0 / dk, b = 0.5 + 1.0 / dk;
  const double slow = a / dk;  // displacement of each slow stretch
  return PolylineCurve({0.0, a, b, 1.0}, {{0.0, 0.0},
                                          {slow, 0.0},
                                          {slow + 1.0, 0.0},
                                          {2.0 * slow + 1.0, 0.0}});
}

/// x-monotone random walk: injective by construction.
inline PolylineCurve random_injective(Rng& rng, std::size_t nseg) {
  if (nseg < 1) throw precondition_error("need at least one segment");
  std::vector<Vec2> vx{{0.0, 0.0}};
  for (std::size_t i = 0; i < nseg; ++i) {
    const double dx = rng.uniform(0.2, 1.0);
    const double dy = rng.uniform(-1.0, 1.0);
    vx.push_back(vx.back() + Vec2{dx, dy});
  }
  const double sx = vx.back().x;
  for (Vec2& v : vx) v = (1.0 / sx) * v;
  return detail::from_vertices(vx);
}

/// Unconstrained random walk, retried until it has at least one transversal
/// self-crossing.
inline PolylineCurve random_transversal(Rng& rng, std::size_t nseg,
                                        int max_tries = 400) {
  if (nseg < 3) throw precondition_error("need at least three segments");
  for (int tr = 0; tr < max_tries; ++tr) {
    std::vector<Vec2> vx{{0.0, 0.0}};
    for (std::size_t i = 0; i < nseg; ++i)
      vx.push_back(vx.back() + rng.uniform(0.3, 1.0) * rng.unit_vec());
    PolylineCurve c = detail::from_vertices(vx);
    const IntersectionReport rep = self_intersections(c);
    for (const Violation& v : rep.violations) {
      if (v.kind == ViolationKind::crossing) return c;
    }
  }
  throw construction_error("no crossing appeared within the retry budget");
}

inline PolylineCurve by_name(const std::string& name) {
  if (name == "straight") return straight();
  if (name == "fold") return fold();
  if (name == "x_crossing") return x_crossing();
  if (name == "tangential_touch") return tangential_touch();
  if (name == "w_zigzag") return w_zigzag();
  if (name == "horned_devil") return horned_devil();
  if (name == "u_shape") return u_shape();
  if (name == "simple8") return simple_seq(8);
  throw precondition_error("unknown fixture: " + name);
}

inline std::vector<std::string> names() {
  return {"straight",         "fold",    "x_crossing", "tangential_touch",
          "w_zigzag",         "horned_devil", "u_shape", "simple8"};
}

}  // namespace rodlab::fixtures

#endif  // RODLAB_FIXTURES_HPP
