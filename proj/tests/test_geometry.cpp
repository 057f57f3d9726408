#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <rodlab/fixtures.hpp>
#include <rodlab/geometry.hpp>
#include <rodlab/rng.hpp>

#include "oracle_geometry.hpp"

using namespace rodlab;
using Catch::Approx;

namespace {

void compare_with_oracle(const PolylineCurve& c) {
  std::string why;
  const bool ok = oracle::matches_library(c, &why);
  INFO(why);
  REQUIRE(ok);
}

PolylineCurve random_walk(Rng& rng, std::size_t nseg, bool lattice) {
  return oracle::random_walk(rng, nseg, lattice);
}

}  // namespace

TEST_CASE("self_intersections matches the quadratic oracle on fixtures",
          "[geometry]") {
  for (const std::string& name : fixtures::names())
    compare_with_oracle(fixtures::by_name(name));
}

TEST_CASE("self_intersections matches the quadratic oracle on random walks",
          "[geometry]") {
  Rng rng(2024);
  for (int it = 0; it < 200; ++it)
    compare_with_oracle(random_walk(rng, 3 + rng.below(28), false));
  for (int it = 0; it < 200; ++it)
    compare_with_oracle(random_walk(rng, 3 + rng.below(28), true));
}

TEST_CASE("self_intersections reports hand-checked violations", "[geometry]") {
  IntersectionReport fold = self_intersections(fixtures::fold());
  REQUIRE_FALSE(fold.injective);
  REQUIRE(fold.violations.size() == 1);
  REQUIRE(fold.violations[0].kind == ViolationKind::overlap);
  REQUIRE(fold.violations[0].seg_a == 0);
  REQUIRE(fold.violations[0].seg_b == 1);

  IntersectionReport cross = self_intersections(fixtures::x_crossing());
  REQUIRE(cross.violations.size() == 1);
  REQUIRE(cross.violations[0].kind == ViolationKind::crossing);
  REQUIRE(cross.violations[0].witness == RPoint(Rat(1) / 2, Rat(1) / 2));

  IntersectionReport touch = self_intersections(fixtures::tangential_touch());
  REQUIRE(touch.violations.size() == 2);
  for (const Violation& v : touch.violations) {
    REQUIRE(v.kind == ViolationKind::touch);
    REQUIRE(v.witness == RPoint(Rat(1), Rat(0)));
  }

  // Closed square: the closure point is not a violation.
  PolylineCurve square({0.0, 0.25, 0.5, 0.75, 1.0},
                       {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {0.0, 0.0}});
  REQUIRE(self_intersections(square).injective);
}

TEST_CASE("image_length counts retraced portions once", "[geometry]") {
  REQUIRE(image_length(fixtures::fold()) == Approx(1.0));
  REQUIRE(image_length(fixtures::x_crossing()) ==
          Approx(1.0 + 2.0 * std::sqrt(2.0)));

  // Two passes over [0,3] along x with overlapping sweeps.
  PolylineCurve retrace(
      {0.0, 0.4, 0.6, 1.0},
      {{0.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}});
  REQUIRE(retrace.length() == Approx(5.0));
  REQUIRE(image_length(retrace) == Approx(3.0));

  PolylineCurve diag(
      {0.0, 0.4, 0.6, 1.0},
      {{0.0, 0.0}, {2.0, 2.0}, {1.0, 1.0}, {3.0, 3.0}});
  REQUIRE(image_length(diag) == Approx(3.0 * std::sqrt(2.0)));
}

TEST_CASE("winding_degree counts signed crossings exactly", "[geometry]") {
  PolylineCurve square({0.0, 0.25, 0.5, 0.75, 1.0},
                       {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {0.0, 0.0}});
  REQUIRE(winding_degree(square, {0.5, 0.5}) == 1);
  REQUIRE(winding_degree(square, {2.0, 2.0}) == 0);

  PolylineCurve cw({0.0, 0.25, 0.5, 0.75, 1.0},
                   {{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}, {0.0, 0.0}});
  REQUIRE(winding_degree(cw, {0.5, 0.5}) == -1);

  PolylineCurve devil = fixtures::horned_devil();
  REQUIRE(winding_degree(devil, {3.5, -1.0}) == 1);
  REQUIRE(winding_degree(devil, {5.0, 2.0}) == 1);
  REQUIRE(winding_degree(devil, {2.2, 2.0}) == 1);
  REQUIRE(winding_degree(devil, {3.5, 0.5}) == 0);
  REQUIRE(winding_degree(devil, {8.0, 0.0}) == 0);

  REQUIRE_THROWS_AS(winding_degree(fixtures::straight(), {0.5, 0.5}),
                    precondition_error);
  REQUIRE_THROWS_AS(winding_degree(square, {0.5, 0.0}), precondition_error);
}

TEST_CASE("degree_map leaves a band near the image undefined", "[geometry]") {
  PolylineCurve square({0.0, 0.25, 0.5, 0.75, 1.0},
                       {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {0.0, 0.0}});
  DegreeMap map = degree_map(square, {-0.5, -0.5}, {1.5, 1.5}, 21, 21, 0.05);
  std::size_t inside = 0, outside = 0, undefined = 0;
  for (std::size_t iy = 0; iy < map.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.nx; ++ix) {
      const auto& v = map.values[iy * map.nx + ix];
      if (!v) {
        ++undefined;
        continue;
      }
      Vec2 s = map.sample(ix, iy);
      bool in = s.x > 0.0 && s.x < 1.0 && s.y > 0.0 && s.y < 1.0;
      REQUIRE(*v == (in ? 1 : 0));
      if (in) ++inside;
      else ++outside;
    }
  }
  REQUIRE(inside > 0);
  REQUIRE(outside > 0);
  REQUIRE(undefined > 0);  // grid lines land exactly on the square's edges
  REQUIRE_THROWS_AS(degree_map(square, {0.0, 0.0}, {0.0, 1.0}, 8, 8, 0.1),
                    precondition_error);
}

TEST_CASE("find_injective_witness certifies the three outcomes", "[geometry]") {
  WitnessResult self = find_injective_witness(fixtures::straight(), 1e-3);
  REQUIRE(self.status == WitnessStatus::witness_found);
  REQUIRE(self.c0_gap == 0.0);

  WitnessResult cross = find_injective_witness(fixtures::x_crossing(), 1e-3);
  REQUIRE(cross.status == WitnessStatus::interpenetration_detected);
  REQUIRE(cross.obstruction.has_value());
  REQUIRE(cross.obstruction_radius > 0.0);

  WitnessResult fold = find_injective_witness(fixtures::fold(), 1e-3);
  REQUIRE(fold.status == WitnessStatus::witness_found);
  REQUIRE(fold.witness.has_value());
  REQUIRE(self_intersections(*fold.witness).injective);
  REQUIRE(fold.c0_gap <= 1e-3);

  WitnessResult devil = find_injective_witness(fixtures::horned_devil(), 1e-3);
  REQUIRE(devil.status != WitnessStatus::witness_found);

  REQUIRE_THROWS_AS(find_injective_witness(fixtures::fold(), 0.0),
                    precondition_error);
}

TEST_CASE("crossing_clearance measures the free ball at a crossing",
          "[geometry]") {
  PolylineCurve xc = fixtures::x_crossing();
  IntersectionReport rep = self_intersections(xc);
  REQUIRE(rep.violations.size() == 1);
  double r = detail::crossing_clearance(xc, rep.violations[0]);
  // nearest feature is the middle segment x = 1 at distance 1/2
  REQUIRE(r == Approx(0.5));
}
