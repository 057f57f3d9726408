#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <rodlab/curve.hpp>
#include <rodlab/errors.hpp>

using namespace rodlab;
using Catch::Approx;

namespace {

PolylineCurve right_angle() {
  return PolylineCurve({0.0, 0.5, 1.0}, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}});
}

// Independent Simpson quadrature for cross-checking the W^{1,p} integrals.
double simpson(const std::function<double(double)>& g, double a, double b,
               int cells) {
  double s = 0.0, h = (b - a) / cells;
  for (int i = 0; i < cells; ++i) {
    double x0 = a + i * h;
    s += h / 6.0 * (g(x0) + 4.0 * g(x0 + 0.5 * h) + g(x0 + h));
  }
  return s;
}

}  // namespace

TEST_CASE("curve constructor rejects malformed input", "[curve]") {
  REQUIRE_THROWS_AS(PolylineCurve({0.0, 1.0}, {{0.0, 0.0}}), precondition_error);
  REQUIRE_THROWS_AS(PolylineCurve({0.1, 1.0}, {{0.0, 0.0}, {1.0, 0.0}}),
                    precondition_error);
  REQUIRE_THROWS_AS(PolylineCurve({0.0, 0.9}, {{0.0, 0.0}, {1.0, 0.0}}),
                    precondition_error);
  REQUIRE_THROWS_AS(
      PolylineCurve({0.0, 0.5, 0.5, 1.0},
                    {{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}}),
      precondition_error);
  const double nan = std::nan("");
  REQUIRE_THROWS_AS(PolylineCurve({0.0, 1.0}, {{0.0, 0.0}, {nan, 0.0}}),
                    precondition_error);
}

TEST_CASE("eval interpolates with the last segment owning t = 1", "[curve]") {
  PolylineCurve c = right_angle();
  REQUIRE(c.eval(0.0) == Vec2{0.0, 0.0});
  REQUIRE(c.eval(0.75) == Vec2{1.0, 0.5});
  REQUIRE(c.eval(1.0) == Vec2{1.0, 1.0});
  REQUIRE(c.segment_index(0.25) == 0);
  REQUIRE(c.segment_index(0.5) == 1);
  REQUIRE(c.segment_index(1.0) == 1);
  REQUIRE_THROWS_AS(c.eval(-0.1), precondition_error);
  REQUIRE_THROWS_AS(c.eval(1.1), precondition_error);
}

TEST_CASE("slopes, lengths and boxes match hand values", "[curve]") {
  PolylineCurve c = right_angle();
  REQUIRE(c.slope(0) == Vec2{2.0, 0.0});
  REQUIRE(c.slope(1) == Vec2{0.0, 2.0});
  REQUIRE(c.derivative(0.5) == Vec2{0.0, 2.0});  // right limit at the corner
  REQUIRE(c.segment_length(0) == 1.0);
  REQUIRE(c.length() == 2.0);
  Vec2 lo, hi;
  c.bounding_box(lo, hi);
  REQUIRE(lo == Vec2{0.0, 0.0});
  REQUIRE(hi == Vec2{1.0, 1.0});
  REQUIRE(c.sup_norm() == Approx(std::sqrt(2.0)));
}

TEST_CASE("sobolev_distance reproduces closed forms", "[curve]") {
  PolylineCurve flat({0.0, 1.0}, {{0.0, 0.0}, {1.0, 0.0}});
  PolylineCurve diag({0.0, 1.0}, {{0.0, 0.0}, {1.0, 1.0}});

  REQUIRE(sobolev_distance(flat, flat, 2.0) == 0.0);
  // difference (0,t): position integral 1/3, derivative integral 1.
  REQUIRE(sobolev_distance(flat, diag, 2.0) ==
          Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-12));
  REQUIRE(sobolev_distance(flat, diag, 1.0) == Approx(1.5).epsilon(1e-12));
  REQUIRE(sobolev_distance(flat, diag, 3.0) ==
          Approx(std::cbrt(1.25)).epsilon(1e-9));

  // constant vertical offset: only the position term contributes.
  PolylineCurve lifted({0.0, 1.0}, {{0.0, 0.3}, {1.0, 0.3}});
  for (double p : {1.0, 2.0, 4.0})
    REQUIRE(sobolev_distance(flat, lifted, p) == Approx(0.3).epsilon(1e-12));

  REQUIRE_THROWS_AS(sobolev_distance(flat, diag, 0.5), precondition_error);
}

TEST_CASE("sobolev_distance agrees with independent quadrature", "[curve]") {
  PolylineCurve a({0.0, 0.4, 1.0}, {{0.0, 0.0}, {0.7, 0.2}, {1.0, 1.0}});
  PolylineCurve b({0.0, 0.6, 1.0}, {{0.1, 0.0}, {0.2, 0.9}, {1.1, 0.8}});
  for (double p : {1.0, 2.0, 3.0}) {
    double pos = simpson(
        [&](double t) { return std::pow(norm(a.eval(t) - b.eval(t)), p); }, 0.0,
        1.0, 4000);
    // integrate the derivative difference piecewise between merged breakpoints
    double der = 0.0;
    for (double lo : {0.0, 0.4, 0.6}) {
      double hi = (lo == 0.0) ? 0.4 : (lo == 0.4) ? 0.6 : 1.0;
      double mid = 0.5 * (lo + hi);
      der += (hi - lo) * std::pow(norm(a.derivative(mid) - b.derivative(mid)), p);
    }
    double expect = std::pow(pos + der, 1.0 / p);
    REQUIRE(sobolev_distance(a, b, p) == Approx(expect).epsilon(1e-5));
  }
}

TEST_CASE("c0_distance is exact on merged breakpoints", "[curve]") {
  PolylineCurve flat({0.0, 1.0}, {{0.0, 0.0}, {1.0, 0.0}});
  PolylineCurve diag({0.0, 1.0}, {{0.0, 0.0}, {1.0, 1.0}});
  PolylineCurve tent({0.0, 0.5, 1.0}, {{0.0, 0.0}, {0.5, 0.4}, {1.0, 0.0}});
  REQUIRE(c0_distance(flat, diag) == 1.0);
  REQUIRE(c0_distance(flat, tent) == 0.4);  // peak sits between flat's knots
  REQUIRE(c0_distance(tent, tent) == 0.0);
}

TEST_CASE("constant_speed_reparam equalizes speed and drops null pieces",
          "[curve]") {
  PolylineCurve c({0.0, 0.25, 1.0}, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}});
  PolylineCurve r = constant_speed_reparam(c);
  REQUIRE(r.breakpoints() == std::vector<double>{0.0, 0.5, 1.0});
  REQUIRE(norm(r.slope(0)) == Approx(norm(r.slope(1))));

  PolylineCurve skew({0.0, 0.25, 1.0}, {{0.0, 0.0}, {3.0, 0.0}, {3.0, 1.0}});
  REQUIRE(constant_speed_reparam(skew).breakpoints() ==
          std::vector<double>{0.0, 0.75, 1.0});

  PolylineCurve stall({0.0, 0.5, 1.0}, {{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
  PolylineCurve rs = constant_speed_reparam(stall);
  REQUIRE(rs.num_segments() == 1);
  REQUIRE(rs.vertices().front() == Vec2{0.0, 0.0});
  REQUIRE(rs.vertices().back() == Vec2{1.0, 0.0});

  PolylineCurve still({0.0, 1.0}, {{0.2, 0.2}, {0.2, 0.2}});
  REQUIRE_THROWS_AS(constant_speed_reparam(still), precondition_error);
}

TEST_CASE("dirichlet_energy integrates slope powers exactly", "[curve]") {
  PolylineCurve straight({0.0, 1.0}, {{0.0, 0.0}, {1.0, 0.0}});
  PolylineCurve fold({0.0, 0.5, 1.0}, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}});
  REQUIRE(dirichlet_energy(straight, 2.0) == 1.0);
  REQUIRE(dirichlet_energy(fold, 2.0) == Approx(4.0));
  REQUIRE(dirichlet_energy(fold, 3.0) == Approx(8.0));
}
