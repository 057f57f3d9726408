#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <rodlab/fixtures.hpp>
#include <rodlab/geometry.hpp>
#include <rodlab/relaxation.hpp>

using namespace rodlab;
using Catch::Approx;

TEST_CASE("zigzag_laminate_curve lays out the sawtooth", "[relaxation]") {
  Laminate lam;
  lam.atoms = {{0.5, {1.0, 1.0}}, {0.5, {1.0, -1.0}}};
  PolylineCurve zz = zigzag_laminate_curve(lam, 4);
  REQUIRE(zz.num_segments() == 8);
  REQUIRE(zz.vertices().front() == Vec2{0.0, 0.0});
  REQUIRE(norm(zz.vertices().back() - Vec2{1.0, 0.0}) < 1e-12);
  REQUIRE(norm(zz.eval(0.125) - Vec2{0.125, 0.125}) < 1e-12);
  REQUIRE(self_intersections(zz).injective);
  REQUIRE(dirichlet_energy(zz, 2.0) == Approx(2.0));

  REQUIRE_THROWS_AS(zigzag_laminate_curve(lam, 0), precondition_error);
  Laminate bad;
  bad.atoms = {{0.6, {1.0, 1.0}}, {0.6, {1.0, -1.0}}};
  REQUIRE_THROWS_AS(zigzag_laminate_curve(bad, 2), precondition_error);
  Laminate negative;
  negative.atoms = {{1.5, {1.0, 1.0}}, {-0.5, {1.0, -1.0}}};
  REQUIRE_THROWS_AS(zigzag_laminate_curve(negative, 2), precondition_error);
}

TEST_CASE("opposite colinear atoms are repaired by a transverse tilt",
          "[relaxation]") {
  Laminate lam;
  lam.atoms = {{0.5, {1.0, 0.0}}, {0.5, {-1.0, 0.0}}};
  PolylineCurve zz = zigzag_laminate_curve(lam, 4);
  REQUIRE(self_intersections(zz).injective);
  // the plain block retraces the x axis; the repair tilts the first leg
  REQUIRE(zz.slope(0) == Vec2{1.0, 0.5});
  REQUIRE(norm(zz.vertices().back() - Vec2{0.0, 0.25}) < 1e-12);
}

TEST_CASE("recovery_rod_sequence honors its certified energy bound",
          "[relaxation]") {
  ConvexEnvelopeTable tab = convexify(neo_hookean_reduced(), 2.0, 33, 0.1);
  ReducedDensity f = neo_hookean_reduced();
  PolylineCurve y = fixtures::straight();

  RecoveryResult res = recovery_rod_sequence(y, tab, f, 2);
  REQUIRE(self_intersections(res.curve).injective);
  REQUIRE(res.beta > 0.0);
  REQUIRE(res.beta <= 0.25);  // never more than a quarter of the piece
  REQUIRE(res.n >= 4);
  REQUIRE(res.input_energy == Approx(0.0).margin(1e-12));
  REQUIRE(res.term_buffer == Approx(2.0 * res.beta * res.input_energy));
  REQUIRE(res.term_n == Approx(1.0 / static_cast<double>(res.n)));
  REQUIRE(res.term_k == Approx(0.5));
  REQUIRE(res.bound == Approx(res.envelope_energy + res.term_buffer +
                              res.term_n + res.term_k));
  REQUIRE(res.energy_out <= res.bound + 1e-9 * (1.0 + res.bound));
  // endpoints are pinned
  REQUIRE(res.curve.vertices().front() == y.vertices().front());
  REQUIRE(norm(res.curve.vertices().back() - y.vertices().back()) < 1e-12);

  REQUIRE_THROWS_AS(recovery_rod_sequence(fixtures::fold(), tab, f, 2),
                    precondition_error);
  REQUIRE_THROWS_AS(recovery_rod_sequence(y, tab, f, 0), precondition_error);
}

TEST_CASE("recovery handles a multi-piece curve with steep arms",
          "[relaxation]") {
  ConvexEnvelopeTable tab = convexify(neo_hookean_reduced(), 3.0, 49, 0.1);
  ReducedDensity f = neo_hookean_reduced();
  PolylineCurve y = fixtures::u_shape(0.2);
  RecoveryResult res = recovery_rod_sequence(y, tab, f, 3);
  REQUIRE(self_intersections(res.curve).injective);
  REQUIRE(res.energy_out <= res.bound + 1e-9 * (1.0 + res.bound));
  REQUIRE(res.envelope_energy <= res.input_energy + 1e-9);
}

TEST_CASE("necessity experiment: laminate energies approach the split value",
          "[relaxation]") {
  ReducedDensity f = neo_hookean_reduced();
  const double s = std::sqrt(0.75);
  NecessityReport rep =
      convexity_necessity_experiment(f, {0.5, s}, {0.5, -s}, 0.5, 16);
  REQUIRE_FALSE(rep.colinear);
  REQUIRE_FALSE(rep.perturbed);
  REQUIRE(norm(rep.xi - Vec2{0.5, 0.0}) < 1e-12);
  REQUIRE(rep.steps.size() == 5);  // n = 1, 2, 4, 8, 16
  REQUIRE(rep.target == Approx(0.0).margin(1e-12));
  for (const NecessityStep& st : rep.steps)
    REQUIRE(st.energy <= rep.target + 1e-9);
  REQUIRE(rep.limit <= rep.target + 1e-9);
}

TEST_CASE("necessity experiment: oscillation beats the unconvexified value",
          "[relaxation]") {
  // double-well density vanishing on the unit circle
  ReducedDensity dw;
  dw.name = "double_well";
  dw.p = 4.0;
  dw.f = [](Vec2 a) {
    const double d = norm2(a) - 1.0;
    return d * d;
  };
  NecessityReport rep =
      convexity_necessity_experiment(dw, {1.0, 0.0}, {-1.0, 0.0}, 0.5, 64);
  REQUIRE(rep.colinear);
  REQUIRE(rep.perturbed);  // opposite directions need a transverse nudge
  REQUIRE(norm(rep.xi - Vec2{0.0, 0.0}) < 1e-12);
  REQUIRE(rep.target == Approx(0.0).margin(1e-12));
  REQUIRE(rep.limit < 0.01);
  REQUIRE(rep.limit < dw({0.0, 0.0}));  // f(xi) = 1 is not attained
  for (std::size_t i = 1; i < rep.steps.size(); ++i)
    REQUIRE(rep.steps[i].energy <= rep.steps[i - 1].energy + 1e-12);

  REQUIRE_THROWS_AS(
      convexity_necessity_experiment(dw, {1.0, 0.0}, {-1.0, 0.0}, 1.0, 8),
      precondition_error);
  REQUIRE_THROWS_AS(
      convexity_necessity_experiment(dw, {0.0, 0.0}, {1.0, 0.0}, 0.5, 8),
      precondition_error);
}
