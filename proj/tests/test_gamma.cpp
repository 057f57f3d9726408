#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <rodlab/fixtures.hpp>
#include <rodlab/gamma.hpp>
#include <rodlab/geometry.hpp>

using namespace rodlab;
using Catch::Approx;

namespace {

BulkField make_field(double h, const std::function<Vec2(double, double)>& map) {
  BulkField fld;
  fld.h = h;
  fld.xs = {0.0, 0.25, 0.5, 0.75, 1.0};
  fld.ys = {-0.5, 0.0, 0.5};
  for (double y : fld.ys)
    for (double x : fld.xs) fld.u.push_back(map(x, y));
  return fld;
}

}  // namespace

TEST_CASE("project_pi averages columns with the exact trapezoid rule",
          "[gamma]") {
  const double h = 0.1;
  PolylineCurve flat = project_pi(
      make_field(h, [&](double x, double y) { return Vec2{x, h * y}; }));
  REQUIRE(flat.breakpoints() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  for (std::size_t i = 0; i < flat.vertices().size(); ++i) {
    REQUIRE(flat.vertices()[i].x == Approx(flat.breakpoints()[i]));
    REQUIRE(flat.vertices()[i].y == Approx(0.0).margin(1e-15));
  }

  // piecewise-linear data sampled from x + y^2: trapezoid of the three rows
  PolylineCurve bowed = project_pi(
      make_field(h, [&](double x, double y) { return Vec2{x + y * y, 0.0}; }));
  for (std::size_t i = 0; i < bowed.vertices().size(); ++i)
    REQUIRE(bowed.vertices()[i].x == Approx(bowed.breakpoints()[i] + 0.125));

  BulkField off = make_field(h, [&](double x, double y) { return Vec2{x, y}; });
  off.ys = {-0.4, 0.0, 0.4};
  REQUIRE_THROWS_AS(project_pi(off), precondition_error);
}

TEST_CASE("bulk_d2_norm measures the transverse derivative", "[gamma]") {
  const double h = 0.05;
  BulkField fld = make_field(h, [&](double x, double y) { return Vec2{x, h * y}; });
  for (double p : {1.0, 2.0, 4.0})
    REQUIRE(detail::bulk_d2_norm(fld, p) == Approx(h).epsilon(1e-12));
}

TEST_CASE("curve_lp_distance integrates the position gap", "[gamma]") {
  PolylineCurve flat({0.0, 1.0}, {{0.0, 0.0}, {1.0, 0.0}});
  PolylineCurve lifted({0.0, 1.0}, {{0.0, 0.3}, {1.0, 0.3}});
  REQUIRE(detail::curve_lp_distance(flat, lifted, 1.0) == Approx(0.3));
  REQUIRE(detail::curve_lp_distance(flat, lifted, 2.0) == Approx(0.3));
}

TEST_CASE("recovery_bulk_sequence certifies an oriented bulk field", "[gamma]") {
  ConvexEnvelopeTable tab = convexify(neo_hookean_reduced(), 2.0, 33, 0.1);
  NeoHookean2D W;
  PolylineCurve y({0.0, 1.0}, {{0.0, 0.0}, {0.5, 0.0}});  // compressive slope

  BulkRecovery out = recovery_bulk_sequence(y, tab, W, 2);
  REQUIRE(out.k == 2);
  REQUIRE(out.h > 0.0);
  REQUIRE(out.delta > 0.0);
  REQUIRE(out.det_min >= 0.5 * out.delta * (1.0 - 1e-6));
  REQUIRE(std::isfinite(out.J_h));
  REQUIRE(out.J_h >= 0.0);
  // the bulk value tracks the rod-level recovery up to the step allowances
  const double target = rod_energy(y, tab);
  REQUIRE(out.J_h <= target + 5.0 / 2.0);
  REQUIRE(self_intersections(out.ybar).injective);
  // the projected midline stays close to the requested curve
  PolylineCurve proj = project_pi(out.field);
  REQUIRE(detail::curve_lp_distance(proj, y, 1.0) < 0.2);

  REQUIRE_THROWS_AS(recovery_bulk_sequence(y, tab, W, 0), precondition_error);
  REQUIRE_THROWS_AS(recovery_bulk_sequence(y, tab, W, 2, 10.0),
                    precondition_error);  // thicker than certified
}

TEST_CASE("gamma_experiment reports a finite target for injective input",
          "[gamma]") {
  ConvexEnvelopeTable tab = convexify(neo_hookean_reduced(), 2.0, 33, 0.1);
  NeoHookean2D W;
  PolylineCurve y = fixtures::straight();

  std::vector<BulkField> probes = {
      make_field(0.05, [](double x, double yy) { return Vec2{x, 0.05 * yy}; })};
  GammaReport rep = gamma_experiment(y, W, tab, {GammaStep{0.0, 2, 0}}, probes);
  REQUIRE(rep.status == TargetStatus::finite);
  REQUIRE(std::isfinite(rep.target));
  REQUIRE(rep.target == Approx(tab.value_at({1.0, 0.0})).margin(1e-12));
  REQUIRE(rep.steps.size() == 1);
  const GammaStepRecord& st = rep.steps[0];
  REQUIRE(st.ok);
  REQUIRE(st.reason.empty());
  REQUIRE(st.J == Approx(rep.target));
  REQUIRE(std::fabs(st.gap) <= 5.0 / 2.0);
  REQUIRE(st.det_min > 0.0);
  REQUIRE(rep.probes.size() == 1);
  REQUIRE(rep.probes[0].liminf_ok);
  REQUIRE(rep.probes[0].d2_over_h == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gamma_experiment marks obstructed inputs as infinite", "[gamma]") {
  ConvexEnvelopeTable tab = convexify(neo_hookean_reduced(), 2.0, 33, 0.1);
  NeoHookean2D W;
  GammaReport rep =
      gamma_experiment(fixtures::x_crossing(), W, tab, {GammaStep{0.0, 2, 0}});
  REQUIRE(rep.status == TargetStatus::infinite);
  REQUIRE(rep.steps.size() == 1);
  REQUIRE_FALSE(rep.steps[0].ok);
  REQUIRE_FALSE(rep.steps[0].reason.empty());
  REQUIRE(rep.probes.empty());
}
