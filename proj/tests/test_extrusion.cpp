#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <rodlab/extrusion.hpp>
#include <rodlab/fixtures.hpp>
#include <rodlab/geometry.hpp>

using namespace rodlab;
using Catch::Approx;

TEST_CASE("cosserat_normal attaches unit normals per piece", "[extrusion]") {
  PolylineCurve zig = fixtures::w_zigzag();
  CosseratField b = cosserat_normal(zig);
  REQUIRE(b.kind == CosseratField::Kind::piecewise);
  REQUIRE(b.provenance == CosseratField::Provenance::normal);
  REQUIRE(b.values.size() == zig.num_segments());
  const double s17 = std::sqrt(17.0);
  for (std::size_t l = 0; l < zig.num_segments(); ++l) {
    REQUIRE(norm(b.values[l]) == Approx(1.0));
    REQUIRE(det2(zig.slope(l), b.values[l]) == Approx(s17));
  }
  REQUIRE(norm(b.values[0] - Vec2{-4.0 / s17, 1.0 / s17}) < 1e-12);

  PolylineCurve stall({0.0, 0.5, 1.0}, {{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}});
  REQUIRE_THROWS_AS(cosserat_normal(stall), precondition_error);
}

TEST_CASE("cosserat_minimizer recovers the perpendicular director",
          "[extrusion]") {
  NeoHookean2D W;
  PolylineCurve zig = fixtures::w_zigzag();
  CosseratField b = cosserat_minimizer(zig, W);
  REQUIRE(b.provenance == CosseratField::Provenance::minimizer);
  for (std::size_t l = 0; l < zig.num_segments(); ++l) {
    Vec2 exact = NeoHookean2D::reduced_minimizer(zig.slope(l));
    REQUIRE(norm(b.values[l] - exact) < 1e-3);
  }
}

TEST_CASE("smooth_cosserat interpolates corners through the bisector",
          "[extrusion]") {
  PolylineCurve y({0.0, 0.5, 1.0}, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}});
  CosseratField b0 = cosserat_normal(y);
  const double delta = 0.3;
  CosseratField b = smooth_cosserat(y, b0, 8, delta);
  REQUIRE(b.kind == CosseratField::Kind::sampled);
  REQUIRE(b.provenance == CosseratField::Provenance::smoothed);
  // slopes (2,0) and (0,2): transition direction is their normalized difference
  Vec2 zeta = normalized(Vec2{-2.0, 2.0});
  REQUIRE(norm(b.eval(0.5) - zeta) < 1e-12);
  REQUIRE(norm(b.eval(0.05) - Vec2{0.0, 1.0}) < 1e-12);
  REQUIRE(norm(b.eval(0.95) - Vec2{-1.0, 0.0}) < 1e-12);
  REQUIRE(b.det_floor_claimed == Approx(delta));  // min(sqrt(2), delta)
  REQUIRE(b.det_floor_measured >= delta * (1.0 - 1e-9));
  REQUIRE(b.deriv_bound > 0.0);
}

TEST_CASE("smooth_cosserat validates window, floor and corners", "[extrusion]") {
  PolylineCurve y({0.0, 0.5, 1.0}, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}});
  CosseratField b0 = cosserat_normal(y);
  REQUIRE_THROWS_AS(smooth_cosserat(y, b0, 0, 0.3), precondition_error);
  REQUIRE_THROWS_AS(smooth_cosserat(y, b0, 8, 0.0), precondition_error);
  // piece determinant is 2, so delta = 1.2 demands more than the field has
  REQUIRE_THROWS_AS(smooth_cosserat(y, b0, 8, 1.2), precondition_error);

  // window must stay below half the shortest piece (0.1 for this fixture)
  PolylineCurve u = fixtures::u_shape(0.1);
  CosseratField ub = cosserat_normal(u);
  REQUIRE_THROWS_AS(smooth_cosserat(u, ub, 16, 0.25), precondition_error);
  REQUIRE_NOTHROW(smooth_cosserat(u, ub, 25, 0.25));

  // a fold reverses direction; no admissible transition exists
  PolylineCurve fold = fixtures::fold();
  CosseratField fb = cosserat_normal(fold);
  REQUIRE_THROWS_AS(smooth_cosserat(fold, fb, 8, 0.3), precondition_error);
}

TEST_CASE("smoothed zigzag keeps the requested determinant floor",
          "[extrusion]") {
  PolylineCurve zig = fixtures::w_zigzag();
  CosseratField b0 = cosserat_normal(zig);
  for (std::size_t i : {16u, 64u, 256u}) {
    CosseratField b = smooth_cosserat(zig, b0, i, 0.1);
    REQUIRE(b.det_floor_claimed == Approx(0.1));
    REQUIRE(b.det_floor_measured >= 0.1 * (1.0 - 1e-9));
    // corner transition value: det((1,4), (0,1)) = 1 dominates the floor
    REQUIRE(norm(b.eval(0.25) - Vec2{0.0, 1.0}) < 1e-12);
  }
}

TEST_CASE("affine runs merge cells with identical slope and director",
          "[extrusion]") {
  PolylineCurve line = fixtures::straight();
  CosseratField cb = cosserat_normal(line);
  detail::AffineRuns one = detail::affine_runs(line, cb);
  REQUIRE(one.span_affine(0.1, 0.9));

  PolylineCurve zig = fixtures::w_zigzag();
  detail::AffineRuns runs = detail::affine_runs(zig, cosserat_normal(zig));
  REQUIRE(runs.span_affine(0.05, 0.2));
  REQUIRE_FALSE(runs.span_affine(0.1, 0.35));  // crosses a slope change
}

TEST_CASE("tubular_thickness returns the cap for an affine strip",
          "[extrusion]") {
  PolylineCurve line = fixtures::straight();
  CosseratField b = cosserat_normal(line);
  for (double cap : {0.01, 0.05, 0.1}) {
    StripMap sm = tubular_thickness(line, b, 0.5, cap);
    REQUIRE(sm.h == cap);
    REQUIRE(sm.cert.injective_protocol);
    REQUIRE(sm.cert.alpha == kInf);  // a single affine run has no far pairs
    REQUIRE(sm.cert.det_floor == Approx(1.0));
  }
}

TEST_CASE("tubular_thickness certifies the narrow u-shape", "[extrusion]") {
  PolylineCurve u = fixtures::u_shape(0.1);
  CosseratField b = smooth_cosserat(u, cosserat_normal(u), 25, 0.25);
  StripMap sm = tubular_thickness(u, b, 0.25, 1.0);
  REQUIRE(sm.cert.injective_protocol);
  REQUIRE(sm.cert.gamma == Approx(0.025));
  // the arm tip sits 0.05 from the first far base subsegment
  REQUIRE(sm.cert.alpha == Approx(0.05).epsilon(1e-9));
  REQUIRE(sm.h == Approx(0.999 * 0.05 / 4.0).epsilon(1e-6));
  REQUIRE(sm.cert.det_floor >= 0.125 * (1.0 - 1e-9));
  REQUIRE_FALSE(sm.cert.boundary_crossing);
  REQUIRE(sm.cert.min_far_gap >= sm.cert.alpha - sm.h * sm.b.sup_norm());

  // the same certificate at eight times the thickness must refuse
  StripMap fat = sm;
  fat.h = 8.0 * sm.h;
  StripCertificate c8 = verify_strip(fat);
  REQUIRE_FALSE(c8.injective_protocol);
}

TEST_CASE("tubular_thickness rejects inadmissible inputs", "[extrusion]") {
  PolylineCurve line = fixtures::straight();
  CosseratField b = cosserat_normal(line);
  REQUIRE_THROWS_AS(tubular_thickness(line, b, 0.0, 1.0), precondition_error);
  REQUIRE_THROWS_AS(tubular_thickness(line, b, 0.5, 0.0), precondition_error);
  REQUIRE_THROWS_AS(tubular_thickness(line, b, 1.5, 1.0), precondition_error);

  PolylineCurve xc = fixtures::x_crossing();
  REQUIRE_THROWS_AS(tubular_thickness(xc, cosserat_normal(xc), 0.5, 1.0),
                    precondition_error);

  // piecewise director with a jump at a corner must be smoothed first
  PolylineCurve zig = fixtures::w_zigzag();
  REQUIRE_THROWS_AS(tubular_thickness(zig, cosserat_normal(zig), 0.5, 1.0),
                    precondition_error);
}

TEST_CASE("one-dimensional compressive-strain check on fixtures", "[extrusion]") {
  CnReport fold = ciarlet_necas_1d_check(fixtures::fold());
  REQUIRE(fold.lhs == Approx(2.0));
  REQUIRE(fold.rhs == Approx(1.0));
  REQUIRE_FALSE(fold.satisfied);

  CnReport cross = ciarlet_necas_1d_check(fixtures::x_crossing());
  REQUIRE(cross.lhs == Approx(1.0 + 2.0 * std::sqrt(2.0)));
  REQUIRE(cross.rhs == Approx(cross.lhs));
  REQUIRE(cross.satisfied);

  REQUIRE(ciarlet_necas_1d_check(fixtures::straight()).satisfied);

  CnReport devil = ciarlet_necas_1d_check(fixtures::horned_devil());
  REQUIRE(devil.lhs > devil.rhs + devil.tol);
  REQUIRE_FALSE(devil.satisfied);
}
