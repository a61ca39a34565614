#include <doctest.h>

#include <random>
#include <sstream>

#include "gpt2d/gpt2d.hpp"
#include "oracle_helpers.hpp"

using namespace gpt2d;

namespace {

ShapeSpec spec_of(Shape s, int nodes = 512) {
  ShapeSpec sp;
  sp.shape = s;
  sp.nodes = nodes;
  return sp;
}

}  // namespace

TEST_CASE("kite passes through the printed point at t = 0") {
  const BoundaryCurve c = make_curve(spec_of(Shape::kite));
  CHECK(c.nodes(0).real() == doctest::Approx(1.65).epsilon(1e-14));
  CHECK(c.nodes(0).imag() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("disk nodes stay on the circle and curvature is 1/r") {
  ShapeSpec sp = spec_of(Shape::disk, 128);
  sp.center = Complex{0.0, 0.0};
  sp.radius = 2.0;
  const BoundaryCurve c = make_curve(sp);
  for (int j = 0; j < c.size(); ++j) {
    CHECK(std::abs(c.nodes(j)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c.curvature(j) == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(c.total_arclength() == doctest::Approx(4 * pi).epsilon(1e-13));
}

TEST_CASE("cap corner parameters match the printed constants") {
  const auto& k = detail::cap_constants();
  CHECK(k.t1 == doctest::Approx(0.1122).epsilon(5e-4));
  CHECK(k.t2 == doctest::Approx(0.4731).epsilon(5e-4));
  const BoundaryCurve c = make_curve(spec_of(Shape::cap, 1024));
  REQUIRE(c.corners.size() == 3);
  CHECK(c.corners[1] == doctest::Approx(2 * pi * k.t1));
  CHECK(c.corners[2] == doctest::Approx(2 * pi * k.t2));
  CHECK(c.smoothness == Smoothness::piecewise_smooth_with_corners);
}

TEST_CASE("spec validation rejects bad node counts") {
  CHECK_THROWS_AS(make_curve(spec_of(Shape::kite, 8)), ConfigError);
  CHECK_THROWS_AS(make_curve(spec_of(Shape::kite, 300)), ConfigError);  // not a power of 2
  CHECK_NOTHROW(make_curve(spec_of(Shape::cap, 1500)));  // corner shapes are panel-based
}

TEST_CASE("corner depth on a smooth shape is ignored with a warning") {
  ShapeSpec sp = spec_of(Shape::starfish, 256);
  sp.corner_depth = 6;
  std::ostringstream warn;
  const BoundaryCurve c = make_curve(sp, &warn);
  CHECK(c.size() == 256);
  CHECK(warn.str().find("corner_depth ignored") != std::string::npos);
  CHECK(c.corners.empty());
}

TEST_CASE("arclength converges under node doubling") {
  for (Shape s : {Shape::kite, Shape::starfish}) {
    const double l1 = make_curve(spec_of(s, 256)).total_arclength();
    const double l2 = make_curve(spec_of(s, 512)).total_arclength();
    CHECK(std::abs(l2 - l1) < 1e-10);
  }
  // graded panels: doubling the panel budget
  const double c1 = make_curve(spec_of(Shape::cap, 1536)).total_arclength();
  const double c2 = make_curve(spec_of(Shape::cap, 3072)).total_arclength();
  CHECK(std::abs(c2 - c1) < 1e-10);
}

TEST_CASE("normals are outward unit vectors consistent with the tangent") {
  for (Shape s : {Shape::kite, Shape::starfish, Shape::cap, Shape::perturbed_ellipse}) {
    const BoundaryCurve c = make_curve(spec_of(s, s == Shape::kite ? 256 : 1024));
    for (int j = 0; j < c.size(); ++j) {
      CHECK(std::abs(std::abs(c.normals(j)) - 1.0) < 1e-12);
      // tangent rotated by -pi/2 must point along the stored normal
      const Complex rot = Complex{0, -1} * c.derivatives(j);
      CHECK(std::real(c.normals(j) * std::conj(rot)) > 0.0);
    }
    CHECK(detail::winding_number(c.nodes, c.centroid()) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("is_star_shaped: disk about interior points, errors outside") {
  ShapeSpec sp = spec_of(Shape::disk, 128);
  sp.radius = 1.5;
  const BoundaryCurve disk = make_curve(sp);
  CHECK(is_star_shaped(disk, Complex{0.0, 0.0}));
  CHECK(is_star_shaped(disk, Complex{0.9, 0.0}));

  const BoundaryCurve kite = make_curve(spec_of(Shape::kite, 256));
  CHECK_THROWS_AS(is_star_shaped(kite, Complex{10.0, 0.0}), ConfigError);
  CHECK(is_star_shaped(kite, Complex{0.0, 0.0}));
}

TEST_CASE("is_star_shaped detects a non-star center") {
  const BoundaryCurve star = make_curve(spec_of(Shape::starfish, 512));
  CHECK(is_star_shaped(star, Complex{0.0, 0.0}));
  // a point deep inside one arm cannot see around the concavities
  CHECK_FALSE(is_star_shaped(star, Complex{1.1, 0.0}));
}

TEST_CASE("shape_distance: identity, concentric disks, translation bound") {
  const BoundaryCurve kite = make_curve(spec_of(Shape::kite, 256));
  CHECK(shape_distance(kite, kite) == 0.0);

  ShapeSpec d1 = spec_of(Shape::disk, 512);
  d1.radius = 1.0;
  ShapeSpec d2 = d1;
  d2.radius = 1.1;
  // exact Hausdorff distance of concentric circles is the radius gap
  CHECK(shape_distance(make_curve(d1), make_curve(d2)) == doctest::Approx(0.1).epsilon(1e-9));

  ShapeSpec d3 = d1;
  d3.center = Complex{0.05, 0.0};
  CHECK(shape_distance(make_curve(d1), make_curve(d3)) <= 0.05 + 1e-12);
}

TEST_CASE("map_boundary samples the truncated map image") {
  ConformalMap unit;
  unit.gamma = 1.0;
  const BoundaryCurve c4 = map_boundary(unit, 4);
  CHECK(std::abs(c4.nodes(0) - Complex{1, 0}) < 1e-15);
  CHECK(std::abs(c4.nodes(1) - Complex{0, 1}) < 1e-15);
  CHECK(std::abs(c4.nodes(2) - Complex{-1, 0}) < 1e-15);
  CHECK(std::abs(c4.nodes(3) - Complex{0, -1}) < 1e-15);

  ConformalMap shifted = unit;
  shifted.a0 = Complex{2.0, 0.0};
  const BoundaryCurve cs = map_boundary(shifted, 64);
  for (int j = 0; j < cs.size(); ++j)
    CHECK(std::abs(cs.nodes(j) - shifted.a0) == doctest::Approx(1.0).epsilon(1e-14));

  // Joukowski ellipse: direct evaluation of w + 0.5/w on |w| = 1
  ConformalMap jk = unit;
  jk.coeffs = {Complex{0.5, 0.0}};
  const BoundaryCurve ce = map_boundary(jk, 128);
  for (int j = 0; j < ce.size(); ++j) {
    const double t = ce.params[j];
    const Complex expect{1.5 * std::cos(t), 0.5 * std::sin(t)};
    CHECK(std::abs(ce.nodes(j) - expect) < 1e-14);
  }
  CHECK_THROWS_AS(map_boundary(unit, 2), ConfigError);
}

TEST_CASE("from_conformal curves agree with map_boundary") {
  std::mt19937_64 rng(11);
  ShapeSpec sp;
  sp.shape = Shape::from_conformal;
  sp.nodes = 128;
  sp.map = random_map(rng, 5);
  const BoundaryCurve a = make_curve(sp);
  const BoundaryCurve b = map_boundary(sp.map, 128);
  CHECK((a.nodes - b.nodes).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() < 1e-12);
}
