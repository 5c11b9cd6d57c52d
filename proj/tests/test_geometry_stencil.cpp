#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "latlab/geometry.hpp"
#include "latlab/stencil.hpp"

using namespace latlab;

TEST_CASE("box shape signed distance and diameter") {
  BoxShape box(2, Vec{0.0, 0.0, 0.0}, Vec{2.0, 1.0, 0.0});
  CHECK(box.diameter() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(box.signed_distance(Vec{1.0, 0.5, 0.0}) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(box.signed_distance(Vec{0.1, 0.5, 0.0}) == doctest::Approx(-0.1).epsilon(1e-14));
  CHECK(box.signed_distance(Vec{3.0, 0.5, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(box.contains(Vec{1.0, 0.5, 0.0}));
  CHECK_FALSE(box.contains(Vec{2.5, 0.5, 0.0}));

  Vec lo, hi;
  box.bounding_box(lo, hi);
  CHECK(lo[0] == 0.0);
  CHECK(hi[0] == 2.0);
  CHECK(hi[1] == 1.0);
}

TEST_CASE("ball shape signed distance is exact") {
  BallShape ball(2, Vec{1.0, 1.0, 0.0}, 0.5);
  CHECK(ball.diameter() == doctest::Approx(1.0));
  CHECK(ball.signed_distance(Vec{1.0, 1.0, 0.0}) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(ball.signed_distance(Vec{1.4, 1.0, 0.0}) == doctest::Approx(-0.1).epsilon(1e-14));
  CHECK(ball.signed_distance(Vec{2.0, 1.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("polygon shape: unit right triangle") {
  PolygonShape tri({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  CHECK(tri.contains(Vec{0.25, 0.25, 0.0}));
  CHECK_FALSE(tri.contains(Vec{0.75, 0.75, 0.0}));
  CHECK(tri.diameter() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  // distance to hypotenuse from the centroid
  const double sd = tri.signed_distance(Vec{0.2, 0.2, 0.0});
  CHECK(sd == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(tri.signed_distance(Vec{1.0, 1.0, 0.0}) ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("stencil factories") {
  auto nn1 = InteractionStencil::nearest_neighbor(1);
  CHECK(nn1.size() == 2);
  auto nn2 = InteractionStencil::nearest_neighbor(2);
  CHECK(nn2.size() == 4);

  auto tri = InteractionStencil::triangular();
  CHECK(tri.size() == 6);
  CHECK(tri.r_max() == doctest::Approx(std::sqrt(2.0)));

  auto sq = InteractionStencil::square_with_diagonals();
  CHECK(sq.size() == 8);
  CHECK(sq.r_max() == doctest::Approx(std::sqrt(2.0)));

  // r0 = max(r_max, sqrt(d)/4)
  CHECK(nn1.r0() == doctest::Approx(1.0));
  CHECK(tri.r0() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("negation index pairs each direction with its opposite") {
  auto tri = InteractionStencil::triangular();
  for (int a = 0; a < tri.size(); ++a) {
    const int b = tri.negation_index(a);
    for (int i = 0; i < 2; ++i) CHECK(tri.dir(b)[i] == -tri.dir(a)[i]);
    CHECK(tri.negation_index(b) == a);
  }
}

TEST_CASE("invalid stencils are rejected") {
  // not symmetric
  CHECK_THROWS_WITH_AS(InteractionStencil(1, {IVec{1, 0, 0}}),
                       "invalid stencil", std::invalid_argument);
  // contains zero direction
  CHECK_THROWS_WITH_AS(
      InteractionStencil(1, {IVec{0, 0, 0}, IVec{1, 0, 0}, IVec{-1, 0, 0}}),
      "invalid stencil", std::invalid_argument);
  // does not span the integer lattice
  CHECK_THROWS_WITH_AS(InteractionStencil(1, {IVec{2, 0, 0}, IVec{-2, 0, 0}}),
                       "invalid stencil", std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      InteractionStencil(2, {IVec{1, 1, 0}, IVec{-1, -1, 0}}),
      "invalid stencil", std::invalid_argument);
  // valid two-direction 2-d stencil is accepted
  CHECK_NOTHROW(InteractionStencil(
      2, {IVec{1, 0, 0}, IVec{-1, 0, 0}, IVec{0, 1, 0}, IVec{0, -1, 0}}));
}
