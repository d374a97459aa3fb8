#include <doctest.h>

#include <cmath>

#include "gaitforge/quadrature.hpp"

using namespace gaitforge::quadrature;

TEST_SUITE("quadrature")
{
  TEST_CASE("signed area follows orientation")
  {
    const std::vector<Point> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(signed_area(sq) == doctest::Approx(1.0));
    std::vector<Point> rev(sq.rbegin(), sq.rend());
    CHECK(signed_area(rev) == doctest::Approx(-1.0));
  }

  TEST_CASE("simplicity test rejects a bow tie")
  {
    CHECK(is_simple({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    CHECK_FALSE(is_simple({{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
  }

  TEST_CASE("triangulation preserves area of a non-convex polygon")
  {
    const std::vector<Point> l = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    const auto tris = triangulate(l);
    CHECK(tris.size() == 4);
    double area = 0.0;
    for (const auto & t : tris) {
      const double a = 0.5 * ((t[1] - t[0]).x() * (t[2] - t[0]).y() - (t[1] - t[0]).y() * (t[2] - t[0]).x());
      CHECK(a > 0.0);
      area += a;
    }
    CHECK(area == doctest::Approx(3.0));
  }

  TEST_CASE("cubature is exact for quintic polynomials")
  {
    const Triangle t = {Point(0, 0), Point(1, 0), Point(0, 1)};
    const auto r = integrate_triangle(
        [](const Point & p) { return Eigen::Vector3d(1.0, p.x() * p.x() * p.y(), std::pow(p.x(), 5)); }, t, 1e-14, 0);
    CHECK(r.value(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.value(1) == doctest::Approx(1.0 / 60.0).epsilon(1e-13));
    CHECK(r.value(2) == doctest::Approx(1.0 / 42.0).epsilon(1e-13));
  }

  TEST_CASE("adaptive refinement converges on a smooth non-polynomial integrand")
  {
    const Triangle t = {Point(0, 0), Point(2, 0), Point(0, 2)};
    const auto r = integrate_triangle(
        [](const Point & p) { return Eigen::Vector3d(std::exp(p.x()), 0.0, 0.0); }, t, 1e-12, 10);
    // integral of e^x over x in [0,2], y in [0, 2-x] = e^2 - 3
    CHECK(r.value(0) == doctest::Approx(std::exp(2.0) - 3.0).epsilon(1e-10));
  }
}
