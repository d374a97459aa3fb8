#include <doctest.h>

#include <numbers>
#include <random>

#include "gaitforge/se2.hpp"

using namespace gaitforge;

TEST_SUITE("se2")
{
  TEST_CASE("exp and log are inverse on random twists")
  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 200; ++k) {
      const Twist xi(u(rng), u(rng), 0.9 * u(rng));
      const Twist back = se2::log(se2::exp(xi));
      CHECK((back - xi).norm() < 1e-12);
    }
  }

  TEST_CASE("exp of a pure translation and of a pure rotation")
  {
    const BodyPose t = se2::exp(Twist(0.3, -0.2, 0.0));
    CHECK(t.x == doctest::Approx(0.3));
    CHECK(t.y == doctest::Approx(-0.2));
    CHECK(t.theta == 0.0);
    const BodyPose r = se2::exp(Twist(0.0, 0.0, 1.1));
    CHECK(std::abs(r.x) < 1e-15);
    CHECK(r.theta == doctest::Approx(1.1));
  }

  TEST_CASE("compose with inverse gives identity")
  {
    const BodyPose g{0.4, -1.3, 2.2};
    const BodyPose e = se2::compose(g, se2::inverse(g));
    CHECK(std::abs(e.x) < 1e-14);
    CHECK(std::abs(e.y) < 1e-14);
    CHECK(std::abs(e.theta) < 1e-14);
    CHECK(se2::distance(se2::compose(se2::inverse(g), g), BodyPose{}) < 1e-14);
  }

  TEST_CASE("matrix round trip")
  {
    const BodyPose g{1.0, 2.0, -0.7};
    CHECK(se2::distance(se2::from_matrix(se2::matrix(g)), g) < 1e-15);
  }

  TEST_CASE("adjoint conjugates the exponential")
  {
    const BodyPose g{0.5, -0.25, 0.8};
    const Twist xi(0.2, 0.1, -0.4);
    const BodyPose lhs = se2::compose(se2::compose(g, se2::exp(xi)), se2::inverse(g));
    const BodyPose rhs = se2::exp(se2::adjoint(g, xi));
    CHECK(se2::distance(lhs, rhs) < 1e-13);
  }

  TEST_CASE("bracket is the matrix commutator with zero rotation part")
  {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      const Twist a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
      const Twist c = se2::bracket(a, b);
      const Eigen::Matrix3d m = se2::hat(a) * se2::hat(b) - se2::hat(b) * se2::hat(a);
      CHECK(c(2) == 0.0);
      CHECK((c - se2::vee(m)).norm() < 1e-14);
    }
  }

  TEST_CASE("wrap_angle maps into (-pi, pi]")
  {
    CHECK(se2::wrap_angle(3.0 * std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(se2::wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
    CHECK(se2::wrap_angle(0.5) == doctest::Approx(0.5));
  }
}
