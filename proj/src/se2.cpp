#include "gaitforge/se2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gaitforge::se2 {

Eigen::Matrix2d rotation(double theta)
{
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Matrix3d matrix(const BodyPose & g)
{
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m.topLeftCorner<2, 2>() = rotation(g.theta);
  m(0, 2) = g.x;
  m(1, 2) = g.y;
  return m;
}

BodyPose from_matrix(const Eigen::Matrix3d & m)
{
  return {m(0, 2), m(1, 2), std::atan2(m(1, 0), m(0, 0))};
}

Eigen::Matrix3d hat(const Twist & xi)
{
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  m(0, 1) = -xi(2);
  m(1, 0) = xi(2);
  m(0, 2) = xi(0);
  m(1, 2) = xi(1);
  return m;
}

Twist vee(const Eigen::Matrix3d & m) { return {m(0, 2), m(1, 2), m(1, 0)}; }

BodyPose compose(const BodyPose & a, const BodyPose & b)
{
  const double c = std::cos(a.theta), s = std::sin(a.theta);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, a.theta + b.theta};
}

BodyPose inverse(const BodyPose & g)
{
  const double c = std::cos(g.theta), s = std::sin(g.theta);
  return {-(c * g.x + s * g.y), -(-s * g.x + c * g.y), -g.theta};
}

namespace {

// sin(t)/t and (1 - cos(t))/t with series near zero
void screw_coefficients(double t, double & a, double & b)
{
  if (std::abs(t) < 1e-6) {
    const double t2 = t * t;
    a = 1.0 - t2 / 6.0;
    b = t / 2.0 - t * t2 / 24.0;
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t;
  }
}

}  // namespace

BodyPose exp(const Twist & xi)
{
  double a, b;
  screw_coefficients(xi(2), a, b);
  return {a * xi(0) - b * xi(1), b * xi(0) + a * xi(1), xi(2)};
}

Twist log(const BodyPose & g)
{
  const double t = wrap_angle(g.theta);
  double a, b;
  screw_coefficients(t, a, b);
  // invert [[a, -b], [b, a]]
  const double det = a * a + b * b;
  return {(a * g.x + b * g.y) / det, (-b * g.x + a * g.y) / det, t};
}

Twist adjoint(const BodyPose & g, const Twist & xi)
{
  const Eigen::Vector2d v = rotation(g.theta) * xi.head<2>();
  return {v.x() + xi(2) * g.y, v.y() - xi(2) * g.x, xi(2)};
}

Twist bracket(const Twist & a, const Twist & b)
{
  return {a(1) * b(2) - b(1) * a(2), b(0) * a(2) - a(0) * b(2), 0.0};
}

double wrap_angle(double a)
{
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

double distance(const BodyPose & a, const BodyPose & b)
{
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(wrap_angle(a.theta - b.theta))});
}

}  // namespace gaitforge::se2
