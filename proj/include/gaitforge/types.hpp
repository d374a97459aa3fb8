#pragma once

#include <Eigen/Core>

namespace gaitforge {

/// Point in joint-angle space, radians.
struct ShapePoint
{
  double phi1 = 0.0;
  double phi2 = 0.0;

  Eigen::Vector2d vec() const { return {phi1, phi2}; }
  static ShapePoint from(const Eigen::Vector2d & v) { return {v.x(), v.y()}; }

  friend ShapePoint operator+(ShapePoint a, ShapePoint b) { return {a.phi1 + b.phi1, a.phi2 + b.phi2}; }
  friend ShapePoint operator-(ShapePoint a, ShapePoint b) { return {a.phi1 - b.phi1, a.phi2 - b.phi2}; }
  friend ShapePoint operator*(double k, ShapePoint a) { return {k * a.phi1, k * a.phi2}; }
  friend bool operator==(const ShapePoint &, const ShapePoint &) = default;
};

/// Planar pose of the body frame (x, y, theta) in the world.
struct BodyPose
{
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Eigen::Vector3d vec() const { return {x, y, theta}; }
  static BodyPose from(const Eigen::Vector3d & v) { return {v(0), v(1), v(2)}; }
};

/// Body-frame velocity (vx, vy, omega) of the reference frame.
struct BodyVelocity
{
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
};

/// Local connection A(phi): rows (vx, vy, omega), columns (d/dphi1, d/dphi2).
using LocalConnection = Eigen::Matrix<double, 3, 2>;

/// Planar twist or se(2) vector in (x, y, theta) component order.
using Twist = Eigen::Vector3d;

}  // namespace gaitforge
