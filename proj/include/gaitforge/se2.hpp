#pragma once

#include <Eigen/Core>

#include "gaitforge/types.hpp"

/// Planar rigid-body group helpers. Poses are (x, y, theta); twists are (vx, vy, omega).
namespace gaitforge::se2 {

Eigen::Matrix2d rotation(double theta);

/// 3x3 homogeneous matrix of a pose.
Eigen::Matrix3d matrix(const BodyPose & g);
BodyPose from_matrix(const Eigen::Matrix3d & m);

/// Twist embedded as a 3x3 element of the Lie algebra.
Eigen::Matrix3d hat(const Twist & xi);
Twist vee(const Eigen::Matrix3d & m);

BodyPose compose(const BodyPose & a, const BodyPose & b);
BodyPose inverse(const BodyPose & g);

/// Flow along a constant body twist for unit time (screw motion).
BodyPose exp(const Twist & xi);
Twist log(const BodyPose & g);

/// Adjoint action Ad_g on a twist.
Twist adjoint(const BodyPose & g, const Twist & xi);

/// Planar twist commutator [a, b] (translation part only; rotation part is zero).
Twist bracket(const Twist & a, const Twist & b);

/// Largest componentwise gap between two poses, angle wrapped to (-pi, pi].
double distance(const BodyPose & a, const BodyPose & b);

double wrap_angle(double a);

}  // namespace gaitforge::se2
