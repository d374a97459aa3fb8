#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gaitforge/connection.hpp"
#include "gaitforge/ode.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge {

/// Closed oriented curve in shape space parametrized by s in [0, 1].
class Gait
{
public:
  enum class Family
  {
    Circle,
    Square,
    Polyline,
  };

  /// Circle of radius eps, traversed counter-clockwise from angle `phase`. The default
  /// phase starts on the phi1 == phi2 diagonal.
  static Gait circle(ShapePoint center, double radius, double phase = 0.7853981633974483);
  /// Axis-aligned square of half-side eps, counter-clockwise from the corner (+eps, +eps).
  static Gait square(ShapePoint center, double half_side);
  /// Closed polyline through the vertices in order (a repeated closing vertex is dropped).
  static Gait polyline(std::vector<ShapePoint> vertices);

  /// Same curve traversed the other way, starting from the same point.
  Gait reversed() const;

  ShapePoint point(double s) const;
  /// d(phi)/ds
  Eigen::Vector2d tangent(double s) const;
  /// Parameter values of C0 corners, including 0 and 1.
  std::vector<double> breakpoints() const;

  /// n points at uniform s (no repeated closing point).
  std::vector<ShapePoint> sample(int n) const;
  /// Region boundary for area integrals; circles are discretized with `n` vertices.
  std::vector<ShapePoint> boundary(int n = 720) const;

  /// Positive for counter-clockwise traversal.
  double signed_area() const;
  bool counter_clockwise() const { return signed_area() >= 0.0; }

  Family family() const { return family_; }
  /// Circle radius or square half-side; 0 for polylines.
  double amplitude() const { return amplitude_; }
  const std::vector<ShapePoint> & vertices() const { return vertices_; }

private:
  Gait() = default;

  Family family_ = Family::Polyline;
  ShapePoint center_;
  double amplitude_ = 0.0;
  double phase_ = 0.0;
  bool reversed_ = false;
  // polyline data (also used for squares)
  std::vector<ShapePoint> vertices_;
  std::vector<double> knots_;
};

/// Monotone reparametrization s = map(tau) of [0, 1] onto itself with rate ds/dtau.
struct TimeProfile
{
  std::function<double(double)> map;
  std::function<double(double)> rate;

  static TimeProfile uniform();
  /// s = tau^2
  static TimeProfile quadratic();
  /// smoothstep easing; zero speed at both ends
  static TimeProfile eased();
};

struct IntegrateOptions
{
  double rtol = 1e-9;
  double atol = 1e-11;
  /// keep every accepted step in the trajectory
  bool record = true;
  /// optional reparametrization of each segment's parameter
  std::optional<TimeProfile> profile;
};

struct Trajectory
{
  std::vector<double> s;
  std::vector<ShapePoint> shape;
  std::vector<BodyPose> pose;
  ode::Statistics stats;

  const BodyPose & net() const { return pose.back(); }
};

/// Integrates q_dot = R(theta) A(phi) phi_dot along the gait from the identity pose.
Trajectory integrate_gait(const FramedConnection & a, const Gait & gait, const IntegrateOptions & options = {});

/// Net displacement only.
BodyPose net_displacement(const FramedConnection & a, const Gait & gait, const IntegrateOptions & options = {});

/// Largest componentwise gap between net displacements under two speed profiles.
double time_reparametrization_check(const FramedConnection & a, const Gait & gait, const TimeProfile & first,
                                    const TimeProfile & second, const IntegrateOptions & options = {});

struct SweepRow
{
  double eps;
  double dx, dy, dtheta;
};

struct SweepExtremum
{
  /// refined by a parabola through the grid extreme and its neighbours
  double eps;
  double dx;
  /// grid index of the raw extreme
  std::size_t index;
  bool interior;
};

struct SweepResult
{
  Gait::Family family;
  std::vector<SweepRow> rows;
  SweepExtremum argmax;
  SweepExtremum argmin;
  /// eps values where dx changes sign (linear interpolation)
  std::vector<double> sign_changes;
};

/// Net displacement for each amplitude of a circle or square family centered at the origin.
SweepResult displacement_sweep(const FramedConnection & a, Gait::Family family, const std::vector<double> & eps_grid,
                               const IntegrateOptions & options = {});

/// Uniform grid eps_min, eps_min + step, ..., <= eps_max (+ half a step of slack).
std::vector<double> make_grid(double eps_min, double eps_max, double step);

}  // namespace gaitforge
