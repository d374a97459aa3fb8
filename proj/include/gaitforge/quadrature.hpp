#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace gaitforge::quadrature {

using Point = Eigen::Vector2d;
using Triangle = std::array<Point, 3>;

/// Signed area of a closed polygon (positive when counter-clockwise). The last vertex may
/// repeat the first.
double signed_area(const std::vector<Point> & polygon);

/// True when no two non-adjacent edges of the closed polygon intersect.
bool is_simple(const std::vector<Point> & polygon);

/// Ear-clipping triangulation of a simple polygon; triangles are returned counter-clockwise.
std::vector<Triangle> triangulate(std::vector<Point> polygon);

using Integrand = std::function<Eigen::Vector3d(const Point &)>;

struct AdaptiveResult
{
  Eigen::Vector3d value = Eigen::Vector3d::Zero();
  long evaluations = 0;
};

/// Integral over one triangle with 7-point degree-5 cubature and midpoint subdivision,
/// refined until parent and children agree to `tol` (max-norm).
AdaptiveResult integrate_triangle(const Integrand & f, const Triangle & t, double tol, int max_depth);

}  // namespace gaitforge::quadrature
