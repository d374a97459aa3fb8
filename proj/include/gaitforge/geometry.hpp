#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gaitforge/connection.hpp"
#include "gaitforge/simulate.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge {

/// Scalar field sampled on an n x n grid over a shape window.
struct HeightField
{
  ShapeWindow window;
  int n = 0;
  /// 0, 1, 2 for the x, y, theta row of the total curvature; -1 for arbitrary scalar fields
  int component = 0;
  BodyFrameSpec frame;
  /// values[j * n + i] at (x(i), y(j))
  std::vector<double> values;
  /// exact evaluator used for cell centers and contour refinement
  std::function<double(ShapePoint)> sampler;

  double x(int i) const { return window.phi1_min + (window.phi1_max - window.phi1_min) * i / (n - 1); }
  double y(int j) const { return window.phi2_min + (window.phi2_max - window.phi2_min) * j / (n - 1); }
  double at(int i, int j) const { return values[static_cast<std::size_t>(j) * n + i]; }
  double dx() const { return (window.phi1_max - window.phi1_min) / (n - 1); }
  double dy() const { return (window.phi2_max - window.phi2_min) / (n - 1); }
  double min() const;
  double max() const;
  double range() const { return max() - min(); }
  /// value at p: the sampler when present, else bilinear interpolation
  double value(ShapePoint p) const;
};

/// Samples one row of the total curvature (grid-parallel). Requires n >= 33.
HeightField sample_height_field(const FramedConnection & a, const ShapeWindow & window, int n, int component = 0,
                                const DifferenceScheme & scheme = {});

/// Samples an arbitrary scalar field, for synthetic checks.
HeightField sample_scalar_field(const std::function<double(ShapePoint)> & f, const ShapeWindow & window, int n);

enum class ContourKind
{
  Closed,
  Open,
  JunctionBearing,
};

std::string to_string(ContourKind k);

struct Contour
{
  /// for closed contours the first point is not repeated at the end
  std::vector<ShapePoint> points;
  bool closed = false;
  ContourKind kind = ContourKind::Open;
  /// signed area of a closed contour (positive counter-clockwise)
  double area = 0.0;
};

struct Junction
{
  ShapePoint at;
  /// zero-level branches leaving the junction
  int branches = 0;
  double value = 0.0;
  double gradient = 0.0;
  /// distance from the saddle to the nearest zero-level branch (0 for an exact crossing)
  double gap = 0.0;
};

struct JunctionOptions
{
  /// saddles with |H| below this fraction of the field range count as junctions
  double level_fraction = 1e-2;
  /// |grad H| at the refined saddle below this fraction of range / window size
  double gradient_fraction = 1e-3;
  /// largest separation (rad) between the two nearly touching branches at a saddle
  double max_gap = 0.2;
};

struct ContourSet
{
  std::vector<Contour> contours;
  std::vector<Junction> junctions;
  /// no sign change anywhere in the field
  bool empty = false;

  std::vector<const Contour *> closed_loops() const;
};

/// Zero-level marching squares with linear edge interpolation. Saddle cells are resolved by the
/// cell-center value; segments are chained into polylines and each vertex gets one Newton pass
/// along the gradient when the field has an exact sampler.
ContourSet extract_zero_contours(const HeightField & field, const JunctionOptions & options = {});

/// Saddle points of H (Newton-refined on grad H = 0) whose level is near zero and which lie on the
/// zero set; at such points two zero-level branches cross or nearly touch.
std::vector<Junction> detect_junctions(const HeightField & field, const std::vector<Contour> & contours,
                                       const JunctionOptions & options = {});

/// The closed loop enclosing `p` with the smallest area, if any.
const Contour * innermost_loop(const ContourSet & set, ShapePoint p = {});

/// True when p lies inside the closed polygon.
bool point_in_polygon(const std::vector<ShapePoint> & polygon, ShapePoint p);

struct ContourGaitReport
{
  Gait gait;
  BodyPose line_integral;
  BodyPose cbvi;
  Eigen::Vector3d cbvi_integral;
  /// |cbvi.x - line.x| / |line.x|
  double relative_gap = 0.0;
};

/// Wraps a closed contour as a gait (counter-clockwise unless `clockwise`) and evaluates it by
/// line integration and cBVI. Throws JunctionBearing for contours through a junction (checked
/// first) and InvalidGait for other open contours.
ContourGaitReport contour_as_gait(const FramedConnection & a, const Contour & contour, bool clockwise = false);

/// Symmetric Hausdorff distance between two closed polylines, measured to segments.
double hausdorff_distance(const std::vector<ShapePoint> & p, const std::vector<ShapePoint> & q);

}  // namespace gaitforge
