#pragma once

#include <array>
#include <vector>

#include "gaitforge/models.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge {

/// Reference frame for body motion: a convex combination of link positions and link angles.
struct BodyFrameSpec
{
  enum class Kind
  {
    MiddleLink,
    Weighted,
  };

  Kind kind = Kind::MiddleLink;
  std::array<double, 3> position_weights = {1.0, 0.0, 0.0};
  std::array<double, 3> orientation_weights = {1.0, 0.0, 0.0};

  static BodyFrameSpec middle_link() { return {}; }
  static BodyFrameSpec weighted(const std::array<double, 3> & position,
                                const std::array<double, 3> & orientation);

  /// Throws InvalidParameters unless weights are nonnegative and sum to one.
  void validate() const;
};

/// Pose of the chosen frame relative to the middle link, as a function of shape.
BodyPose frame_offset(const LinkLengths & lengths, const BodyFrameSpec & frame, ShapePoint phi);

/// Local connection of a model re-expressed in a body frame.
class FramedConnection
{
public:
  explicit FramedConnection(SwimmerModel model, BodyFrameSpec frame = BodyFrameSpec::middle_link());

  LocalConnection operator()(ShapePoint phi) const;

  const SwimmerModel & model() const { return model_; }
  const BodyFrameSpec & frame() const { return frame_; }

private:
  SwimmerModel model_;
  BodyFrameSpec frame_;
};

struct DifferenceScheme
{
  /// step; <= 0 selects 1e-5 * max(1, |phi|) for order 2 and 1e-3 * max(1, |phi|) for order 4
  double step = 0.0;
  /// 2 (three-point central) or 4 (five-point central)
  int order = 2;
};

/// d/dphi1 and d/dphi2 of the connection by central differences.
std::array<LocalConnection, 2> connection_gradient(const FramedConnection & a, ShapePoint phi,
                                                   const DifferenceScheme & scheme = {});

/// Row-wise curl dA = dA_col2/dphi1 - dA_col1/dphi2.
Eigen::Vector3d exterior_derivative(const FramedConnection & a, ShapePoint phi,
                                    const DifferenceScheme & scheme = {});

/// [A1, A2] of the two connection columns taken as planar twists; theta part is exactly 0.
Eigen::Vector3d lie_bracket(const LocalConnection & a);

struct CurvatureSample
{
  ShapePoint phi;
  Eigen::Vector3d dA;
  Eigen::Vector3d bracket;
  /// total curvature, the integrand of the corrected body velocity integral
  Eigen::Vector3d DA;
};

/// Total curvature of the connection.
///
/// Body velocity here is +A phi_dot, so the second-order flow around an
/// infinitesimal ccw loop is (dA + [A1, A2]) times its area. The often-quoted
/// dA - [A1, A2] is the same quantity written for the opposite sign convention
/// of A.
CurvatureSample curvature(const FramedConnection & a, ShapePoint phi, const DifferenceScheme & scheme = {});

/// Gradient of the total curvature (3x2: rows x/y/theta, cols d/dphi1, d/dphi2).
Eigen::Matrix<double, 3, 2> curvature_gradient(const FramedConnection & a, ShapePoint phi,
                                               double step = 1e-3);

/// Connection, its gradient, total curvature and curvature gradient at one point, from a shared
/// lattice of connection samples (fourth-order stencils with spacing `step`).
struct CurvatureJet
{
  LocalConnection A;
  std::array<LocalConnection, 2> dA;
  Eigen::Vector3d DA;
  Eigen::Matrix<double, 3, 2> dDA;
};

CurvatureJet curvature_jet(const FramedConnection & a, ShapePoint phi, double step = 1e-3, bool gradient = true);

/// Mean squared Frobenius norm of the framed connection over an n x n grid on a window.
struct ShapeWindow
{
  double phi1_min = -3.0, phi1_max = 3.0;
  double phi2_min = -3.0, phi2_max = 3.0;

  static ShapeWindow square(double half) { return {-half, half, -half, half}; }
  bool contains(ShapePoint p) const
  {
    return p.phi1 >= phi1_min && p.phi1 <= phi1_max && p.phi2 >= phi2_min && p.phi2 <= phi2_max;
  }
};

double frame_objective(const SwimmerModel & model, const BodyFrameSpec & frame, const ShapeWindow & window,
                       int grid = 25);

struct FrameOptimization
{
  BodyFrameSpec frame;
  double objective = 0.0;
  double initial_objective = 0.0;
  int iterations = 0;
  /// set when the optimizer could not improve on the initial frame
  bool already_optimal = false;
};

/// Minimizes frame_objective over constant convex weights by Nelder-Mead on the product simplex.
FrameOptimization optimize_frame(const SwimmerModel & model, const ShapeWindow & window,
                                 const BodyFrameSpec & init = BodyFrameSpec::middle_link(), int grid = 25);

/// Corrected body velocity integral over a simple closed region (polygon, any orientation).
struct CbviResult
{
  /// surface integral of the total curvature, signed by the region orientation
  Eigen::Vector3d integral;
  /// exp of the integral as a pose displacement
  BodyPose displacement;
  int triangles = 0;
  long evaluations = 0;
};

struct CbviOptions
{
  double tolerance = 1e-7;
  int max_depth = 12;
  DifferenceScheme scheme = {};
};

CbviResult cbvi(const FramedConnection & a, const std::vector<ShapePoint> & region,
                const CbviOptions & options = {});

/// SE(2) exponential used to report a cBVI vector as a displacement.
BodyPose cbvi_exponential(const Eigen::Vector3d & integral);

}  // namespace gaitforge
