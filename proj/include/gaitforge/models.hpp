#pragma once

#include <array>
#include <functional>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "gaitforge/types.hpp"

namespace gaitforge {

/// Link lengths (middle, front, rear). Index 0 is the middle link carrying the body frame.
using LinkLengths = std::array<double, 3>;

/// Link configuration relative to the middle-link frame.
///
/// Link 0 sits at the origin along +x. Link 1 (front) hangs off the front joint
/// with absolute angle phi1; link 2 (rear) hangs off the rear joint with absolute
/// angle -phi2. With this convention phi1 == phi2 is the fore-aft symmetric
/// "C" posture and phi1 == -phi2 the "S" posture.
struct LinkPoses
{
  std::array<Eigen::Vector2d, 3> center;
  std::array<double, 3> angle;
  /// d(center_i)/d(phi1, phi2)
  std::array<Eigen::Matrix2d, 3> center_jacobian;
  /// d(angle_i)/d(phi1, phi2)
  std::array<Eigen::RowVector2d, 3> angle_jacobian;
};

LinkPoses link_poses(const LinkLengths & lengths, ShapePoint phi);

using LinkJacobian = Eigen::Matrix<double, 3, 5>;

/// Maps [body velocity; joint velocity] to each link's (center velocity, angular velocity),
/// expressed along the middle-link axes.
std::array<LinkJacobian, 3> link_jacobians(const LinkLengths & lengths, ShapePoint phi);

struct PurcellParams
{
  double l0 = 1.0 / 3.0;
  double l1 = 1.0 / 3.0;
  double l2 = 1.0 / 3.0;
  /// tangential drag per unit length
  double ct = 1.0;
  /// normal drag per unit length
  double cn = 2.0;

  LinkLengths lengths() const { return {l0, l1, l2}; }
  /// Throws InvalidParameters.
  void validate() const;
};

/// Which rotational added-mass expression to use for an elliptic link.
enum class RotationalAddedMass
{
  /// pi rho (a^2 - b^2)^2 / 8, the classical potential-flow value
  Squared,
  /// pi rho (a^2 - b^2) / 8
  Linear,
};

/// Perfect-fluid swimmer. Each link is a solid ellipse whose semi-major axis a_i = l_i / 2
/// lies along the link and whose semi-minor axis is b_i = alpha * a_i.
struct PerfectFluidParams
{
  LinkLengths lengths = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double alpha = 0.2;
  double rho = 1.0;
  RotationalAddedMass rotational = RotationalAddedMass::Squared;

  /// eta = l_outer / (l_outer + 2 l_middle), so l_middle / l_outer = (1 - eta) / (2 eta).
  /// eta = 1/3 gives equal links and eta = 1/2 a middle link half as long as each outer link.
  /// Lengths are scaled so that l0 + l1 + l2 = total_length.
  static PerfectFluidParams from_eta(double eta, double alpha = 0.2, double rho = 1.0,
                                     double total_length = 1.0);

  double semi_major(int i) const { return lengths[i] / 2.0; }
  double semi_minor(int i) const { return alpha * lengths[i] / 2.0; }
  double mass(int i) const;
  double inertia(int i) const;
  /// Link mass matrix (body + added mass) in the link's own axes.
  Eigen::Matrix3d link_mass_matrix(int i) const;

  void validate() const;
};

LocalConnection purcell_connection(const PurcellParams & params, ShapePoint phi);
LocalConnection perfect_fluid_connection(const PerfectFluidParams & params, ShapePoint phi);

/// Body-block of the perfect-fluid mass matrix, exposed for positivity checks.
Eigen::Matrix3d perfect_fluid_body_inertia(const PerfectFluidParams & params, ShapePoint phi);

/// Arbitrary connection field; used for synthetic and test models.
struct SyntheticField
{
  std::string name;
  std::function<LocalConnection(ShapePoint)> field;
  LinkLengths lengths = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

/// Immutable swimmer model. Connection evaluation is pure and thread-safe.
class SwimmerModel
{
public:
  using Params = std::variant<PurcellParams, PerfectFluidParams, SyntheticField>;

  explicit SwimmerModel(Params params);

  static SwimmerModel purcell(const PurcellParams & p = {}) { return SwimmerModel(p); }
  static SwimmerModel perfect_fluid(const PerfectFluidParams & p = {}) { return SwimmerModel(p); }
  static SwimmerModel synthetic(SyntheticField f) { return SwimmerModel(std::move(f)); }

  LocalConnection connection(ShapePoint phi) const;
  const LinkLengths & lengths() const { return lengths_; }
  const Params & params() const { return params_; }
  std::string kind() const;

private:
  Params params_;
  LinkLengths lengths_;
};

}  // namespace gaitforge
