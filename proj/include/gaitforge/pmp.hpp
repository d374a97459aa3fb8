#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gaitforge/connection.hpp"
#include "gaitforge/simulate.hpp"
#include "gaitforge/types.hpp"

namespace gaitforge::pmp {

/// State z = (phi1, phi2, theta) with costates (lambda1, lambda2, lambda3).
struct OcpState
{
  double phi1 = 0.0;
  double phi2 = 0.0;
  double theta = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;

  ShapePoint shape() const { return {phi1, phi2}; }
  Eigen::Matrix<double, 6, 1> vec() const;
  static OcpState from(const Eigen::Matrix<double, 6, 1> & v);
};

/// Finite-difference settings for every model partial used by the solver.
struct Differencing
{
  /// step of the fourth-order stencils for dA and grad(DA)
  double step = 1e-3;
};

/// World-frame x-row of G = R(theta) A(phi): x_dot = g u1 + h u2.
struct CostRow
{
  double g = 0.0;
  double h = 0.0;
};

CostRow cost_integrand(const LocalConnection & a, double theta);
CostRow cost_integrand(const FramedConnection & a, const OcpState & s);

/// Everything the optimality conditions need at one point.
struct LocalData
{
  LocalConnection A;
  /// d/dphi1 and d/dphi2 of A
  std::array<LocalConnection, 2> dA;
  /// total curvature and its gradient (rows x, y, theta; cols phi1, phi2)
  Eigen::Vector3d DA;
  Eigen::Matrix<double, 3, 2> dDA;
  CostRow cost;
  /// d(g, h)/dtheta
  CostRow cost_theta;
  /// switching function (time derivative of H_u, with H_u = 0)
  double psi = 0.0;
  /// d(psi)/dt = a_coef u1 + b_coef u2
  double a_coef = 0.0;
  double b_coef = 0.0;
};

LocalData local_data(const FramedConnection & a, const OcpState & s, const Differencing & d = {});

/// Switching function alone (no gradient of the curvature needed).
double switching_function(const FramedConnection & a, const OcpState & s, const Differencing & d = {});

/// Hamiltonian H = (g + lambda1 + lambda3 p) u1 + (h + lambda2 + lambda3 q) u2.
double hamiltonian(const LocalConnection & a, const OcpState & s, const Eigen::Vector2d & u);

/// H_u = (dH/du1, dH/du2).
Eigen::Vector2d hamiltonian_gradient_u(const LocalConnection & a, const OcpState & s);

/// Canonical equations (dH/dlambda, -dH/dz) at a given control, with analytic theta partials and
/// finite-difference shape partials.
Eigen::Matrix<double, 6, 1> canonical_rhs(const FramedConnection & a, const OcpState & s, const Eigen::Vector2d & u,
                                          const Differencing & d = {});

/// Singular-arc control u = sign * (B, -A) / |(A, B)|. Throws SingularArcBreakdown when
/// A^2 + B^2 < 1e-20.
Eigen::Vector2d singular_control(const LocalData & ld, double sign, double t = 0.0, const OcpState & s = {});

/// Time derivatives of (phi1, phi2, theta, lambda1, lambda2, lambda3) on a singular arc.
Eigen::Matrix<double, 6, 1> singular_arc_rhs(const FramedConnection & a, const OcpState & s, double sign,
                                             const Differencing & d = {});

/// lambda3(0) solving psi = 0 at theta = 0 on the diagonal, with lambda1(0) = -lambda2(0)
/// from H_u(0) = 0. Throws NoRoot when the lambda3 coefficient is below 1e-14.
OcpState initial_costate(const FramedConnection & a, double phi_diagonal, const Differencing & d = {});

enum class ArcKind
{
  Singular,
  Bound,
};

struct ArcSample
{
  double t = 0.0;
  OcpState state;
  Eigen::Vector2d u = Eigen::Vector2d::Zero();
  ArcKind arc = ArcKind::Singular;
  double psi = 0.0;
  double hamiltonian = 0.0;
  Eigen::Vector2d hu = Eigen::Vector2d::Zero();
  /// bound-arc multiplier (0 on singular arcs)
  double nu = 0.0;
};

struct Diagnostics
{
  double max_hu = 0.0;
  double max_psi = 0.0;
  double hamiltonian_drift = 0.0;
  double hamiltonian_jump = 0.0;
  double lambda3_final = 0.0;
  double lambda_gap_final = 0.0;
  double closure_error = 0.0;
};

struct PmpSolution
{
  bool converged = false;
  std::string branch;
  std::optional<double> bound;
  double phi1_0 = 0.0;
  double lambda3_0 = 0.0;
  std::optional<double> tau1;
  std::optional<double> tau2;
  /// every bound-arc entry and exit time (the first of each are tau1, tau2)
  std::vector<double> bound_entries;
  std::vector<double> bound_exits;
  double t_final = 0.0;
  std::vector<ArcSample> quarter;
  /// closed polyline built from the quarter by the swimmer's symmetries
  std::vector<ShapePoint> full_gait;
  /// net displacement of the full gait by line integration
  BodyPose displacement;
  Diagnostics diagnostics;
  int residual_evaluations = 0;
};

struct ShootOptions
{
  Differencing differencing;
  double rtol = 1e-11;
  double atol = 1e-12;
  /// diagonal scan for sign changes of the shooting residual
  double scan_min = 0.02;
  double scan_max = 4.5;
  double scan_step = 0.02;
  /// root tolerance on phi1(0) and acceptance tolerance on |lambda3(tf)|
  double root_tol = 1e-12;
  double residual_tol = 1e-8;
  /// give up on an arc that has not reached the anti-diagonal after this much arc length
  double max_time = 12.0;
  /// bound arcs allowed in one quarter
  int max_bound_arcs = 4;
  /// length of bound arc integrated before looking for the switching-function exit
  double bound_lead = 1e-4;
  /// dense-output samples recorded per accepted step
  int substeps = 4;
};

/// Result of one shot from the diagonal point (a, a).
struct Shot
{
  double phi1_0 = 0.0;
  /// lambda3 at the anti-diagonal; NaN when the arc failed
  double residual = 0.0;
  std::string failure;
};

/// Shooting residual lambda3(tf) over a grid of diagonal starting points (parallel).
std::vector<Shot> scan_unbounded(const FramedConnection & a, const ShootOptions & options = {});
std::vector<Shot> scan_bounded(const FramedConnection & a, double bound, const ShootOptions & options = {});

/// Unbounded quarter-gait shooting on a bracket [lo, hi] of phi1(0). Throws NoBracket if the
/// residual does not change sign; SingularArcBreakdown propagates from the arcs.
PmpSolution shoot_unbounded(const FramedConnection & a, double lo, double hi, const ShootOptions & options = {});

/// Branch-level driver. Scans the diagonal upward and returns the first converged root with
/// dx >= 0 ("forward") or dx < 0 ("reverse"). Throws NoBracket, or SingularArcBreakdown when
/// scanned arcs lost their tangent.
PmpSolution solve_unbounded(const FramedConnection & a, const std::string & branch,
                            const ShootOptions & options = {});

/// Bounded problem with |phi2| <= b active on the first quarter.
PmpSolution shoot_bounded(const FramedConnection & a, double bound, double lo, double hi,
                          const ShootOptions & options = {});

/// First converged bounded solution on the diagonal scan (the reverse branch).
PmpSolution solve_bounded(const FramedConnection & a, double bound, const ShootOptions & options = {});

/// Single shot with diagnostics and full-gait reconstruction.
PmpSolution evaluate_unbounded(const FramedConnection & a, double phi1_0, const ShootOptions & options = {});
PmpSolution evaluate_bounded(const FramedConnection & a, double bound, double phi1_0,
                             const ShootOptions & options = {});

/// Closed gait from one quarter by reflection across the anti-diagonal, point reflection and
/// reflection across the diagonal.
std::vector<ShapePoint> reconstruct_gait(const std::vector<ShapePoint> & quarter);

}  // namespace gaitforge::pmp
