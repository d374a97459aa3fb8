#pragma once

#include <array>
#include <string>

#include <Eigen/Core>

#include "gaitforge/connection.hpp"
#include "gaitforge/models.hpp"
#include "gaitforge/pmp.hpp"

// Brute-force reference computations for the test suite. Nothing here calls the kernel's
// arithmetic: link placement, Jacobians, force and energy balances are rebuilt from scratch.
namespace oracle {

struct OracleResult
{
  std::string quantity;
  Eigen::MatrixXd value;
  double tolerance = 0.0;
  std::string note;
};

/// Connection from world-frame force/torque balance with finite-difference link Jacobians.
gaitforge::LocalConnection connection(const gaitforge::PurcellParams & p, gaitforge::ShapePoint phi);

/// Connection from zero total momentum, mass matrix obtained by polarizing the kinetic energy.
gaitforge::LocalConnection connection(const gaitforge::PerfectFluidParams & p, gaitforge::ShapePoint phi);

OracleResult connection_result(const gaitforge::SwimmerModel & model, gaitforge::ShapePoint phi);

/// Bracket of the two columns as 3x3 se(2) matrices, X1 X2 - X2 X1.
Eigen::Vector3d commutator(const gaitforge::LocalConnection & a);

/// -dH/dz for z = (phi1, phi2, theta) by central differences of the input-linear Hamiltonian
/// H = x_dot + lambda . z_dot, written out independently.
Eigen::Vector3d costate_gradient(const gaitforge::FramedConnection & a, const gaitforge::pmp::OcpState & s,
                                 const Eigen::Vector2d & u, double h = 1e-5);

}  // namespace oracle
