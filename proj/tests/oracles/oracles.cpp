#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <variant>

#include <Eigen/Dense>

namespace oracle {

using gaitforge::LocalConnection;
using gaitforge::ShapePoint;

namespace {

constexpr double pi = 3.14159265358979323846;

// q = (x, y, theta, phi1, phi2); theta is the middle link's heading.
using Config = Eigen::Matrix<double, 5, 1>;

struct LinkState
{
  double cx, cy, angle;
};

// World placement of link k written directly from the chain geometry.
LinkState place(const std::array<double, 3> & len, const Config & q, int k)
{
  const double x = q(0), y = q(1), th = q(2);
  const double ux = std::cos(th), uy = std::sin(th);
  if (k == 0) {
    return {x, y, th};
  }
  if (k == 1) {
    const double jx = x + 0.5 * len[0] * ux, jy = y + 0.5 * len[0] * uy;
    const double a = th + q(3);
    return {jx + 0.5 * len[1] * std::cos(a), jy + 0.5 * len[1] * std::sin(a), a};
  }
  const double jx = x - 0.5 * len[0] * ux, jy = y - 0.5 * len[0] * uy;
  const double a = th - q(4);
  return {jx - 0.5 * len[2] * std::cos(a), jy - 0.5 * len[2] * std::sin(a), a};
}

// 3x5 velocity Jacobian of link k (world vx, vy, omega) by central differences.
Eigen::Matrix<double, 3, 5> jacobian(const std::array<double, 3> & len, const Config & q, int k)
{
  Eigen::Matrix<double, 3, 5> j;
  const double h = 1e-6;
  for (int c = 0; c < 5; ++c) {
    Config qp = q, qm = q;
    qp(c) += h;
    qm(c) -= h;
    const LinkState p = place(len, qp, k), m = place(len, qm, k);
    j(0, c) = (p.cx - m.cx) / (2 * h);
    j(1, c) = (p.cy - m.cy) / (2 * h);
    j(2, c) = (p.angle - m.angle) / (2 * h);
  }
  return j;
}

Config at_shape(ShapePoint phi)
{
  Config q;
  q << 0.0, 0.0, 0.0, phi.phi1, phi.phi2;
  return q;
}

LocalConnection solve_locked(const Eigen::Matrix<double, 3, 5> & k)
{
  const Eigen::Matrix3d kg = k.leftCols<3>();
  const Eigen::Matrix<double, 3, 2> kf = k.rightCols<2>();
  return -kg.fullPivLu().solve(kf);
}

}  // namespace

LocalConnection connection(const gaitforge::PurcellParams & p, ShapePoint phi)
{
  const std::array<double, 3> len = {p.l0, p.l1, p.l2};
  const Config q = at_shape(phi);
  std::array<Eigen::Matrix<double, 3, 5>, 3> jac;
  std::array<LinkState, 3> links;
  for (int k = 0; k < 3; ++k) {
    jac[k] = jacobian(len, q, k);
    links[k] = place(len, q, k);
  }
  // Column c: total force and torque about the world origin for unit velocity of coordinate c.
  Eigen::Matrix<double, 3, 5> wrench = Eigen::Matrix<double, 3, 5>::Zero();
  for (int c = 0; c < 5; ++c) {
    for (int k = 0; k < 3; ++k) {
      const double vx = jac[k](0, c), vy = jac[k](1, c), w = jac[k](2, c);
      const double tx = std::cos(links[k].angle), ty = std::sin(links[k].angle);
      const double nx = -ty, ny = tx;
      const double vt = vx * tx + vy * ty, vn = vx * nx + vy * ny;
      const double fx = -(p.ct * len[k] * vt * tx + p.cn * len[k] * vn * nx);
      const double fy = -(p.ct * len[k] * vt * ty + p.cn * len[k] * vn * ny);
      const double torque = -p.cn * std::pow(len[k], 3) / 12.0 * w;
      wrench(0, c) += fx;
      wrench(1, c) += fy;
      wrench(2, c) += torque + links[k].cx * fy - links[k].cy * fx;
    }
  }
  return solve_locked(wrench);
}

LocalConnection connection(const gaitforge::PerfectFluidParams & p, ShapePoint phi)
{
  const std::array<double, 3> len = p.lengths;
  const Config q = at_shape(phi);
  std::array<Eigen::Matrix<double, 3, 5>, 3> jac;
  std::array<LinkState, 3> links;
  for (int k = 0; k < 3; ++k) {
    jac[k] = jacobian(len, q, k);
    links[k] = place(len, q, k);
  }
  auto energy = [&](const Config & qd) {
    double t = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double a = 0.5 * len[k], b = p.alpha * a;
      const double mass = p.rho * pi * a * b;
      const double inertia = mass * (a * a + b * b) / 4.0;
      const double d = a * a - b * b;
      const double rot = p.rotational == gaitforge::RotationalAddedMass::Squared ? d * d / 8.0 : d / 8.0;
      const double m_axial = mass + p.rho * pi * b * b;
      const double m_lateral = mass + p.rho * pi * a * a;
      const double m_rot = inertia + p.rho * pi * rot;
      const Eigen::Vector3d v = jac[k] * qd;
      const double tx = std::cos(links[k].angle), ty = std::sin(links[k].angle);
      const double along = v(0) * tx + v(1) * ty, across = -v(0) * ty + v(1) * tx;
      t += 0.5 * (m_axial * along * along + m_lateral * across * across + m_rot * v(2) * v(2));
    }
    return t;
  };
  // polarization: M_jk = T(e_j + e_k) - T(e_j) - T(e_k)
  Eigen::Matrix<double, 5, 5> m;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      const Config er = Config::Unit(r), ec = Config::Unit(c);
      m(r, c) = r == c ? 2.0 * energy(er) : energy(er + ec) - energy(er) - energy(ec);
    }
  }
  return solve_locked(m.topRows<3>());
}

OracleResult connection_result(const gaitforge::SwimmerModel & model, ShapePoint phi)
{
  OracleResult r;
  r.quantity = "local connection";
  r.tolerance = 1e-6;
  if (const auto * p = std::get_if<gaitforge::PurcellParams>(&model.params())) {
    r.value = connection(*p, phi);
    r.note = "force/torque balance, finite-difference Jacobians";
  } else if (const auto * f = std::get_if<gaitforge::PerfectFluidParams>(&model.params())) {
    r.value = connection(*f, phi);
    r.note = "zero momentum, polarized kinetic energy";
  } else {
    throw std::invalid_argument("no oracle for synthetic models");
  }
  return r;
}

Eigen::Vector3d commutator(const LocalConnection & a)
{
  auto hat = [](const Eigen::Vector3d & v) {
    Eigen::Matrix3d x = Eigen::Matrix3d::Zero();
    x(0, 1) = -v(2);
    x(1, 0) = v(2);
    x(0, 2) = v(0);
    x(1, 2) = v(1);
    return x;
  };
  const Eigen::Matrix3d x1 = hat(a.col(0)), x2 = hat(a.col(1));
  const Eigen::Matrix3d c = x1 * x2 - x2 * x1;
  return {c(0, 2), c(1, 2), c(1, 0)};
}

Eigen::Vector3d costate_gradient(const gaitforge::FramedConnection & a, const gaitforge::pmp::OcpState & s,
                                 const Eigen::Vector2d & u, double h)
{
  auto hamiltonian = [&](double phi1, double phi2, double theta) {
    const LocalConnection A = a({phi1, phi2});
    const Eigen::Vector3d body = A * u;
    const double xdot = std::cos(theta) * body(0) - std::sin(theta) * body(1);
    return xdot + s.lambda1 * u(0) + s.lambda2 * u(1) + s.lambda3 * body(2);
  };
  Eigen::Vector3d g;
  g(0) = -(hamiltonian(s.phi1 + h, s.phi2, s.theta) - hamiltonian(s.phi1 - h, s.phi2, s.theta)) / (2 * h);
  g(1) = -(hamiltonian(s.phi1, s.phi2 + h, s.theta) - hamiltonian(s.phi1, s.phi2 - h, s.theta)) / (2 * h);
  g(2) = -(hamiltonian(s.phi1, s.phi2, s.theta + h) - hamiltonian(s.phi1, s.phi2, s.theta - h)) / (2 * h);
  return g;
}

}  // namespace oracle
