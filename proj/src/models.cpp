#include "gaitforge/models.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "gaitforge/errors.hpp"
#include "gaitforge/se2.hpp"

namespace gaitforge {

namespace {

constexpr double kMinRcond = 1e-12;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

Eigen::Matrix3d rotate_translational(const Eigen::Matrix3d & local, double angle)
{
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  r.topLeftCorner<2, 2>() = se2::rotation(angle);
  return r * local * r.transpose();
}

// A = -K_bb^{-1} K_bs for a symmetric definite body block.
template<typename Error>
LocalConnection solve_connection(const Eigen::Matrix<double, 5, 5> & k, const char * what)
{
  const Eigen::Matrix3d kbb = k.topLeftCorner<3, 3>();
  const Eigen::Matrix<double, 3, 2> kbs = k.topRightCorner<3, 2>();
  // both blocks are definite up to sign; factor the positive one
  const double sign = kbb(2, 2) < 0.0 ? -1.0 : 1.0;
  Eigen::LLT<Eigen::Matrix3d> llt(sign * kbb);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
    throw Error(what);
  }
  return -llt.solve(sign * kbs);
}

}  // namespace

LinkPoses link_poses(const LinkLengths & l, ShapePoint phi)
{
  const double c1 = std::cos(phi.phi1), s1 = std::sin(phi.phi1);
  const double c2 = std::cos(phi.phi2), s2 = std::sin(phi.phi2);

  LinkPoses p;
  p.center[0] = Eigen::Vector2d::Zero();
  p.center[1] = Eigen::Vector2d(l[0] / 2.0 + l[1] / 2.0 * c1, l[1] / 2.0 * s1);
  p.center[2] = Eigen::Vector2d(-l[0] / 2.0 - l[2] / 2.0 * c2, l[2] / 2.0 * s2);
  p.angle = {0.0, phi.phi1, -phi.phi2};

  p.center_jacobian[0].setZero();
  p.center_jacobian[1] << -l[1] / 2.0 * s1, 0.0, l[1] / 2.0 * c1, 0.0;
  p.center_jacobian[2] << 0.0, l[2] / 2.0 * s2, 0.0, l[2] / 2.0 * c2;
  p.angle_jacobian[0] << 0.0, 0.0;
  p.angle_jacobian[1] << 1.0, 0.0;
  p.angle_jacobian[2] << 0.0, -1.0;
  return p;
}

std::array<LinkJacobian, 3> link_jacobians(const LinkLengths & lengths, ShapePoint phi)
{
  const LinkPoses poses = link_poses(lengths, phi);
  std::array<LinkJacobian, 3> out;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d & c = poses.center[i];
    LinkJacobian & j = out[i];
    j.setZero();
    // rigid transport of the body twist to the link center
    j(0, 0) = 1.0;
    j(1, 1) = 1.0;
    j(0, 2) = -c.y();
    j(1, 2) = c.x();
    j(2, 2) = 1.0;
    j.block<2, 2>(0, 3) = poses.center_jacobian[i];
    j.block<1, 2>(2, 3) = poses.angle_jacobian[i];
  }
  return out;
}

void PurcellParams::validate() const
{
  if (!finite_positive(l0) || !finite_positive(l1) || !finite_positive(l2)) {
    throw InvalidParameters("purcell: link lengths must be positive");
  }
  if (std::abs(l1 - l2) > 1e-12 * std::max(l1, l2)) {
    throw InvalidParameters("purcell: outer links must have equal length (l1 == l2)");
  }
  if (!finite_positive(ct) || !finite_positive(cn) || cn < ct) {
    throw InvalidParameters("purcell: drag coefficients must satisfy cn >= ct > 0");
  }
}

PerfectFluidParams PerfectFluidParams::from_eta(double eta, double alpha, double rho, double total_length)
{
  if (!(eta > 0.0 && eta < 1.0)) {
    throw InvalidParameters("perfect_fluid: eta must lie in (0, 1)");
  }
  PerfectFluidParams p;
  const double r = (1.0 - eta) / (2.0 * eta);
  const double outer = total_length / (r + 2.0);
  p.lengths = {r * outer, outer, outer};
  p.alpha = alpha;
  p.rho = rho;
  return p;
}

double PerfectFluidParams::mass(int i) const
{
  return rho * std::numbers::pi * semi_major(i) * semi_minor(i);
}

double PerfectFluidParams::inertia(int i) const
{
  const double a = semi_major(i), b = semi_minor(i);
  return mass(i) * (a * a + b * b) / 4.0;
}

Eigen::Matrix3d PerfectFluidParams::link_mass_matrix(int i) const
{
  const double a = semi_major(i), b = semi_minor(i);
  const double m = mass(i);
  const double diff = a * a - b * b;
  const double rot = rotational == RotationalAddedMass::Squared ? diff * diff / 8.0 : diff / 8.0;
  const double k = std::numbers::pi * rho;
  return Eigen::Vector3d(m + k * b * b, m + k * a * a, inertia(i) + k * rot).asDiagonal();
}

void PerfectFluidParams::validate() const
{
  for (double l : lengths) {
    if (!finite_positive(l)) {
      throw InvalidParameters("perfect_fluid: link lengths must be positive");
    }
  }
  if (std::abs(lengths[1] - lengths[2]) > 1e-12 * lengths[1]) {
    throw InvalidParameters("perfect_fluid: outer links must have equal length");
  }
  if (!finite_positive(alpha) || !finite_positive(rho)) {
    throw InvalidParameters("perfect_fluid: alpha and rho must be positive");
  }
  for (int i = 0; i < 3; ++i) {
    if (!finite_positive(mass(i)) || !finite_positive(inertia(i))) {
      throw InvalidParameters("perfect_fluid: derived link mass and inertia must be positive");
    }
  }
}

LocalConnection purcell_connection(const PurcellParams & p, ShapePoint phi)
{
  const LinkLengths l = p.lengths();
  const auto jac = link_jacobians(l, phi);
  const LinkPoses poses = link_poses(l, phi);
  Eigen::Matrix<double, 5, 5> c = Eigen::Matrix<double, 5, 5>::Zero();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d local(p.ct * l[i], p.cn * l[i], p.cn * l[i] * l[i] * l[i] / 12.0);
    const Eigen::Matrix3d d = rotate_translational(local.asDiagonal(), poses.angle[i]);
    c.noalias() -= jac[i].transpose() * d * jac[i];
  }
  return solve_connection<SingularResistance>(c, "purcell: body resistance block is singular");
}

Eigen::Matrix3d perfect_fluid_body_inertia(const PerfectFluidParams & p, ShapePoint phi)
{
  const auto jac = link_jacobians(p.lengths, phi);
  const LinkPoses poses = link_poses(p.lengths, phi);
  Eigen::Matrix3d mbb = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Matrix3d m = rotate_translational(p.link_mass_matrix(i), poses.angle[i]);
    const Eigen::Matrix3d jb = jac[i].leftCols<3>();
    mbb.noalias() += jb.transpose() * m * jb;
  }
  return mbb;
}

LocalConnection perfect_fluid_connection(const PerfectFluidParams & p, ShapePoint phi)
{
  const auto jac = link_jacobians(p.lengths, phi);
  const LinkPoses poses = link_poses(p.lengths, phi);
  Eigen::Matrix<double, 5, 5> m = Eigen::Matrix<double, 5, 5>::Zero();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Matrix3d mi = rotate_translational(p.link_mass_matrix(i), poses.angle[i]);
    m.noalias() += jac[i].transpose() * mi * jac[i];
  }
  return solve_connection<SingularInertia>(m, "perfect_fluid: body inertia block is singular");
}

SwimmerModel::SwimmerModel(Params params) : params_(std::move(params))
{
  std::visit(
    [this](const auto & p) {
      using T = std::decay_t<decltype(p)>;
      if constexpr (std::is_same_v<T, PurcellParams>) {
        p.validate();
        lengths_ = p.lengths();
      } else if constexpr (std::is_same_v<T, PerfectFluidParams>) {
        p.validate();
        lengths_ = p.lengths;
      } else {
        if (!p.field) {
          throw InvalidParameters("synthetic model without a field");
        }
        lengths_ = p.lengths;
      }
    },
    params_);
}

LocalConnection SwimmerModel::connection(ShapePoint phi) const
{
  return std::visit(
    [phi](const auto & p) -> LocalConnection {
      using T = std::decay_t<decltype(p)>;
      if constexpr (std::is_same_v<T, PurcellParams>) {
        return purcell_connection(p, phi);
      } else if constexpr (std::is_same_v<T, PerfectFluidParams>) {
        return perfect_fluid_connection(p, phi);
      } else {
        return p.field(phi);
      }
    },
    params_);
}

std::string SwimmerModel::kind() const
{
  return std::visit(
    [](const auto & p) -> std::string {
      using T = std::decay_t<decltype(p)>;
      if constexpr (std::is_same_v<T, PurcellParams>) {
        return "purcell";
      } else if constexpr (std::is_same_v<T, PerfectFluidParams>) {
        return "perfect_fluid";
      } else {
        return "synthetic:" + p.name;
      }
    },
    params_);
}

}  // namespace gaitforge
