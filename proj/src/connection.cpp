#include "gaitforge/connection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "gaitforge/errors.hpp"
#include "gaitforge/parallel.hpp"
#include "gaitforge/quadrature.hpp"
#include "gaitforge/se2.hpp"

namespace gaitforge {

BodyFrameSpec BodyFrameSpec::weighted(const std::array<double, 3> & position,
                                      const std::array<double, 3> & orientation)
{
  BodyFrameSpec f;
  f.kind = Kind::Weighted;
  f.position_weights = position;
  f.orientation_weights = orientation;
  f.validate();
  return f;
}

void BodyFrameSpec::validate() const
{
  for (const auto * w : {&position_weights, &orientation_weights}) {
    double sum = 0.0;
    for (double v : *w) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidParameters("frame weights must be finite and nonnegative");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw InvalidParameters("frame weights must sum to one");
    }
  }
}

namespace {

struct Offset
{
  BodyPose pose;
  Eigen::Matrix2d dp;
  Eigen::RowVector2d dbeta;
};

Offset offset_with_jacobian(const LinkPoses & lp, const BodyFrameSpec & f)
{
  Offset o;
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  double beta = 0.0;
  o.dp.setZero();
  o.dbeta.setZero();
  for (int i = 0; i < 3; ++i) {
    p += f.position_weights[i] * lp.center[i];
    o.dp += f.position_weights[i] * lp.center_jacobian[i];
    beta += f.orientation_weights[i] * lp.angle[i];
    o.dbeta += f.orientation_weights[i] * lp.angle_jacobian[i];
  }
  o.pose = {p.x(), p.y(), beta};
  return o;
}

LocalConnection reframe(const LocalConnection & base, const Offset & o)
{
  const BodyPose inv = se2::inverse(o.pose);
  const Eigen::Matrix2d rt = se2::rotation(-o.pose.theta);
  LocalConnection out;
  for (int j = 0; j < 2; ++j) {
    Twist xi = se2::adjoint(inv, base.col(j));
    xi.head<2>() += rt * o.dp.col(j);
    xi(2) += o.dbeta(j);
    out.col(j) = xi;
  }
  return out;
}

double default_step(ShapePoint phi, int order)
{
  const double scale = std::max({1.0, std::abs(phi.phi1), std::abs(phi.phi2)});
  return (order == 4 ? 1e-3 : 1e-5) * scale;
}

template<typename F>
auto central(const F & f, ShapePoint phi, int axis, double h, int order)
{
  const ShapePoint e = axis == 0 ? ShapePoint{h, 0.0} : ShapePoint{0.0, h};
  if (order == 4) {
    return ((-f(phi + 2.0 * e) + 8.0 * f(phi + e) - 8.0 * f(phi - e) + f(phi - 2.0 * e)) / (12.0 * h)).eval();
  }
  return ((f(phi + e) - f(phi - e)) / (2.0 * h)).eval();
}

}  // namespace

BodyPose frame_offset(const LinkLengths & lengths, const BodyFrameSpec & frame, ShapePoint phi)
{
  if (frame.kind == BodyFrameSpec::Kind::MiddleLink) {
    return {};
  }
  return offset_with_jacobian(link_poses(lengths, phi), frame).pose;
}

FramedConnection::FramedConnection(SwimmerModel model, BodyFrameSpec frame)
    : model_(std::move(model)), frame_(frame)
{
  frame_.validate();
}

LocalConnection FramedConnection::operator()(ShapePoint phi) const
{
  const LocalConnection base = model_.connection(phi);
  if (frame_.kind == BodyFrameSpec::Kind::MiddleLink) {
    return base;
  }
  return reframe(base, offset_with_jacobian(link_poses(model_.lengths(), phi), frame_));
}

std::array<LocalConnection, 2> connection_gradient(const FramedConnection & a, ShapePoint phi,
                                                   const DifferenceScheme & scheme)
{
  const int order = scheme.order == 4 ? 4 : 2;
  const double h = scheme.step > 0.0 ? scheme.step : default_step(phi, order);
  return {central(a, phi, 0, h, order), central(a, phi, 1, h, order)};
}

Eigen::Vector3d exterior_derivative(const FramedConnection & a, ShapePoint phi, const DifferenceScheme & scheme)
{
  const auto d = connection_gradient(a, phi, scheme);
  return d[0].col(1) - d[1].col(0);
}

Eigen::Vector3d lie_bracket(const LocalConnection & a) { return se2::bracket(a.col(0), a.col(1)); }

CurvatureSample curvature(const FramedConnection & a, ShapePoint phi, const DifferenceScheme & scheme)
{
  CurvatureSample s;
  s.phi = phi;
  s.dA = exterior_derivative(a, phi, scheme);
  s.bracket = lie_bracket(a(phi));
  s.DA = s.dA + s.bracket;
  return s;
}

Eigen::Matrix<double, 3, 2> curvature_gradient(const FramedConnection & a, ShapePoint phi, double step)
{
  const DifferenceScheme inner{step, 4};
  auto total = [&](ShapePoint p) -> Eigen::Vector3d { return curvature(a, p, inner).DA; };
  Eigen::Matrix<double, 3, 2> g;
  g.col(0) = central(total, phi, 0, step, 4);
  g.col(1) = central(total, phi, 1, step, 4);
  return g;
}

CurvatureJet curvature_jet(const FramedConnection & a, ShapePoint phi, double step, bool gradient)
{
  // lattice offsets are within [-4, 4] in each axis
  std::array<std::optional<LocalConnection>, 81> cache;
  auto at = [&](int i, int j) -> const LocalConnection & {
    auto & slot = cache[static_cast<std::size_t>((i + 4) * 9 + (j + 4))];
    if (!slot) {
      slot = a(phi + ShapePoint{i * step, j * step});
    }
    return *slot;
  };
  auto d1 = [&](int i, int j) -> LocalConnection {
    return (-at(i + 2, j) + 8.0 * at(i + 1, j) - 8.0 * at(i - 1, j) + at(i - 2, j)) / (12.0 * step);
  };
  auto d2 = [&](int i, int j) -> LocalConnection {
    return (-at(i, j + 2) + 8.0 * at(i, j + 1) - 8.0 * at(i, j - 1) + at(i, j - 2)) / (12.0 * step);
  };
  auto total = [&](int i, int j) -> Eigen::Vector3d {
    return d1(i, j).col(1) - d2(i, j).col(0) + lie_bracket(at(i, j));
  };
  CurvatureJet jet;
  jet.A = at(0, 0);
  jet.dA = {d1(0, 0), d2(0, 0)};
  jet.DA = jet.dA[0].col(1) - jet.dA[1].col(0) + lie_bracket(jet.A);
  if (gradient) {
    jet.dDA.col(0) = (-total(2, 0) + 8.0 * total(1, 0) - 8.0 * total(-1, 0) + total(-2, 0)) / (12.0 * step);
    jet.dDA.col(1) = (-total(0, 2) + 8.0 * total(0, 1) - 8.0 * total(0, -1) + total(0, -2)) / (12.0 * step);
  } else {
    jet.dDA.setZero();
  }
  return jet;
}

double frame_objective(const SwimmerModel & model, const BodyFrameSpec & frame, const ShapeWindow & window,
                       int grid)
{
  const FramedConnection a(model, frame);
  double sum = 0.0;
  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) {
      const ShapePoint p{window.phi1_min + (window.phi1_max - window.phi1_min) * i / (grid - 1),
                         window.phi2_min + (window.phi2_max - window.phi2_min) * j / (grid - 1)};
      sum += a(p).squaredNorm();
    }
  }
  return sum / (grid * grid);
}

namespace {

struct FrameGrid
{
  std::vector<LocalConnection> base;
  std::vector<LinkPoses> poses;

  double objective(const BodyFrameSpec & f) const
  {
    double sum = 0.0;
    for (std::size_t k = 0; k < base.size(); ++k) {
      sum += reframe(base[k], offset_with_jacobian(poses[k], f)).squaredNorm();
    }
    return sum / static_cast<double>(base.size());
  }
};

using Vec4 = Eigen::Vector4d;

BodyFrameSpec spec_from(const Vec4 & x)
{
  BodyFrameSpec f;
  f.kind = BodyFrameSpec::Kind::Weighted;
  f.position_weights = {std::max(0.0, 1.0 - x(0) - x(1)), x(0), x(1)};
  f.orientation_weights = {std::max(0.0, 1.0 - x(2) - x(3)), x(2), x(3)};
  return f;
}

// Euclidean projection of (a, b) onto {a, b >= 0, a + b <= 1}.
Eigen::Vector2d project_pair(Eigen::Vector2d p)
{
  if (p.x() + p.y() > 1.0) {
    const double shift = (p.x() + p.y() - 1.0) / 2.0;
    p -= Eigen::Vector2d(shift, shift);
  }
  p = p.cwiseMax(0.0);
  if (p.x() + p.y() > 1.0) {
    p = p.x() > 1.0 ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(p.x(), 1.0 - p.x());
    if (p.y() > 1.0) {
      p = Eigen::Vector2d(0.0, 1.0);
    }
  }
  return p;
}

Vec4 project(const Vec4 & x)
{
  Vec4 out;
  out.head<2>() = project_pair(x.head<2>());
  out.tail<2>() = project_pair(x.tail<2>());
  return out;
}

}  // namespace

FrameOptimization optimize_frame(const SwimmerModel & model, const ShapeWindow & window,
                                 const BodyFrameSpec & init, int grid)
{
  init.validate();
  FrameGrid g;
  for (int j = 0; j < grid; ++j) {
    for (int i = 0; i < grid; ++i) {
      const ShapePoint p{window.phi1_min + (window.phi1_max - window.phi1_min) * i / (grid - 1),
                         window.phi2_min + (window.phi2_max - window.phi2_min) * j / (grid - 1)};
      g.base.push_back(model.connection(p));
      g.poses.push_back(link_poses(model.lengths(), p));
    }
  }

  // outside the product simplex the objective is taken at the projection plus a distance penalty
  auto f = [&](const Vec4 & x) {
    const Vec4 px = project(x);
    return g.objective(spec_from(px)) + 1e3 * (x - px).squaredNorm();
  };

  const Vec4 x0(init.position_weights[1], init.position_weights[2], init.orientation_weights[1],
                init.orientation_weights[2]);

  // Nelder-Mead with standard coefficients; restarted from the best vertex until it stalls.
  Vec4 best = x0;
  double fbest = f(x0);
  const double f_init = fbest;
  int iterations = 0;
  for (int restart = 0; restart < 6; ++restart) {
    std::array<Vec4, 5> s;
    std::array<double, 5> fs;
    const double step = restart == 0 ? 0.1 : 0.02;
    s[0] = best;
    for (int k = 0; k < 4; ++k) {
      s[k + 1] = best;
      s[k + 1](k) += (best(k) + step <= 1.0) ? step : -step;
    }
    for (int k = 0; k < 5; ++k) {
      fs[k] = f(s[k]);
    }
    for (int it = 0; it < 4000; ++it, ++iterations) {
      std::array<int, 5> order;
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
      std::array<Vec4, 5> s2;
      std::array<double, 5> f2;
      for (int k = 0; k < 5; ++k) {
        s2[k] = s[order[k]];
        f2[k] = fs[order[k]];
      }
      s = s2;
      fs = f2;
      double size = 0.0;
      for (int k = 1; k < 5; ++k) {
        size = std::max(size, (s[k] - s[0]).cwiseAbs().maxCoeff());
      }
      if (size < 1e-10 && fs[4] - fs[0] < 1e-16) {
        break;
      }
      const Vec4 centroid = (s[0] + s[1] + s[2] + s[3]) / 4.0;
      const Vec4 xr = centroid + (centroid - s[4]);
      const double fr = f(xr);
      if (fr < fs[0]) {
        const Vec4 xe = centroid + 2.0 * (centroid - s[4]);
        const double fe = f(xe);
        if (fe < fr) {
          s[4] = xe;
          fs[4] = fe;
        } else {
          s[4] = xr;
          fs[4] = fr;
        }
      } else if (fr < fs[3]) {
        s[4] = xr;
        fs[4] = fr;
      } else {
        const bool outside = fr < fs[4];
        const Vec4 xc = outside ? Vec4(centroid + 0.5 * (xr - centroid)) : Vec4(centroid + 0.5 * (s[4] - centroid));
        const double fc = f(xc);
        if (fc < std::min(fr, fs[4])) {
          s[4] = xc;
          fs[4] = fc;
        } else {
          for (int k = 1; k < 5; ++k) {
            s[k] = s[0] + 0.5 * (s[k] - s[0]);
            fs[k] = f(s[k]);
          }
        }
      }
    }
    int arg = 0;
    for (int k = 1; k < 5; ++k) {
      if (fs[k] < fs[arg]) {
        arg = k;
      }
    }
    const double improvement = fbest - fs[arg];
    if (fs[arg] < fbest) {
      best = s[arg];
      fbest = fs[arg];
    }
    if (restart > 0 && improvement < 1e-15) {
      break;
    }
  }

  FrameOptimization out;
  out.initial_objective = g.objective(init);
  out.iterations = iterations;
  best = project(best);
  if (!(f_init - g.objective(spec_from(best)) > 1e-12)) {
    out.frame = init;
    out.objective = out.initial_objective;
    out.already_optimal = true;
    return out;
  }
  out.frame = spec_from(best);
  out.objective = g.objective(out.frame);
  return out;
}

BodyPose cbvi_exponential(const Eigen::Vector3d & integral)
{
  if (std::abs(integral(2)) < 1e-12) {
    return {integral(0), integral(1), integral(2)};
  }
  return se2::exp(integral);
}

CbviResult cbvi(const FramedConnection & a, const std::vector<ShapePoint> & region, const CbviOptions & options)
{
  std::vector<quadrature::Point> poly;
  poly.reserve(region.size());
  for (const auto & p : region) {
    poly.push_back(p.vec());
  }
  CbviResult r;
  r.integral.setZero();
  if (poly.size() > 3 && !quadrature::is_simple(poly)) {
    throw NonSimpleRegion("cbvi: region boundary self-intersects");
  }
  const double area = quadrature::signed_area(poly);
  if (poly.size() < 3 || std::abs(area) < 1e-300) {
    r.displacement = {};
    return r;
  }
  const auto tris = quadrature::triangulate(poly);
  r.triangles = static_cast<int>(tris.size());
  const double total = std::abs(area);
  std::vector<quadrature::AdaptiveResult> parts(tris.size());
  const quadrature::Integrand f = [&](const quadrature::Point & p) {
    return curvature(a, ShapePoint::from(p), options.scheme).DA;
  };
  parallel_for(tris.size(), [&](std::size_t k) {
    const auto & t = tris[k];
    const double ak = 0.5 * std::abs((t[1] - t[0]).x() * (t[2] - t[0]).y() - (t[1] - t[0]).y() * (t[2] - t[0]).x());
    parts[k] = quadrature::integrate_triangle(f, t, options.tolerance * std::max(ak / total, 1e-6),
                                              options.max_depth);
  });
  for (const auto & p : parts) {
    r.integral += p.value;
    r.evaluations += p.evaluations;
  }
  if (area < 0.0) {
    r.integral = -r.integral;
  }
  r.displacement = cbvi_exponential(r.integral);
  return r;
}

}  // namespace gaitforge
