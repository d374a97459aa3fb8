#include "gaitforge/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gaitforge/errors.hpp"
#include "gaitforge/parallel.hpp"
#include "gaitforge/quadrature.hpp"
#include "gaitforge/se2.hpp"

namespace gaitforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

Gait Gait::circle(ShapePoint center, double radius, double phase)
{
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw InvalidGait("circle gait needs a finite nonnegative radius");
  }
  Gait g;
  g.family_ = Family::Circle;
  g.center_ = center;
  g.amplitude_ = radius;
  g.phase_ = phase;
  return g;
}

Gait Gait::square(ShapePoint center, double half_side)
{
  if (!(half_side > 0.0) || !std::isfinite(half_side)) {
    throw InvalidGait("square gait needs a positive half-side");
  }
  const double e = half_side;
  Gait g = polyline({center + ShapePoint{e, e}, center + ShapePoint{-e, e}, center + ShapePoint{-e, -e},
                     center + ShapePoint{e, -e}});
  g.family_ = Family::Square;
  g.center_ = center;
  g.amplitude_ = half_side;
  return g;
}

Gait Gait::polyline(std::vector<ShapePoint> vertices)
{
  if (vertices.size() > 1 && vertices.front() == vertices.back()) {
    vertices.pop_back();
  }
  if (vertices.size() < 3) {
    throw InvalidGait("polyline gait needs at least 3 distinct vertices");
  }
  Gait g;
  g.family_ = Family::Polyline;
  g.knots_.assign(1, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const ShapePoint d = vertices[(i + 1) % vertices.size()] - vertices[i];
    const double len = std::hypot(d.phi1, d.phi2);
    if (!(len > 0.0)) {
      throw InvalidGait("polyline gait has a zero-length segment");
    }
    total += len;
    g.knots_.push_back(total);
  }
  for (double & k : g.knots_) {
    k /= total;
  }
  g.knots_.back() = 1.0;
  g.vertices_ = std::move(vertices);
  return g;
}

Gait Gait::reversed() const
{
  if (family_ == Family::Circle) {
    Gait g = *this;
    g.reversed_ = !reversed_;
    return g;
  }
  std::vector<ShapePoint> v{vertices_.front()};
  v.insert(v.end(), vertices_.rbegin(), vertices_.rend() - 1);
  Gait g = polyline(std::move(v));
  g.family_ = family_;
  g.center_ = center_;
  g.amplitude_ = amplitude_;
  return g;
}

ShapePoint Gait::point(double s) const
{
  if (family_ == Family::Circle) {
    const double a = phase_ + (reversed_ ? -1.0 : 1.0) * kTwoPi * s;
    return center_ + ShapePoint{amplitude_ * std::cos(a), amplitude_ * std::sin(a)};
  }
  s = std::clamp(s, 0.0, 1.0);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t k = static_cast<std::size_t>(std::max<long>(0, it - knots_.begin() - 1));
  k = std::min(k, vertices_.size() - 1);
  const double span = knots_[k + 1] - knots_[k];
  const double t = span > 0.0 ? (s - knots_[k]) / span : 0.0;
  const ShapePoint & a = vertices_[k];
  const ShapePoint & b = vertices_[(k + 1) % vertices_.size()];
  return a + t * (b - a);
}

Eigen::Vector2d Gait::tangent(double s) const
{
  if (family_ == Family::Circle) {
    const double sign = reversed_ ? -1.0 : 1.0;
    const double a = phase_ + sign * kTwoPi * s;
    return sign * kTwoPi * amplitude_ * Eigen::Vector2d(-std::sin(a), std::cos(a));
  }
  s = std::clamp(s, 0.0, 1.0);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  std::size_t k = static_cast<std::size_t>(std::max<long>(0, it - knots_.begin() - 1));
  k = std::min(k, vertices_.size() - 1);
  const double span = knots_[k + 1] - knots_[k];
  const ShapePoint d = vertices_[(k + 1) % vertices_.size()] - vertices_[k];
  return d.vec() / span;
}

std::vector<double> Gait::breakpoints() const
{
  if (family_ == Family::Circle) {
    return {0.0, 1.0};
  }
  return knots_;
}

std::vector<ShapePoint> Gait::sample(int n) const
{
  std::vector<ShapePoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(point(static_cast<double>(i) / n));
  }
  return out;
}

std::vector<ShapePoint> Gait::boundary(int n) const
{
  if (family_ == Family::Circle) {
    return sample(n);
  }
  return vertices_;
}

double Gait::signed_area() const
{
  if (family_ == Family::Circle) {
    return (reversed_ ? -1.0 : 1.0) * std::numbers::pi * amplitude_ * amplitude_;
  }
  std::vector<quadrature::Point> pts;
  for (const auto & v : vertices_) {
    pts.push_back(v.vec());
  }
  return quadrature::signed_area(pts);
}

TimeProfile TimeProfile::uniform()
{
  return {[](double t) { return t; }, [](double) { return 1.0; }};
}

TimeProfile TimeProfile::quadratic()
{
  return {[](double t) { return t * t; }, [](double t) { return 2.0 * t; }};
}

TimeProfile TimeProfile::eased()
{
  return {[](double t) { return t * t * (3.0 - 2.0 * t); }, [](double t) { return 6.0 * t * (1.0 - t); }};
}

Trajectory integrate_gait(const FramedConnection & a, const Gait & gait, const IntegrateOptions & options)
{
  ode::Options o;
  o.rtol = options.rtol;
  o.atol = options.atol;
  const ode::DormandPrince<3> solver(o);

  Trajectory traj;
  traj.s.push_back(0.0);
  traj.shape.push_back(gait.point(0.0));
  traj.pose.push_back({});

  const auto knots = gait.breakpoints();
  ode::State<3> q = ode::State<3>::Zero();
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double s0 = knots[k], s1 = knots[k + 1];
    const double span = s1 - s0;
    // integrate the segment over a local parameter tau in [0, 1]
    auto param = [&](double tau) { return options.profile ? options.profile->map(tau) : tau; };
    auto rate = [&](double tau) { return options.profile ? options.profile->rate(tau) : 1.0; };
    // interior point of the segment so the tangent is evaluated on the right side of a corner
    auto seg_s = [&](double tau) { return s0 + span * std::clamp(param(tau), 0.0, 1.0); };
    auto tangent = [&](double tau) {
      const double s = seg_s(tau);
      const double probe = std::clamp(s, s0 + 1e-14 * (span > 0 ? 1 : 0), s1 - 1e-14);
      return (gait.tangent(span > 2e-14 ? probe : s) * span * rate(tau)).eval();
    };
    auto rhs = [&](double tau, const ode::State<3> & y) -> ode::State<3> {
      const ShapePoint phi = gait.point(seg_s(tau));
      const Twist xi = a(phi) * tangent(tau);
      const Eigen::Vector2d v = se2::rotation(y(2)) * xi.head<2>();
      return {v.x(), v.y(), xi(2)};
    };
    ode::DormandPrince<3>::Observer observe;
    if (options.record) {
      observe = [&](const ode::Step<3> & st) {
        const double s = seg_s(st.stop);
        traj.s.push_back(s);
        traj.shape.push_back(gait.point(s));
        traj.pose.push_back(BodyPose::from(st(st.stop)));
      };
    }
    ode::Result<3> r;
    try {
      r = solver.integrate(rhs, 0.0, q, 1.0, {}, observe);
    } catch (const IntegrationFailure & e) {
      throw IntegrationFailure(std::string(e.what()) + " (segment starting at s = " + std::to_string(s0) + ")");
    }
    q = r.y;
    traj.stats.accepted += r.stats.accepted;
    traj.stats.rejected += r.stats.rejected;
    traj.stats.evaluations += r.stats.evaluations;
  }
  if (!options.record) {
    traj.s.push_back(1.0);
    traj.shape.push_back(gait.point(1.0));
    traj.pose.push_back(BodyPose::from(q));
  } else {
    traj.pose.back() = BodyPose::from(q);
  }
  return traj;
}

BodyPose net_displacement(const FramedConnection & a, const Gait & gait, const IntegrateOptions & options)
{
  IntegrateOptions o = options;
  o.record = false;
  return integrate_gait(a, gait, o).net();
}

double time_reparametrization_check(const FramedConnection & a, const Gait & gait, const TimeProfile & first,
                                    const TimeProfile & second, const IntegrateOptions & options)
{
  IntegrateOptions oa = options, ob = options;
  oa.profile = first;
  ob.profile = second;
  return se2::distance(net_displacement(a, gait, oa), net_displacement(a, gait, ob));
}

namespace {

SweepExtremum refine_extremum(const std::vector<SweepRow> & rows, std::size_t i)
{
  SweepExtremum e{rows[i].eps, rows[i].dx, i, i > 0 && i + 1 < rows.size()};
  if (!e.interior) {
    return e;
  }
  const double x0 = rows[i - 1].eps, x1 = rows[i].eps, x2 = rows[i + 1].eps;
  const double y0 = rows[i - 1].dx, y1 = rows[i].dx, y2 = rows[i + 1].dx;
  // vertex of the interpolating parabola
  const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
  const double c2 = (d12 - d01) / (x2 - x0);
  if (c2 == 0.0) {
    return e;
  }
  const double c1 = d01 - c2 * (x0 + x1);
  const double xv = -c1 / (2.0 * c2);
  if (xv > x0 && xv < x2) {
    e.eps = xv;
    e.dx = y0 + d01 * (xv - x0) + c2 * (xv - x0) * (xv - x1);
  }
  return e;
}

}  // namespace

SweepResult displacement_sweep(const FramedConnection & a, Gait::Family family, const std::vector<double> & eps_grid,
                               const IntegrateOptions & options)
{
  if (eps_grid.empty()) {
    throw InvalidGait("sweep: empty amplitude grid");
  }
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0) || (i > 0 && !(eps_grid[i] > eps_grid[i - 1]))) {
      throw InvalidGait("sweep: amplitude grid must be positive and strictly increasing");
    }
  }
  if (family == Gait::Family::Polyline) {
    throw InvalidGait("sweep: family must be circle or square");
  }
  SweepResult out;
  out.family = family;
  out.rows.resize(eps_grid.size());
  parallel_for(eps_grid.size(), [&](std::size_t i) {
    const double e = eps_grid[i];
    const Gait g = family == Gait::Family::Circle ? Gait::circle({}, e) : Gait::square({}, e);
    const BodyPose d = net_displacement(a, g, options);
    out.rows[i] = {e, d.x, d.y, d.theta};
  });
  std::size_t imax = 0, imin = 0;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].dx > out.rows[imax].dx) {
      imax = i;
    }
    if (out.rows[i].dx < out.rows[imin].dx) {
      imin = i;
    }
  }
  out.argmax = refine_extremum(out.rows, imax);
  out.argmin = refine_extremum(out.rows, imin);
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    const double y0 = out.rows[i - 1].dx, y1 = out.rows[i].dx;
    if ((y0 > 0.0 && y1 <= 0.0) || (y0 < 0.0 && y1 >= 0.0)) {
      const double x0 = out.rows[i - 1].eps, x1 = out.rows[i].eps;
      out.sign_changes.push_back(x0 + (x1 - x0) * y0 / (y0 - y1));
    }
  }
  return out;
}

std::vector<double> make_grid(double eps_min, double eps_max, double step)
{
  std::vector<double> g;
  if (!(step > 0.0) || !(eps_max >= eps_min)) {
    return g;
  }
  const long n = static_cast<long>(std::floor((eps_max - eps_min) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    g.push_back(eps_min + static_cast<double>(i) * step);
  }
  return g;
}

}  // namespace gaitforge
