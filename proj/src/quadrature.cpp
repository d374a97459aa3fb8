#include "gaitforge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaitforge/errors.hpp"

namespace gaitforge::quadrature {

namespace {

double cross(const Point & a, const Point & b, const Point & c)
{
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool segments_intersect(const Point & p1, const Point & p2, const Point & q1, const Point & q2)
{
  const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](const Point & a, const Point & b, const Point & p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
  };
  return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) ||
         (d3 == 0 && on_segment(p1, p2, q1)) || (d4 == 0 && on_segment(p1, p2, q2));
}

std::vector<Point> open_ring(std::vector<Point> poly)
{
  if (poly.size() > 1 && poly.front() == poly.back()) {
    poly.pop_back();
  }
  return poly;
}

bool inside_triangle(const Point & p, const Point & a, const Point & b, const Point & c)
{
  return cross(a, b, p) >= 0.0 && cross(b, c, p) >= 0.0 && cross(c, a, p) >= 0.0;
}

// Radon's 7-point rule, exact for degree 5
Eigen::Vector3d cubature(const Integrand & f, const Triangle & t, long & evals)
{
  static const double s15 = std::sqrt(15.0);
  static const double a = (6.0 - s15) / 21.0, b = (6.0 + s15) / 21.0;
  static const double wa = (155.0 - s15) / 1200.0, wb = (155.0 + s15) / 1200.0, w0 = 9.0 / 40.0;
  auto at = [&](double l0, double l1, double l2) { return f(l0 * t[0] + l1 * t[1] + l2 * t[2]); };
  Eigen::Vector3d sum = w0 * at(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
  sum += wa * (at(a, a, 1 - 2 * a) + at(a, 1 - 2 * a, a) + at(1 - 2 * a, a, a));
  sum += wb * (at(b, b, 1 - 2 * b) + at(b, 1 - 2 * b, b) + at(1 - 2 * b, b, b));
  evals += 7;
  const double area = 0.5 * std::abs(cross(t[0], t[1], t[2]));
  return area * sum;
}

std::array<Triangle, 4> split(const Triangle & t)
{
  const Point m01 = 0.5 * (t[0] + t[1]), m12 = 0.5 * (t[1] + t[2]), m20 = 0.5 * (t[2] + t[0]);
  return {Triangle{t[0], m01, m20}, Triangle{m01, t[1], m12}, Triangle{m20, m12, t[2]},
          Triangle{m01, m12, m20}};
}

Eigen::Vector3d refine(const Integrand & f, const Triangle & t, const Eigen::Vector3d & coarse, double tol,
                       int depth, long & evals)
{
  const auto kids = split(t);
  std::array<Eigen::Vector3d, 4> parts;
  Eigen::Vector3d fine = Eigen::Vector3d::Zero();
  for (int k = 0; k < 4; ++k) {
    parts[k] = cubature(f, kids[k], evals);
    fine += parts[k];
  }
  if (depth <= 0 || (fine - coarse).cwiseAbs().maxCoeff() <= tol) {
    return fine;
  }
  Eigen::Vector3d total = Eigen::Vector3d::Zero();
  for (int k = 0; k < 4; ++k) {
    total += refine(f, kids[k], parts[k], tol / 4.0, depth - 1, evals);
  }
  return total;
}

}  // namespace

double signed_area(const std::vector<Point> & polygon)
{
  const auto ring = open_ring(polygon);
  double a = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point & p = ring[i];
    const Point & q = ring[(i + 1) % ring.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

bool is_simple(const std::vector<Point> & polygon)
{
  const auto ring = open_ring(polygon);
  const std::size_t n = ring.size();
  if (n < 3) {
    return true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point & a1 = ring[i];
    const Point & a2 = ring[(i + 1) % n];
    // bounding box rejection keeps this fast for long contours
    const double ax0 = std::min(a1.x(), a2.x()), ax1 = std::max(a1.x(), a2.x());
    const double ay0 = std::min(a1.y(), a2.y()), ay1 = std::max(a1.y(), a2.y());
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) {
        continue;
      }
      const Point & b1 = ring[j];
      const Point & b2 = ring[(j + 1) % n];
      if (std::max(b1.x(), b2.x()) < ax0 || std::min(b1.x(), b2.x()) > ax1 ||
          std::max(b1.y(), b2.y()) < ay0 || std::min(b1.y(), b2.y()) > ay1) {
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) {
        return false;
      }
    }
  }
  return true;
}

std::vector<Triangle> triangulate(std::vector<Point> polygon)
{
  std::vector<Point> ring = open_ring(std::move(polygon));
  std::vector<Triangle> out;
  if (ring.size() < 3) {
    return out;
  }
  if (signed_area(ring) < 0.0) {
    std::reverse(ring.begin(), ring.end());
  }
  std::vector<std::size_t> idx(ring.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = i;
  }
  out.reserve(ring.size());
  std::size_t guard = 0;
  std::size_t i = 0;
  while (idx.size() > 3) {
    const std::size_t n = idx.size();
    const Point & a = ring[idx[(i + n - 1) % n]];
    const Point & b = ring[idx[i % n]];
    const Point & c = ring[idx[(i + 1) % n]];
    bool ear = cross(a, b, c) > 0.0;
    if (ear) {
      for (std::size_t k = 0; k < n && ear; ++k) {
        const Point & p = ring[idx[k]];
        if (&p == &a || &p == &b || &p == &c) {
          continue;
        }
        if (inside_triangle(p, a, b, c)) {
          ear = false;
        }
      }
    }
    if (ear) {
      out.push_back({a, b, c});
      idx.erase(idx.begin() + static_cast<long>(i % n));
      guard = 0;
      if (i > 0) {
        --i;
      }
      continue;
    }
    i = (i + 1) % n;
    if (++guard > 2 * n) {
      // only collinear remainders are left; drop the flattest vertex
      std::size_t best = 0;
      double flat = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        const double c2 = std::abs(cross(ring[idx[(k + n - 1) % n]], ring[idx[k]], ring[idx[(k + 1) % n]]));
        if (c2 < flat) {
          flat = c2;
          best = k;
        }
      }
      idx.erase(idx.begin() + static_cast<long>(best));
      guard = 0;
    }
  }
  if (cross(ring[idx[0]], ring[idx[1]], ring[idx[2]]) > 0.0) {
    out.push_back({ring[idx[0]], ring[idx[1]], ring[idx[2]]});
  }
  return out;
}

AdaptiveResult integrate_triangle(const Integrand & f, const Triangle & t, double tol, int max_depth)
{
  AdaptiveResult r;
  const Eigen::Vector3d coarse = cubature(f, t, r.evaluations);
  r.value = refine(f, t, coarse, tol, max_depth, r.evaluations);
  return r;
}

}  // namespace gaitforge::quadrature
