#include "gaitforge/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <Eigen/Dense>

#include "gaitforge/errors.hpp"
#include "gaitforge/parallel.hpp"
#include "gaitforge/quadrature.hpp"

namespace gaitforge {

double HeightField::min() const { return *std::min_element(values.begin(), values.end()); }

double HeightField::max() const { return *std::max_element(values.begin(), values.end()); }

double HeightField::value(ShapePoint p) const
{
  if (sampler) {
    return sampler(p);
  }
  const double fx = std::clamp((p.phi1 - window.phi1_min) / dx(), 0.0, n - 1.0);
  const double fy = std::clamp((p.phi2 - window.phi2_min) / dy(), 0.0, n - 1.0);
  const int i = std::min(static_cast<int>(fx), n - 2);
  const int j = std::min(static_cast<int>(fy), n - 2);
  const double u = fx - i, v = fy - j;
  return (1 - u) * (1 - v) * at(i, j) + u * (1 - v) * at(i + 1, j) + u * v * at(i + 1, j + 1) +
         (1 - u) * v * at(i, j + 1);
}

namespace {

HeightField make_field(const std::function<double(ShapePoint)> & f, const ShapeWindow & window, int n)
{
  if (n < 33) {
    throw InvalidParameters("height field needs n >= 33");
  }
  if (!(window.phi1_max > window.phi1_min) || !(window.phi2_max > window.phi2_min)) {
    throw InvalidParameters("height field window is empty");
  }
  HeightField h;
  h.window = window;
  h.n = n;
  h.values.resize(static_cast<std::size_t>(n) * n);
  h.sampler = f;
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    for (int i = 0; i < n; ++i) {
      h.values[j * n + i] = f({h.x(i), h.y(static_cast<int>(j))});
    }
  });
  return h;
}

}  // namespace

HeightField sample_height_field(const FramedConnection & a, const ShapeWindow & window, int n, int component,
                                const DifferenceScheme & scheme)
{
  if (component < 0 || component > 2) {
    throw InvalidParameters("height field component must be 0, 1 or 2");
  }
  HeightField h = make_field([a, component, scheme](ShapePoint p) { return curvature(a, p, scheme).DA(component); },
                             window, n);
  h.component = component;
  h.frame = a.frame();
  return h;
}

HeightField sample_scalar_field(const std::function<double(ShapePoint)> & f, const ShapeWindow & window, int n)
{
  HeightField h = make_field(f, window, n);
  h.component = -1;
  return h;
}

std::string to_string(ContourKind k)
{
  switch (k) {
  case ContourKind::Closed:
    return "closed";
  case ContourKind::Open:
    return "open";
  case ContourKind::JunctionBearing:
    return "junction-bearing";
  }
  return "unknown";
}

std::vector<const Contour *> ContourSet::closed_loops() const
{
  std::vector<const Contour *> out;
  for (const auto & c : contours) {
    if (c.closed) {
      out.push_back(&c);
    }
  }
  return out;
}

namespace {

struct Segment
{
  long e0, e1;
};

struct Grid
{
  const HeightField & f;

  bool positive(int i, int j) const { return f.at(i, j) >= 0.0; }
  long hedge(int i, int j) const { return 2L * (static_cast<long>(j) * f.n + i); }
  long vedge(int i, int j) const { return 2L * (static_cast<long>(j) * f.n + i) + 1; }

  ShapePoint crossing(long id) const
  {
    const long node = id / 2;
    const int i = static_cast<int>(node % f.n), j = static_cast<int>(node / f.n);
    const bool vertical = id % 2 == 1;
    const int i1 = vertical ? i : i + 1, j1 = vertical ? j + 1 : j;
    const double v0 = f.at(i, j), v1 = f.at(i1, j1);
    const double t = v0 == v1 ? 0.5 : std::clamp(v0 / (v0 - v1), 0.0, 1.0);
    return {f.x(i) + t * (f.x(i1) - f.x(i)), f.y(j) + t * (f.y(j1) - f.y(j))};
  }

  ShapePoint center(int i, int j) const { return {0.5 * (f.x(i) + f.x(i + 1)), 0.5 * (f.y(j) + f.y(j + 1))}; }
};

struct Ambiguity
{
  int i, j;
  double center;
};

void march(const Grid & g, std::vector<Segment> & segs, std::vector<Ambiguity> & ambiguous)
{
  const HeightField & f = g.f;
  for (int j = 0; j + 1 < f.n; ++j) {
    for (int i = 0; i + 1 < f.n; ++i) {
      const bool p0 = g.positive(i, j), p1 = g.positive(i + 1, j);
      const bool p2 = g.positive(i + 1, j + 1), p3 = g.positive(i, j + 1);
      const int code = p0 | (p1 << 1) | (p2 << 2) | (p3 << 3);
      if (code == 0 || code == 15) {
        continue;
      }
      const long bottom = g.hedge(i, j), right = g.vedge(i + 1, j), top = g.hedge(i, j + 1), left = g.vedge(i, j);
      std::vector<long> cut;
      if (p0 != p1) {
        cut.push_back(bottom);
      }
      if (p1 != p2) {
        cut.push_back(right);
      }
      if (p2 != p3) {
        cut.push_back(top);
      }
      if (p3 != p0) {
        cut.push_back(left);
      }
      if (cut.size() == 2) {
        segs.push_back({cut[0], cut[1]});
        continue;
      }
      // saddle: corners 0 and 2 share a sign opposite to corners 1 and 3
      const ShapePoint c = g.center(i, j);
      const double vc = f.sampler ? f.sampler(c) : 0.25 * (f.at(i, j) + f.at(i + 1, j) + f.at(i + 1, j + 1) + f.at(i, j + 1));
      ambiguous.push_back({i, j, vc});
      if ((vc >= 0.0) == p0) {
        // corners 0 and 2 connect through the center; cut off corners 1 and 3
        segs.push_back({bottom, right});
        segs.push_back({top, left});
      } else {
        segs.push_back({left, bottom});
        segs.push_back({right, top});
      }
    }
  }
}

std::vector<std::vector<long>> chain(const std::vector<Segment> & segs)
{
  std::unordered_map<long, std::array<int, 2>> incident;
  incident.reserve(segs.size() * 2);
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    for (long e : {segs[k].e0, segs[k].e1}) {
      auto [it, fresh] = incident.try_emplace(e, std::array<int, 2>{-1, -1});
      (it->second[0] < 0 ? it->second[0] : it->second[1]) = k;
    }
  }
  std::vector<char> used(segs.size(), 0);
  auto other_segment = [&](long e, int k) {
    const auto & inc = incident.at(e);
    return inc[0] == k ? inc[1] : inc[0];
  };
  auto walk = [&](int k, long from) {
    std::vector<long> edges{from};
    long e = from;
    while (k >= 0 && !used[k]) {
      used[k] = 1;
      e = segs[k].e0 == e ? segs[k].e1 : segs[k].e0;
      edges.push_back(e);
      k = other_segment(e, k);
    }
    return edges;
  };
  std::vector<std::vector<long>> out;
  // open chains start at an edge with a single incident segment
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    if (used[k]) {
      continue;
    }
    for (long e : {segs[k].e0, segs[k].e1}) {
      if (incident.at(e)[1] < 0) {
        out.push_back(walk(k, e));
        break;
      }
    }
  }
  for (int k = 0; k < static_cast<int>(segs.size()); ++k) {
    if (!used[k]) {
      out.push_back(walk(k, segs[k].e0));
    }
  }
  return out;
}

Eigen::Vector2d gradient_at(const HeightField & f, ShapePoint p, double h)
{
  return {(f.value(p + ShapePoint{h, 0}) - f.value(p - ShapePoint{h, 0})) / (2 * h),
          (f.value(p + ShapePoint{0, h}) - f.value(p - ShapePoint{0, h})) / (2 * h)};
}

Eigen::Matrix2d hessian_at(const HeightField & f, ShapePoint p, double h)
{
  const double c = f.value(p);
  const double xx = (f.value(p + ShapePoint{h, 0}) - 2 * c + f.value(p - ShapePoint{h, 0})) / (h * h);
  const double yy = (f.value(p + ShapePoint{0, h}) - 2 * c + f.value(p - ShapePoint{0, h})) / (h * h);
  const double xy = (f.value(p + ShapePoint{h, h}) - f.value(p + ShapePoint{h, -h}) - f.value(p + ShapePoint{-h, h}) +
                     f.value(p + ShapePoint{-h, -h})) /
                    (4 * h * h);
  Eigen::Matrix2d m;
  m << xx, xy, xy, yy;
  return m;
}

double segment_distance(ShapePoint p, ShapePoint a, ShapePoint b)
{
  const Eigen::Vector2d ab = (b - a).vec(), ap = (p - a).vec();
  const double l2 = ab.squaredNorm();
  const double t = l2 > 0.0 ? std::clamp(ap.dot(ab) / l2, 0.0, 1.0) : 0.0;
  return (ap - t * ab).norm();
}

double polygon_area(const std::vector<ShapePoint> & pts)
{
  std::vector<quadrature::Point> q;
  q.reserve(pts.size());
  for (const auto & p : pts) {
    q.push_back(p.vec());
  }
  return quadrature::signed_area(q);
}

int branches_around(const HeightField & f, ShapePoint c, double r)
{
  constexpr int samples = 64;
  int changes = 0;
  const double pi = 3.14159265358979323846;
  bool prev = f.value(c + ShapePoint{r * std::cos(pi / samples), r * std::sin(pi / samples)}) >= 0.0;
  for (int k = 1; k <= samples; ++k) {
    const double a = pi * (2 * k + 1) / samples;
    const bool cur = f.value(c + ShapePoint{r * std::cos(a), r * std::sin(a)}) >= 0.0;
    changes += cur != prev;
    prev = cur;
  }
  return changes;
}

double junction_radius(const Junction & j, double cell)
{
  return 1.5 * cell + 3.0 * j.gap;
}

bool near_contour(const std::vector<Contour> & contours, ShapePoint p, double r)
{
  for (const auto & c : contours) {
    for (const auto & q : c.points) {
      if (std::hypot(q.phi1 - p.phi1, q.phi2 - p.phi2) < r) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

std::vector<Junction> detect_junctions(const HeightField & field, const std::vector<Contour> & contours,
                                       const JunctionOptions & options)
{
  const int n = field.n;
  const double range = field.range();
  const double cell = std::max(field.dx(), field.dy());
  const double size = std::max(field.window.phi1_max - field.window.phi1_min, field.window.phi2_max - field.window.phi2_min);
  const double level_tol = options.level_fraction * range;
  const double grad_tol = options.gradient_fraction * range / size;

  // grid gradient magnitude and Hessian determinant by central differences
  std::vector<double> grad(static_cast<std::size_t>(n) * n, std::numeric_limits<double>::infinity());
  std::vector<double> det(grad.size(), 0.0);
  const double hx = field.dx(), hy = field.dy();
  for (int j = 1; j + 1 < n; ++j) {
    for (int i = 1; i + 1 < n; ++i) {
      const double gx = (field.at(i + 1, j) - field.at(i - 1, j)) / (2 * hx);
      const double gy = (field.at(i, j + 1) - field.at(i, j - 1)) / (2 * hy);
      const double xx = (field.at(i + 1, j) - 2 * field.at(i, j) + field.at(i - 1, j)) / (hx * hx);
      const double yy = (field.at(i, j + 1) - 2 * field.at(i, j) + field.at(i, j - 1)) / (hy * hy);
      const double xy = (field.at(i + 1, j + 1) - field.at(i + 1, j - 1) - field.at(i - 1, j + 1) + field.at(i - 1, j - 1)) /
                        (4 * hx * hy);
      grad[static_cast<std::size_t>(j) * n + i] = std::hypot(gx, gy);
      det[static_cast<std::size_t>(j) * n + i] = xx * yy - xy * xy;
    }
  }

  std::vector<Junction> out;
  for (int j = 2; j + 2 < n; ++j) {
    for (int i = 2; i + 2 < n; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * n + i;
      if (det[k] >= 0.0 || std::abs(field.at(i, j)) > 4.0 * level_tol + grad[k] * cell) {
        continue;
      }
      bool local_min = true;
      for (int dj = -1; dj <= 1 && local_min; ++dj) {
        for (int di = -1; di <= 1 && local_min; ++di) {
          const std::size_t m = static_cast<std::size_t>(j + dj) * n + i + di;
          local_min = m == k || grad[m] > grad[k] || (grad[m] == grad[k] && m > k);
        }
      }
      if (!local_min) {
        continue;
      }
      // Newton on grad H = 0
      const ShapePoint c{field.x(i), field.y(j)};
      const double h = 0.05 * cell;
      ShapePoint p = c;
      bool ok = true;
      for (int it = 0; it < 30; ++it) {
        const Eigen::Vector2d gr = gradient_at(field, p, h);
        const Eigen::Matrix2d hs = hessian_at(field, p, h);
        if (!(hs.determinant() < 0.0)) {
          ok = false;
          break;
        }
        const Eigen::Vector2d step = hs.partialPivLu().solve(gr);
        p = p - ShapePoint::from(step);
        if (std::hypot(p.phi1 - c.phi1, p.phi2 - c.phi2) > 2.0 * cell) {
          ok = false;
          break;
        }
        if (step.norm() < 1e-10 * std::max(1.0, cell)) {
          break;
        }
      }
      if (!ok) {
        continue;
      }
      Junction jn;
      jn.at = p;
      jn.value = field.value(p);
      jn.gradient = gradient_at(field, p, h).norm();
      if (std::abs(jn.value) > level_tol || jn.gradient > grad_tol) {
        continue;
      }
      const Eigen::Matrix2d hs = hessian_at(field, p, h);
      const Eigen::Vector2d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(hs).eigenvalues().cwiseAbs();
      jn.gap = std::sqrt(2.0 * std::abs(jn.value) / eig.minCoeff());
      if (jn.gap > options.max_gap) {
        continue;
      }
      jn.branches = branches_around(field, p, junction_radius(jn, cell));
      if (jn.branches < 3 || !near_contour(contours, p, junction_radius(jn, cell))) {
        continue;
      }
      bool duplicate = false;
      for (const auto & o : out) {
        duplicate = duplicate || std::hypot(o.at.phi1 - p.phi1, o.at.phi2 - p.phi2) < 2.0 * cell;
      }
      if (!duplicate) {
        out.push_back(jn);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Junction & a, const Junction & b) {
    return a.at.phi1 != b.at.phi1 ? a.at.phi1 < b.at.phi1 : a.at.phi2 < b.at.phi2;
  });
  return out;
}

ContourSet extract_zero_contours(const HeightField & field, const JunctionOptions & options)
{
  const Grid g{field};
  std::vector<Segment> segs;
  std::vector<Ambiguity> amb;
  march(g, segs, amb);
  ContourSet set;
  if (segs.empty()) {
    set.empty = true;
    return set;
  }
  const double cell = std::max(field.dx(), field.dy());
  for (const auto & edges : chain(segs)) {
    Contour c;
    c.closed = edges.size() > 2 && edges.front() == edges.back();
    const std::size_t count = c.closed ? edges.size() - 1 : edges.size();
    for (std::size_t k = 0; k < count; ++k) {
      const ShapePoint p = g.crossing(edges[k]);
      if (c.points.empty() || std::hypot(p.phi1 - c.points.back().phi1, p.phi2 - c.points.back().phi2) > 1e-12) {
        c.points.push_back(p);
      }
    }
    if (!c.closed && c.points.size() > 2) {
      const ShapePoint a = c.points.front(), b = c.points.back();
      c.closed = std::hypot(a.phi1 - b.phi1, a.phi2 - b.phi2) < 0.5 * cell;
    }
    if (c.points.size() < 2) {
      continue;
    }
    // one Newton pass toward H = 0 along the gradient
    if (field.sampler) {
      for (auto & p : c.points) {
        const double v = field.sampler(p);
        const Eigen::Vector2d gr = gradient_at(field, p, 1e-3 * cell);
        const double n2 = gr.squaredNorm();
        if (n2 > 0.0) {
          const Eigen::Vector2d step = v * gr / n2;
          if (step.norm() < 0.5 * cell) {
            p = p - ShapePoint::from(step);
          }
        }
      }
    }
    if (c.closed) {
      c.area = polygon_area(c.points);
    }
    c.kind = c.closed ? ContourKind::Closed : ContourKind::Open;
    set.contours.push_back(std::move(c));
  }
  set.junctions = detect_junctions(field, set.contours, options);
  for (auto & c : set.contours) {
    for (const auto & j : set.junctions) {
      bool touches = false;
      for (const auto & p : c.points) {
        if (std::hypot(p.phi1 - j.at.phi1, p.phi2 - j.at.phi2) < junction_radius(j, cell)) {
          touches = true;
          break;
        }
      }
      if (touches) {
        c.kind = ContourKind::JunctionBearing;
        break;
      }
    }
  }
  // deterministic order: closed before open, then by area
  std::stable_sort(set.contours.begin(), set.contours.end(), [](const Contour & a, const Contour & b) {
    if (a.closed != b.closed) {
      return a.closed;
    }
    return std::abs(a.area) < std::abs(b.area);
  });
  return set;
}

bool point_in_polygon(const std::vector<ShapePoint> & polygon, ShapePoint p)
{
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const ShapePoint a = polygon[i], b = polygon[j];
    if ((a.phi2 > p.phi2) != (b.phi2 > p.phi2) &&
        p.phi1 < (b.phi1 - a.phi1) * (p.phi2 - a.phi2) / (b.phi2 - a.phi2) + a.phi1) {
      inside = !inside;
    }
  }
  return inside;
}

const Contour * innermost_loop(const ContourSet & set, ShapePoint p)
{
  const Contour * best = nullptr;
  for (const Contour * c : set.closed_loops()) {
    if (point_in_polygon(c->points, p) && (!best || std::abs(c->area) < std::abs(best->area))) {
      best = c;
    }
  }
  return best;
}

ContourGaitReport contour_as_gait(const FramedConnection & a, const Contour & contour, bool clockwise)
{
  if (contour.kind == ContourKind::JunctionBearing) {
    throw JunctionBearing("zero contour passes through a junction; it cannot be a smooth optimal gait");
  }
  if (!contour.closed) {
    throw InvalidGait("contour is open at the window boundary");
  }
  std::vector<ShapePoint> pts = contour.points;
  if ((polygon_area(pts) < 0.0) != clockwise) {
    std::reverse(pts.begin(), pts.end());
  }
  Gait gait = Gait::polyline(pts);
  const BodyPose line = net_displacement(a, gait);
  const CbviResult cb = cbvi(a, pts);
  return {gait, line, cb.displacement, cb.integral,
          std::abs(cb.displacement.x - line.x) / std::max(std::abs(line.x), 1e-300)};
}

double hausdorff_distance(const std::vector<ShapePoint> & p, const std::vector<ShapePoint> & q)
{
  if (p.empty() || q.empty()) {
    throw InvalidParameters("hausdorff distance of an empty polyline");
  }
  auto densify = [](const std::vector<ShapePoint> & v) {
    std::vector<ShapePoint> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const ShapePoint a = v[i], b = v[(i + 1) % v.size()];
      const int pieces = std::max(1, static_cast<int>(std::ceil(std::hypot(b.phi1 - a.phi1, b.phi2 - a.phi2) / 0.002)));
      for (int k = 0; k < pieces; ++k) {
        out.push_back(a + (static_cast<double>(k) / pieces) * (b - a));
      }
    }
    return out;
  };
  auto directed = [&](const std::vector<ShapePoint> & from, const std::vector<ShapePoint> & to) {
    const auto pts = densify(from);
    std::vector<double> best(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) {
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < to.size(); ++i) {
        d = std::min(d, segment_distance(pts[k], to[i], to[(i + 1) % to.size()]));
      }
      best[k] = d;
    });
    return *std::max_element(best.begin(), best.end());
  };
  return std::max(directed(p, q), directed(q, p));
}

}  // namespace gaitforge
