#include "gaitforge/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/tools/toms748_solve.hpp>

#include "gaitforge/errors.hpp"
#include "gaitforge/ode.hpp"
#include "gaitforge/parallel.hpp"

namespace gaitforge::pmp {

using Vec6 = Eigen::Matrix<double, 6, 1>;

Vec6 OcpState::vec() const
{
  Vec6 v;
  v << phi1, phi2, theta, lambda1, lambda2, lambda3;
  return v;
}

OcpState OcpState::from(const Vec6 & v) { return {v(0), v(1), v(2), v(3), v(4), v(5)}; }

CostRow cost_integrand(const LocalConnection & a, double theta)
{
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * a(0, 0) - s * a(1, 0), c * a(0, 1) - s * a(1, 1)};
}

CostRow cost_integrand(const FramedConnection & a, const OcpState & s) { return cost_integrand(a(s.shape()), s.theta); }

namespace {

CostRow cost_theta(const LocalConnection & a, double theta)
{
  const double c = std::cos(theta), s = std::sin(theta);
  return {-s * a(0, 0) - c * a(1, 0), -s * a(0, 1) - c * a(1, 1)};
}

double psi_from(const Eigen::Vector3d & da, const OcpState & s)
{
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  return -(c * da(0) - sn * da(1) + s.lambda3 * da(2));
}

// A, dA, DA and the switching function; the curvature gradient only on request.
LocalData evaluate(const FramedConnection & a, const OcpState & s, const Differencing & d, bool gradient)
{
  LocalData ld;
  const CurvatureJet jet = curvature_jet(a, s.shape(), d.step, gradient);
  ld.A = jet.A;
  ld.dA = jet.dA;
  ld.DA = jet.DA;
  ld.dDA = jet.dDA;
  ld.cost = cost_integrand(ld.A, s.theta);
  ld.cost_theta = cost_theta(ld.A, s.theta);
  ld.psi = psi_from(ld.DA, s);
  if (gradient) {
    const double c = std::cos(s.theta), sn = std::sin(s.theta);
    const Eigen::RowVector2d psi_phi = -(c * ld.dDA.row(0) - sn * ld.dDA.row(1) + s.lambda3 * ld.dDA.row(2));
    const double psi_theta = sn * ld.DA(0) + c * ld.DA(1);
    const double psi_lambda3 = -ld.DA(2);
    ld.a_coef = psi_phi(0) + ld.A(2, 0) * psi_theta - psi_lambda3 * ld.cost_theta.g;
    ld.b_coef = psi_phi(1) + ld.A(2, 1) * psi_theta - psi_lambda3 * ld.cost_theta.h;
  }
  return ld;
}

Vec6 rhs_from(const LocalData & ld, const OcpState & s, const Eigen::Vector2d & u)
{
  const double c = std::cos(s.theta), sn = std::sin(s.theta);
  Vec6 out;
  out(0) = u(0);
  out(1) = u(1);
  out(2) = ld.A(2, 0) * u(0) + ld.A(2, 1) * u(1);
  for (int i = 0; i < 2; ++i) {
    const LocalConnection & di = ld.dA[i];
    const double gi = c * di(0, 0) - sn * di(1, 0);
    const double hi = c * di(0, 1) - sn * di(1, 1);
    out(3 + i) = -(gi * u(0) + hi * u(1) + s.lambda3 * (di(2, 0) * u(0) + di(2, 1) * u(1)));
  }
  out(5) = -(ld.cost_theta.g * u(0) + ld.cost_theta.h * u(1));
  return out;
}

}  // namespace

LocalData local_data(const FramedConnection & a, const OcpState & s, const Differencing & d)
{
  return evaluate(a, s, d, true);
}

double switching_function(const FramedConnection & a, const OcpState & s, const Differencing & d)
{
  return psi_from(curvature_jet(a, s.shape(), d.step, false).DA, s);
}

double hamiltonian(const LocalConnection & a, const OcpState & s, const Eigen::Vector2d & u)
{
  return hamiltonian_gradient_u(a, s).dot(u);
}

Eigen::Vector2d hamiltonian_gradient_u(const LocalConnection & a, const OcpState & s)
{
  const CostRow c = cost_integrand(a, s.theta);
  return {c.g + s.lambda1 + s.lambda3 * a(2, 0), c.h + s.lambda2 + s.lambda3 * a(2, 1)};
}

Vec6 canonical_rhs(const FramedConnection & a, const OcpState & s, const Eigen::Vector2d & u, const Differencing & d)
{
  return rhs_from(evaluate(a, s, d, false), s, u);
}

Eigen::Vector2d singular_control(const LocalData & ld, double sign, double t, const OcpState & s)
{
  const double n2 = ld.a_coef * ld.a_coef + ld.b_coef * ld.b_coef;
  if (!(n2 >= 1e-20)) {
    throw SingularArcBreakdown("singular-arc tangent undefined", s.phi1, s.phi2, t);
  }
  const double n = std::sqrt(n2);
  return sign * Eigen::Vector2d(ld.b_coef / n, -ld.a_coef / n);
}

Vec6 singular_arc_rhs(const FramedConnection & a, const OcpState & s, double sign, const Differencing & d)
{
  const LocalData ld = evaluate(a, s, d, true);
  return rhs_from(ld, s, singular_control(ld, sign, 0.0, s));
}

OcpState initial_costate(const FramedConnection & a, double phi_diagonal, const Differencing & d)
{
  OcpState s{phi_diagonal, phi_diagonal, 0.0, 0.0, 0.0, 0.0};
  const DifferenceScheme scheme{d.step, 4};
  const LocalConnection A = a(s.shape());
  const Eigen::Vector3d da = curvature(a, s.shape(), scheme).DA;
  // psi = -(DA_x + lambda3 DA_theta) at theta = 0
  if (std::abs(da(2)) < 1e-14) {
    throw NoRoot("initial costate: lambda3 coefficient vanishes at phi = " + std::to_string(phi_diagonal));
  }
  s.lambda3 = -da(0) / da(2);
  const CostRow c = cost_integrand(A, 0.0);
  s.lambda1 = -c.g - s.lambda3 * A(2, 0);
  s.lambda2 = -s.lambda1;
  return s;
}

namespace {

struct Quarter
{
  OcpState final;
  double t_final = 0.0;
  /// bound-arc entry and exit times, alternating
  std::vector<double> entries, exits;
  struct Sample
  {
    double t;
    OcpState state;
    ArcKind arc;
    /// orientation of the singular control
    double sign;
  };
  std::vector<Sample> samples;
};

ode::Options ode_options(const ShootOptions & o)
{
  ode::Options opt;
  opt.rtol = o.rtol;
  opt.atol = o.atol;
  opt.max_step = 0.05;
  opt.max_steps = 200000;
  return opt;
}

double choose_sign(double value) { return value < 0.0 ? -1.0 : 1.0; }

// One quarter from (phi0, phi0) toward the anti-diagonal, with an optional bound on phi2.
Quarter run_quarter(const FramedConnection & a, double phi0, std::optional<double> bound, const ShootOptions & o,
                    bool record)
{
  const ode::DormandPrince<6> solver(ode_options(o));
  const Differencing & d = o.differencing;
  Quarter q;
  if (bound && !(phi0 < *bound)) {
    throw BoundNeverReached("start point lies on or beyond the bound");
  }
  const OcpState s0 = initial_costate(a, phi0, d);

  auto recorder = [&](ArcKind kind, double sign) -> ode::DormandPrince<6>::Observer {
    if (!record) {
      return {};
    }
    return [&q, kind, sign, &o](const ode::Step<6> & st) {
      for (int k = 1; k <= o.substeps; ++k) {
        const double t = st.t0 + (st.stop - st.t0) * k / o.substeps;
        q.samples.push_back({t, OcpState::from(st(t)), kind, sign});
      }
    };
  };
  auto singular = [&](double sign) {
    return [&a, &d, sign](double t, const Vec6 & y) -> Vec6 {
      const OcpState s = OcpState::from(y);
      const LocalData ld = evaluate(a, s, d, true);
      return rhs_from(ld, s, singular_control(ld, sign, t, s));
    };
  };
  // bound arc: phi2 = b, u = (-1, 0); the multiplier nu keeps H_u2 at zero
  const Eigen::Vector2d ub(-1.0, 0.0);
  auto bound_rhs = [&a, &d, ub](double, const Vec6 & yy) -> Vec6 {
    const OcpState s = OcpState::from(yy);
    const LocalData ld = evaluate(a, s, d, false);
    Vec6 out = rhs_from(ld, s, ub);
    out(1) = 0.0;
    out(4) += ub(0) * ld.psi;
    return out;
  };
  const ode::Event<6> anti_diagonal{[](double, const Vec6 & y) { return y(0) + y(1); }, -1, true};
  auto finish = [&](const ode::Result<6> & r) {
    q.final = OcpState::from(r.y);
    q.t_final = r.t;
    return q;
  };

  double sign;
  {
    const LocalData ld = evaluate(a, s0, d, true);
    // leave the diagonal toward the anti-diagonal: phi1 - phi2 decreasing
    sign = -choose_sign(ld.a_coef + ld.b_coef);
  }
  if (record) {
    q.samples.push_back({0.0, s0, ArcKind::Singular, sign});
  }
  double t = 0.0;
  Vec6 y = s0.vec();
  const double t_end = o.max_time;
  for (;;) {
    std::vector<ode::Event<6>> events{anti_diagonal};
    if (bound) {
      events.push_back({[b = *bound](double, const Vec6 & yy) { return yy(1) - b; }, +1, true});
    }
    auto r = solver.integrate(singular(sign), t, y, t_end, events, recorder(ArcKind::Singular, sign));
    if (!r.event) {
      throw IntegrationFailure("singular arc did not reach the anti-diagonal");
    }
    if (*r.event == 0) {
      if (bound && q.entries.empty()) {
        throw BoundNeverReached("singular arc reached the anti-diagonal before phi2 = " + std::to_string(*bound));
      }
      return finish(r);
    }
    if (q.entries.size() >= static_cast<std::size_t>(o.max_bound_arcs)) {
      throw IntegrationFailure("too many bound arcs");
    }
    q.entries.push_back(r.t);
    t = r.t;
    y = r.y;
    y(1) = *bound;

    // psi vanishes at entry; the exit is its next zero
    const double lead_t = std::min(t + o.bound_lead, t_end);
    r = solver.integrate(bound_rhs, t, y, lead_t, {anti_diagonal}, recorder(ArcKind::Bound, sign));
    if (r.event) {
      return finish(r);
    }
    const double psi_lead = switching_function(a, OcpState::from(r.y), d);
    const ode::Event<6> psi_return{
        [&a, &d](double, const Vec6 & yy) { return switching_function(a, OcpState::from(yy), d); },
        psi_lead > 0.0 ? -1 : +1, true};
    r = solver.integrate(bound_rhs, r.t, r.y, t_end, {anti_diagonal, psi_return}, recorder(ArcKind::Bound, sign));
    if (!r.event) {
      throw IntegrationFailure("bound arc did not terminate");
    }
    if (*r.event == 0) {
      return finish(r);
    }
    q.exits.push_back(r.t);
    t = r.t;
    y = r.y;
    const LocalData ld = evaluate(a, OcpState::from(y), d, true);
    // leave the bound: u2 < 0
    sign = choose_sign(ld.a_coef);
  }
}

double residual_of(const Quarter & q) { return q.final.lambda3; }

std::vector<double> scan_grid(std::optional<double> bound, const ShootOptions & o)
{
  std::vector<double> grid;
  for (long i = 0;; ++i) {
    const double x = o.scan_min + static_cast<double>(i) * o.scan_step;
    if (x > o.scan_max + 1e-12 || (bound && x >= *bound)) {
      break;
    }
    grid.push_back(x);
  }
  return grid;
}

void shoot_range(const FramedConnection & a, std::optional<double> bound, const ShootOptions & o,
                 const std::vector<double> & grid, std::size_t begin, std::size_t end, std::vector<Shot> & shots)
{
  parallel_for(end - begin, [&](std::size_t k) {
    Shot & s = shots[begin + k];
    s.phi1_0 = grid[begin + k];
    try {
      s.residual = residual_of(run_quarter(a, s.phi1_0, bound, o, false));
    } catch (const Error & e) {
      s.residual = std::numeric_limits<double>::quiet_NaN();
      s.failure = e.what();
    }
  });
}

std::vector<Shot> scan(const FramedConnection & a, std::optional<double> bound, const ShootOptions & o)
{
  const auto grid = scan_grid(bound, o);
  std::vector<Shot> shots(grid.size());
  shoot_range(a, bound, o, grid, 0, grid.size(), shots);
  return shots;
}

struct Bracket
{
  double lo, hi, flo, fhi;
};

double find_root(const FramedConnection & a, std::optional<double> bound, const Bracket & br, const ShootOptions & o,
                 int & evaluations)
{
  if (br.flo == 0.0) {
    return br.lo;
  }
  std::map<double, double> cache{{br.lo, br.flo}, {br.hi, br.fhi}};
  auto f = [&](double x) {
    ++evaluations;
    const double v = residual_of(run_quarter(a, x, bound, o, false));
    cache[x] = v;
    return v;
  };
  boost::uintmax_t iters = 200;
  const auto tol = [&](double x0, double x1) { return std::abs(x1 - x0) <= o.root_tol; };
  const auto [x0, x1] = boost::math::tools::toms748_solve(f, br.lo, br.hi, br.flo, br.fhi, tol, iters);
  return std::abs(cache.count(x0) ? cache[x0] : f(x0)) <= std::abs(cache.count(x1) ? cache[x1] : f(x1)) ? x0 : x1;
}

PmpSolution assemble(const FramedConnection & a, const Quarter & q, double phi0, std::optional<double> bound,
                     const ShootOptions & o)
{
  const Differencing & d = o.differencing;
  PmpSolution sol;
  sol.bound = bound;
  sol.phi1_0 = phi0;
  if (!q.entries.empty()) {
    sol.tau1 = q.entries.front();
  }
  if (!q.exits.empty()) {
    sol.tau2 = q.exits.front();
  }
  sol.bound_entries = q.entries;
  sol.bound_exits = q.exits;
  sol.t_final = q.t_final;
  sol.lambda3_0 = q.samples.empty() ? 0.0 : q.samples.front().state.lambda3;

  Diagnostics & dg = sol.diagnostics;
  std::optional<double> h0;
  for (const auto & smp : q.samples) {
    ArcSample as;
    as.t = smp.t;
    as.state = smp.state;
    as.arc = smp.arc;
    if (smp.arc == ArcKind::Singular) {
      const LocalData ld = evaluate(a, smp.state, d, true);
      as.u = singular_control(ld, smp.sign, smp.t, smp.state);
      as.psi = ld.psi;
      as.hu = hamiltonian_gradient_u(ld.A, smp.state);
      as.hamiltonian = as.hu.dot(as.u);
      dg.max_psi = std::max(dg.max_psi, std::abs(as.psi));
    } else {
      const LocalData ld = evaluate(a, smp.state, d, false);
      as.u = Eigen::Vector2d(-1.0, 0.0);
      as.psi = ld.psi;
      as.nu = ld.psi;
      as.hu = hamiltonian_gradient_u(ld.A, smp.state);
      as.hamiltonian = as.hu.dot(as.u);
    }
    dg.max_hu = std::max(dg.max_hu, as.hu.cwiseAbs().maxCoeff());
    if (!h0) {
      h0 = as.hamiltonian;
    }
    dg.hamiltonian_drift = std::max(dg.hamiltonian_drift, std::abs(as.hamiltonian - *h0));
    sol.quarter.push_back(as);
  }

  // Hamiltonian on both sides of each junction (state is continuous, control switches)
  for (std::size_t i = 1; i < sol.quarter.size(); ++i) {
    const ArcSample & prev = sol.quarter[i - 1];
    const ArcSample & next = sol.quarter[i];
    if (prev.arc != next.arc) {
      const OcpState & s = next.arc == ArcKind::Bound ? prev.state : next.state;
      const LocalConnection A = a(s.shape());
      const double before = hamiltonian(A, s, prev.u);
      const double after = hamiltonian(A, s, next.u);
      dg.hamiltonian_jump = std::max(dg.hamiltonian_jump, std::abs(before - after));
    }
  }

  dg.lambda3_final = q.final.lambda3;
  dg.lambda_gap_final = q.final.lambda1 - q.final.lambda2;

  std::vector<ShapePoint> quarter;
  for (const auto & smp : q.samples) {
    if (quarter.empty() || std::hypot(smp.state.phi1 - quarter.back().phi1, smp.state.phi2 - quarter.back().phi2) > 1e-9) {
      quarter.push_back(smp.state.shape());
    }
  }
  const ShapePoint end = quarter.back();
  dg.closure_error = std::abs(end.phi1 + end.phi2);
  sol.full_gait = reconstruct_gait(quarter);
  sol.displacement = net_displacement(a, Gait::polyline(sol.full_gait));
  sol.converged = std::abs(q.final.lambda3) <= o.residual_tol;
  return sol;
}

}  // namespace

std::vector<ShapePoint> reconstruct_gait(const std::vector<ShapePoint> & quarter)
{
  if (quarter.size() < 2) {
    throw InvalidGait("quarter gait needs at least two points");
  }
  const std::size_t n = quarter.size();
  std::vector<ShapePoint> out;
  out.reserve(4 * n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.push_back(quarter[i]);
  }
  // across the anti-diagonal, traversed backwards
  for (std::size_t i = n; i-- > 1;) {
    out.push_back({-quarter[i].phi2, -quarter[i].phi1});
  }
  // point reflection
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.push_back({-quarter[i].phi1, -quarter[i].phi2});
  }
  // across the diagonal, traversed backwards
  for (std::size_t i = n; i-- > 1;) {
    out.push_back({quarter[i].phi2, quarter[i].phi1});
  }
  return out;
}

std::vector<Shot> scan_unbounded(const FramedConnection & a, const ShootOptions & options)
{
  return scan(a, std::nullopt, options);
}

std::vector<Shot> scan_bounded(const FramedConnection & a, double bound, const ShootOptions & options)
{
  return scan(a, bound, options);
}

PmpSolution evaluate_unbounded(const FramedConnection & a, double phi1_0, const ShootOptions & options)
{
  return assemble(a, run_quarter(a, phi1_0, std::nullopt, options, true), phi1_0, std::nullopt, options);
}

PmpSolution evaluate_bounded(const FramedConnection & a, double bound, double phi1_0, const ShootOptions & options)
{
  return assemble(a, run_quarter(a, phi1_0, bound, options, true), phi1_0, bound, options);
}

PmpSolution shoot_unbounded(const FramedConnection & a, double lo, double hi, const ShootOptions & options)
{
  const double flo = residual_of(run_quarter(a, lo, std::nullopt, options, false));
  const double fhi = residual_of(run_quarter(a, hi, std::nullopt, options, false));
  if ((flo < 0.0) == (fhi < 0.0) && flo != 0.0 && fhi != 0.0) {
    throw NoBracket("shooting residual does not change sign on [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  int evals = 2;
  const double root = find_root(a, std::nullopt, {lo, hi, flo, fhi}, options, evals);
  PmpSolution sol = evaluate_unbounded(a, root, options);
  sol.residual_evaluations = evals;
  return sol;
}

PmpSolution shoot_bounded(const FramedConnection & a, double bound, double lo, double hi, const ShootOptions & options)
{
  if (!(bound > 0.0)) {
    throw InvalidParameters("bound must be positive");
  }
  const double flo = residual_of(run_quarter(a, lo, bound, options, false));
  const double fhi = residual_of(run_quarter(a, hi, bound, options, false));
  if ((flo < 0.0) == (fhi < 0.0) && flo != 0.0 && fhi != 0.0) {
    throw NoBracket("bounded shooting residual does not change sign on [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  int evals = 2;
  const double root = find_root(a, bound, {lo, hi, flo, fhi}, options, evals);
  PmpSolution sol = evaluate_bounded(a, bound, root, options);
  sol.residual_evaluations = evals;
  return sol;
}

namespace {

/// Scans the diagonal in blocks, root-finding each new bracket, until `accept` takes a solution.
template <class Accept>
std::optional<PmpSolution> search(const FramedConnection & a, std::optional<double> bound, const ShootOptions & o,
                                  std::vector<Shot> & shots, Accept accept)
{
  const auto grid = scan_grid(bound, o);
  shots.assign(grid.size(), Shot{});
  const std::size_t block = std::max<std::size_t>(8, 2 * worker_count());
  std::size_t done = 0;
  while (done < grid.size()) {
    const std::size_t end = std::min(grid.size(), done + block);
    shoot_range(a, bound, o, grid, done, end, shots);
    for (std::size_t i = std::max<std::size_t>(done, 1); i < end; ++i) {
      const double f0 = shots[i - 1].residual, f1 = shots[i].residual;
      if (!(std::isfinite(f0) && std::isfinite(f1) && ((f0 < 0.0) != (f1 < 0.0) || f0 == 0.0))) {
        continue;
      }
      int evals = 0;
      try {
        const double root = find_root(a, bound, {shots[i - 1].phi1_0, shots[i].phi1_0, f0, f1}, o, evals);
        PmpSolution sol = bound ? evaluate_bounded(a, *bound, root, o) : evaluate_unbounded(a, root, o);
        sol.residual_evaluations = evals;
        if (sol.converged && accept(sol)) {
          shots.resize(end);
          return sol;
        }
      } catch (const Error & e) {
        // an arc inside the bracket failed; keep the message with the bracket's upper shot
        shots[i].failure = std::string("root search: ") + e.what();
      }
    }
    done = end;
  }
  return std::nullopt;
}

[[noreturn]] void no_solution(const std::vector<Shot> & shots, const std::string & what)
{
  for (const auto & s : shots) {
    if (s.failure.find("tangent undefined") != std::string::npos) {
      throw SingularArcBreakdown(what + "; arcs break down (first at phi1(0) = " + std::to_string(s.phi1_0) + ")",
                                 s.phi1_0, s.phi1_0, 0.0);
    }
  }
  throw NoBracket(what);
}

}  // namespace

PmpSolution solve_unbounded(const FramedConnection & a, const std::string & branch, const ShootOptions & options)
{
  if (branch != "forward" && branch != "reverse") {
    throw InvalidParameters("branch must be forward or reverse");
  }
  const bool forward = branch == "forward";
  std::vector<Shot> shots;
  auto sol = search(a, std::nullopt, options, shots,
                    [&](const PmpSolution & s) { return forward ? s.displacement.x >= 0.0 : s.displacement.x < 0.0; });
  if (!sol) {
    no_solution(shots, "no " + branch + " solution of the unbounded problem on the diagonal scan");
  }
  sol->branch = branch;
  return *sol;
}

PmpSolution solve_bounded(const FramedConnection & a, double bound, const ShootOptions & options)
{
  if (!(bound > 0.0)) {
    throw InvalidParameters("bound must be positive");
  }
  std::vector<Shot> shots;
  auto sol = search(a, bound, options, shots, [](const PmpSolution &) { return true; });
  if (sol) {
    sol->branch = "reverse";
    return *sol;
  }
  bool any_reached = false;
  for (const auto & s : shots) {
    any_reached = any_reached || std::isfinite(s.residual);
  }
  if (!any_reached) {
    for (const auto & s : shots) {
      if (s.failure.find("before phi2") != std::string::npos) {
        throw BoundNeverReached("no singular arc from the diagonal reaches phi2 = " + std::to_string(bound));
      }
    }
  }
  no_solution(shots, "no solution of the bounded problem with b = " + std::to_string(bound));
}

}  // namespace gaitforge::pmp
