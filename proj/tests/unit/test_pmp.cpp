#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gaitforge/errors.hpp"
#include "gaitforge/geometry.hpp"
#include "gaitforge/pmp.hpp"
#include "oracles.hpp"

using namespace gaitforge;
using namespace gaitforge::pmp;

namespace {

const PmpSolution & purcell_forward()
{
  static const PmpSolution sol = solve_unbounded(FramedConnection(SwimmerModel::purcell()), "forward");
  return sol;
}

// Largest increase of |dx| over 20 random closed perturbations of amplitude 0.01 rad, each
// coordinate a Fourier mode in arc length drawn from `modes`.
double perturbation_gain(const PmpSolution & sol, const std::vector<int> & modes, std::uint64_t seed)
{
  const FramedConnection a(SwimmerModel::purcell());
  const double base = std::abs(net_displacement(a, Gait::polyline(sol.full_gait)).x);
  const double two_pi = 2.0 * std::acos(-1.0);
  const std::size_t n = sol.full_gait.size();
  std::vector<double> arc(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const ShapePoint d = sol.full_gait[(k + 1) % n] - sol.full_gait[k];
    arc[k + 1] = arc[k] + std::hypot(d.phi1, d.phi2);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, modes.size() - 1);
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const int m1 = modes[pick(rng)], m2 = modes[pick(rng)];
    const double a1 = coef(rng), b1 = coef(rng), a2 = coef(rng), b2 = coef(rng);
    std::vector<ShapePoint> pert;
    double peak = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = two_pi * arc[k] / arc[n];
      const ShapePoint d{a1 * std::sin(m1 * s) + b1 * std::cos(m1 * s), a2 * std::sin(m2 * s) + b2 * std::cos(m2 * s)};
      peak = std::max(peak, std::hypot(d.phi1, d.phi2));
      pert.push_back(d);
    }
    for (std::size_t k = 0; k < n; ++k) {
      pert[k] = sol.full_gait[k] + (0.01 / peak) * pert[k];
    }
    worst = std::max(worst, std::abs(net_displacement(a, Gait::polyline(pert)).x) - base);
  }
  return worst;
}

}  // namespace

TEST_SUITE("pmp")
{
  TEST_CASE("cost row is the world x-row of the connection")
  {
    const LocalConnection A = SwimmerModel::purcell().connection({0.4, -0.8});
    const CostRow r0 = cost_integrand(A, 0.0);
    CHECK(r0.g == A(0, 0));
    CHECK(r0.h == A(0, 1));
    const CostRow rpi = cost_integrand(A, std::acos(-1.0));
    CHECK(rpi.g == doctest::Approx(-A(0, 0)));
    CHECK(rpi.h == doctest::Approx(-A(0, 1)));
    const double th = 0.7;
    const CostRow r = cost_integrand(A, th);
    CHECK(r.g == doctest::Approx(std::cos(th) * A(0, 0) - std::sin(th) * A(1, 0)));
  }

  TEST_CASE("costate dynamics match differences of the Hamiltonian")
  {
    for (const SwimmerModel & m : {SwimmerModel::purcell(), SwimmerModel::perfect_fluid()}) {
      const FramedConnection a(m);
      std::mt19937_64 rng(41);
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      for (int k = 0; k < 100; ++k) {
        OcpState s;
        s.phi1 = u(rng);
        s.phi2 = u(rng);
        s.theta = u(rng);
        s.lambda1 = u(rng);
        s.lambda2 = u(rng);
        s.lambda3 = u(rng);
        const double t = u(rng);
        const Eigen::Vector2d ctl(std::cos(t), std::sin(t));
        const Eigen::Vector3d ref = oracle::costate_gradient(a, s, ctl);
        const Eigen::Vector3d got = canonical_rhs(a, s, ctl).tail<3>();
        for (int i = 0; i < 3; ++i) {
          CHECK(std::abs(got(i) - ref(i)) <= 1e-5 * std::max(1.0, std::abs(ref(i))));
        }
      }
    }
  }

  TEST_CASE("initial costate zeroes the switching function and H_u")
  {
    const FramedConnection a(SwimmerModel::purcell());
    for (double phi : {0.3, 0.8, 1.4}) {
      const OcpState s = initial_costate(a, phi);
      CHECK(s.phi1 == s.phi2);
      CHECK(s.theta == 0.0);
      CHECK(s.lambda1 == doctest::Approx(-s.lambda2));
      CHECK(std::abs(switching_function(a, s)) < 1e-12);
      CHECK(hamiltonian_gradient_u(a(s.shape()), s).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("degenerate switching coefficient has no root")
  {
    const FramedConnection a(SwimmerModel::synthetic({"flat", [](ShapePoint) {
      LocalConnection c = LocalConnection::Zero();
      c(0, 0) = 1.0;
      return c;
    }}));
    CHECK_THROWS_AS(initial_costate(a, 0.5), NoRoot);
  }

  TEST_CASE("purcell forward gait satisfies the optimality conditions")
  {
    const PmpSolution & sol = purcell_forward();
    REQUIRE(sol.converged);
    CHECK(sol.branch == "forward");
    CHECK(sol.displacement.x > 0.0);
    const Diagnostics & d = sol.diagnostics;
    CHECK(d.max_hu < 1e-6);
    CHECK(d.max_psi < 1e-6);
    CHECK(d.hamiltonian_drift < 1e-6);
    CHECK(std::abs(d.lambda3_final) < 1e-8);
    CHECK(d.closure_error < 1e-8);
    CHECK(sol.quarter.front().state.phi1 == sol.quarter.front().state.phi2);
    for (const ArcSample & s : sol.quarter) {
      CHECK(s.u.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("reconstructed gait has the swimmer's symmetries")
  {
    const auto & g = purcell_forward().full_gait;
    std::vector<ShapePoint> diag, anti, point;
    for (const ShapePoint & p : g) {
      diag.push_back({p.phi2, p.phi1});
      anti.push_back({-p.phi2, -p.phi1});
      point.push_back({-p.phi1, -p.phi2});
    }
    CHECK(hausdorff_distance(g, diag) < 1e-12);
    CHECK(hausdorff_distance(g, anti) < 1e-12);
    CHECK(hausdorff_distance(g, point) < 1e-12);
    CHECK_THROWS_AS(reconstruct_gait({{0.1, 0.1}}), InvalidGait);
  }

  TEST_CASE("random smooth perturbations do not improve the gait")
  {
    CHECK(perturbation_gain(purcell_forward(), {1, 2, 3, 4}, 1) <= 1e-6);
  }

  TEST_CASE("perturbations keeping the point symmetry do not improve the gait")
  {
    CHECK(perturbation_gain(purcell_forward(), {1, 3, 5}, 2) <= 1e-6);
  }

  TEST_CASE("purcell reverse branch has no unbounded solution")
  {
    const FramedConnection a(SwimmerModel::purcell());
    CHECK_THROWS_AS(solve_unbounded(a, "reverse"), Error);
  }
}
