#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaitforge/connection.hpp"
#include "gaitforge/errors.hpp"
#include "gaitforge/geometry.hpp"
#include "gaitforge/pmp.hpp"
#include "gaitforge/se2.hpp"
#include "gaitforge/simulate.hpp"
#include "oracles.hpp"

using namespace gaitforge;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string & what)
  {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok " : "FAILED ") + what);
  }
  void note(const std::string & what) { notes.push_back(what); }
};

std::string num(double v, int digits = 4)
{
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

struct Context
{
  std::string cli;
  fs::path work;
  fs::path fixtures;
  /// every converged PMP solution seen by criteria 4 to 6, for criterion 7
  std::vector<std::pair<std::string, pmp::PmpSolution>> converged;
  std::vector<std::pair<std::string, FramedConnection>> connections;
};

FramedConnection optimized(const SwimmerModel & m, double half)
{
  return FramedConnection(m, optimize_frame(m, ShapeWindow::square(half)).frame);
}

// 1
Outcome oracles(Context &)
{
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  const std::pair<std::string, SwimmerModel> models[] = {
      {"purcell", SwimmerModel::purcell()},
      {"perfect fluid eta=1/3", SwimmerModel::perfect_fluid(PerfectFluidParams::from_eta(1.0 / 3.0))},
      {"perfect fluid eta=1/2", SwimmerModel::perfect_fluid(PerfectFluidParams::from_eta(0.5))}};
  for (const auto & [name, m] : models) {
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const ShapePoint phi{u(rng), u(rng)};
      const auto ref = oracle::connection_result(m, phi);
      worst = std::max(worst, (m.connection(phi) - ref.value).cwiseAbs().maxCoeff());
    }
    o.check(worst < 1e-6, name + " max abs error " + num(worst, 3) + " over 500 points");
  }
  return o;
}

// 2
Outcome stokes(Context &)
{
  Outcome o;
  const SwimmerModel m = SwimmerModel::purcell();
  const FramedConnection mid(m);
  const std::pair<double, double> cases[] = {{0.2, 0.02}, {0.5, 0.05}, {1.0, 0.10}};
  for (const auto & [eps, tol] : cases) {
    // constant-weight frame fitted to the square the circle occupies
    const FramedConnection opt = optimized(m, eps);
    const Gait g = Gait::circle({}, eps);
    auto gap = [&](const FramedConnection & a) {
      const double line = net_displacement(a, g).x;
      return std::abs(cbvi(a, g.boundary()).displacement.x - line) / std::abs(line);
    };
    const double e_opt = gap(opt), e_mid = gap(mid);
    o.check(e_opt < tol, "eps=" + num(eps) + " optimized frame error " + num(100 * e_opt, 3) + "% < " +
                             num(100 * tol) + "%");
    o.check(e_mid > e_opt, "eps=" + num(eps) + " middle-link error " + num(100 * e_mid, 3) + "% is larger");
  }
  return o;
}

// 3
Outcome sweep(Context & ctx)
{
  Outcome o;
  const FramedConnection a(SwimmerModel::purcell());
  std::vector<double> grid;
  for (int k = 1; k <= 314; ++k) {
    grid.push_back(std::numbers::pi * k / 314);
  }
  nlohmann::ordered_json fixture;
  fixture["description"] = "Purcell swimmer, default parameters, middle-link frame: extrema of net x displacement "
                           "over circle and square gait amplitudes in (0, pi], computed by the sweep";
  fixture["grid"] = {{"first", grid.front()}, {"last", grid.back()}, {"count", grid.size()}};
  for (auto fam : {Gait::Family::Circle, Gait::Family::Square}) {
    const std::string name = fam == Gait::Family::Circle ? "circle" : "square";
    const SweepResult r = displacement_sweep(a, fam, grid);
    fixture[name] = {{"argmax", {{"eps", r.argmax.eps}, {"dx", r.argmax.dx}, {"interior", r.argmax.interior}}},
                     {"argmin", {{"eps", r.argmin.eps}, {"dx", r.argmin.dx}, {"interior", r.argmin.interior}}},
                     {"sign_changes", r.sign_changes}};
    o.note(name + " max dx " + num(r.argmax.dx) + " at eps " + num(r.argmax.eps) + (r.argmax.interior ? "" : " (endpoint)") +
           ", min dx " + num(r.argmin.dx) + " at eps " + num(r.argmin.eps) + (r.argmin.interior ? "" : " (endpoint)") +
           ", " + std::to_string(r.sign_changes.size()) + " sign change(s)");
    o.check(r.sign_changes.size() == 1, name + ": exactly one sign change");
    o.check(r.argmax.interior && r.argmin.interior && r.argmax.dx > 0.0 && r.argmin.dx < 0.0,
            name + ": two interior extrema of opposite sign");
  }
  fs::create_directories(ctx.fixtures);
  std::ofstream(ctx.fixtures / "sweep_extrema.json") << fixture.dump(2) << "\n";
  o.note("extrema written to " + (ctx.fixtures / "sweep_extrema.json").string());
  return o;
}

double match_inner_contour(const FramedConnection & a, double half, int n, const std::vector<ShapePoint> & gait)
{
  const ContourSet set = extract_zero_contours(sample_height_field(a, ShapeWindow::square(half), n));
  double best = std::numeric_limits<double>::infinity();
  for (const Contour * c : set.closed_loops()) {
    best = std::min(best, hausdorff_distance(c->points, gait));
  }
  return best;
}

// 4
Outcome forward(Context & ctx)
{
  Outcome o;
  struct Case
  {
    std::string name;
    SwimmerModel model;
    double half;
    int n;
  };
  const Case cases[] = {{"purcell", SwimmerModel::purcell(), 3.2, 401},
                        {"perfect fluid eta=1/3",
                         SwimmerModel::perfect_fluid(PerfectFluidParams::from_eta(1.0 / 3.0)), 6.0, 601}};
  for (const Case & c : cases) {
    const FramedConnection a = optimized(c.model, c.half);
    try {
      const pmp::PmpSolution sol = pmp::solve_unbounded(a, "forward");
      o.check(sol.converged, c.name + ": PMP forward converged, phi1(0) = " + num(sol.phi1_0, 8));
      o.check(sol.displacement.x > 0.0, c.name + ": dx = " + num(sol.displacement.x) + " > 0");
      const double d = match_inner_contour(a, c.half, c.n, sol.full_gait);
      o.check(d < 0.05, c.name + ": Hausdorff distance to nearest zero contour " + num(d, 3) + " < 0.05 rad");
      ctx.converged.emplace_back(c.name + " forward", sol);
      ctx.connections.emplace_back(c.name + " forward", a);
    } catch (const Error & e) {
      o.check(false, c.name + ": " + e.what());
    }
  }
  return o;
}

bool bound_arcs_on_bound(const pmp::PmpSolution & sol, double b)
{
  bool any = false;
  for (const auto & s : sol.quarter) {
    if (s.arc == pmp::ArcKind::Bound) {
      any = true;
      if (std::abs(s.state.phi2 - b) > 1e-9 || s.u(1) != 0.0) {
        return false;
      }
    }
  }
  return any;
}

// 5
Outcome reverse(Context & ctx)
{
  Outcome o;
  const FramedConnection a(SwimmerModel::purcell());
  try {
    const pmp::PmpSolution sol = pmp::solve_unbounded(a, "reverse");
    o.check(false, "unbounded reverse unexpectedly converged with dx = " + num(sol.displacement.x));
  } catch (const NoBracket & e) {
    o.check(true, std::string("unbounded reverse fails: NoBracket (") + e.what() + ")");
  } catch (const SingularArcBreakdown & e) {
    o.check(true, std::string("unbounded reverse fails: SingularArcBreakdown (") + e.what() + ")");
  }
  for (double b : {3.1, 3.2, 3.6}) {
    const std::string name = "b=" + num(b);
    try {
      const pmp::PmpSolution sol = pmp::solve_bounded(a, b);
      o.check(sol.converged && sol.displacement.x < 0.0,
              name + ": converged, dx = " + num(sol.displacement.x) + ", phi1(0) = " + num(sol.phi1_0, 8));
      o.check(bound_arcs_on_bound(sol, b), name + ": " + std::to_string(sol.bound_entries.size()) +
                                               " bound arc(s) with phi2 == b and u2 == 0");
      ctx.converged.emplace_back("purcell bounded " + name, sol);
      ctx.connections.emplace_back("purcell bounded " + name, a);
    } catch (const Error & e) {
      o.check(false, name + ": " + e.what());
    }
  }
  // last converging bound and first failing bound found by a scan of b in steps of 0.1
  const double last_ok = 5.7, first_fail = 5.8;
  try {
    const pmp::PmpSolution sol = pmp::solve_bounded(a, last_ok);
    o.check(sol.converged, "b=" + num(last_ok) + " still converges, dx = " + num(sol.displacement.x));
  } catch (const Error & e) {
    o.check(false, "b=" + num(last_ok) + ": " + e.what());
  }
  try {
    const pmp::PmpSolution sol = pmp::solve_bounded(a, first_fail);
    o.check(false, "b=" + num(first_fail) + " unexpectedly converged, dx = " + num(sol.displacement.x));
  } catch (const Error & e) {
    o.check(true, "b=" + num(first_fail) + " fails as recorded: " + e.what());
  }
  return o;
}

// 6
Outcome topology(Context & ctx)
{
  Outcome o;
  {
    const SwimmerModel m = SwimmerModel::perfect_fluid(PerfectFluidParams::from_eta(1.0 / 3.0));
    const FramedConnection a = optimized(m, 6.0);
    const ContourSet set = extract_zero_contours(sample_height_field(a, ShapeWindow::square(6.0), 601));
    o.check(!set.junctions.empty(), "eta=1/3: " + std::to_string(set.junctions.size()) + " junction(s)");
    int flagged = 0, rejected = 0;
    for (const Contour & c : set.contours) {
      if (c.kind != ContourKind::JunctionBearing) {
        continue;
      }
      ++flagged;
      try {
        contour_as_gait(a, c);
      } catch (const JunctionBearing &) {
        ++rejected;
      }
    }
    o.check(flagged > 0 && rejected == flagged,
            "eta=1/3: contour_as_gait rejects " + std::to_string(rejected) + " of " + std::to_string(flagged) +
                " junction-bearing contour(s)");
  }
  {
    const SwimmerModel m = SwimmerModel::perfect_fluid(PerfectFluidParams::from_eta(0.5));
    const FramedConnection a = optimized(m, 6.0);
    const ContourSet set = extract_zero_contours(sample_height_field(a, ShapeWindow::square(6.0), 601));
    int clean = 0;
    for (const Contour * c : set.closed_loops()) {
      clean += c->kind == ContourKind::Closed ? 1 : 0;
    }
    o.check(clean >= 2 && set.junctions.empty(), "eta=1/2: " + std::to_string(clean) + " junction-free loop(s), " +
                                                     std::to_string(set.junctions.size()) + " junction(s)");
    std::vector<double> dx;
    for (const char * branch : {"forward", "reverse"}) {
      try {
        const pmp::PmpSolution sol = pmp::solve_unbounded(a, branch);
        double best = std::numeric_limits<double>::infinity();
        for (const Contour * c : set.closed_loops()) {
          best = std::min(best, hausdorff_distance(c->points, sol.full_gait));
        }
        o.check(sol.converged, std::string("eta=1/2 ") + branch + ": converged, dx = " + num(sol.displacement.x) +
                                   ", nearest loop at Hausdorff " + num(best, 3));
        dx.push_back(sol.displacement.x);
        ctx.converged.emplace_back(std::string("eta=1/2 ") + branch, sol);
        ctx.connections.emplace_back(std::string("eta=1/2 ") + branch, a);
      } catch (const Error & e) {
        o.check(false, std::string("eta=1/2 ") + branch + ": " + e.what());
      }
    }
    o.check(dx.size() == 2 && dx[0] * dx[1] < 0.0, "eta=1/2: the two gaits move in opposite directions");
  }
  return o;
}

// 7
Outcome conditions(Context & ctx)
{
  Outcome o;
  o.check(!ctx.converged.empty(), std::to_string(ctx.converged.size()) + " converged solutions checked");
  for (const auto & [name, sol] : ctx.converged) {
    const auto & d = sol.diagnostics;
    const bool ok = d.max_hu < 1e-6 && d.max_psi < 1e-6 && d.hamiltonian_drift < 1e-6 && d.hamiltonian_jump < 1e-6 &&
                    std::abs(d.lambda3_final) < 1e-8;
    o.check(ok, name + ": |H_u| " + num(d.max_hu, 2) + ", |psi| " + num(d.max_psi, 2) + ", drift " +
                    num(d.hamiltonian_drift, 2) + ", jump " + num(d.hamiltonian_jump, 2) + ", lambda3(tf) " +
                    num(d.lambda3_final, 2));
  }
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  double worst = 0.0;
  for (const auto & [name, a] : ctx.connections) {
    (void)name;
    for (int k = 0; k < 100; ++k) {
      pmp::OcpState s;
      s.phi1 = u(rng);
      s.phi2 = u(rng);
      s.theta = u(rng);
      s.lambda1 = u(rng);
      s.lambda2 = u(rng);
      s.lambda3 = u(rng);
      const double t = u(rng);
      const Eigen::Vector2d ctl(std::cos(t), std::sin(t));
      const Eigen::Vector3d ref = oracle::costate_gradient(a, s, ctl);
      const Eigen::Vector3d got = pmp::canonical_rhs(a, s, ctl).tail<3>();
      for (int i = 0; i < 3; ++i) {
        worst = std::max(worst, std::abs(got(i) - ref(i)) / std::max(1.0, std::abs(ref(i))));
      }
    }
    if (ctx.connections.size() > 3) {
      break;
    }
  }
  o.check(worst < 1e-5, "costate dynamics vs finite differences of H: worst relative error " + num(worst, 3));
  return o;
}

// 8
Outcome invariants(Context &)
{
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const SwimmerModel models[] = {SwimmerModel::purcell(), SwimmerModel::perfect_fluid()};
  bool zero = true;
  for (const auto & m : models) {
    for (int k = 0; k < 1000; ++k) {
      zero = zero && lie_bracket(m.connection({u(rng), u(rng)}))(2) == 0.0;
    }
  }
  o.check(zero, "bracket theta component exactly 0 at 2000 points");

  const std::vector<Gait> gaits = {Gait::circle({}, 0.5), Gait::circle({0.3, -0.2}, 1.2), Gait::square({}, 0.8),
                                   Gait::square({0.1, 0.4}, 1.5),
                                   Gait::polyline({{0.0, -1.0}, {1.2, 0.1}, {0.2, 1.4}, {-1.1, 0.3}})};
  double reparam = 0.0, loop = 0.0;
  for (const auto & m : models) {
    const FramedConnection a(m);
    for (const Gait & g : gaits) {
      reparam = std::max(reparam, time_reparametrization_check(a, g, TimeProfile::uniform(), TimeProfile::eased()));
      reparam = std::max(reparam, time_reparametrization_check(a, g, TimeProfile::uniform(), TimeProfile::quadratic()));
      loop = std::max(loop, se2::distance(se2::compose(net_displacement(a, g), net_displacement(a, g.reversed())),
                                          BodyPose{}));
    }
  }
  o.check(reparam < 1e-8, "time reparametrization discrepancy " + num(reparam, 3) + " < 1e-8");
  o.check(loop < 1e-7, "cw after ccw returns to identity within " + num(loop, 3) + " < 1e-7");

  // isotropic drag keeps the length-weighted centroid fixed; gaits with net rotation still
  // move the middle link, so translation is measured at the centroid
  PurcellParams iso;
  iso.cn = iso.ct;
  const SwimmerModel m = SwimmerModel::purcell(iso);
  const double total = iso.l0 + iso.l1 + iso.l2;
  const FramedConnection centroid(m, BodyFrameSpec::weighted({iso.l0 / total, iso.l1 / total, iso.l2 / total},
                                                             {1.0, 0.0, 0.0}));
  const FramedConnection middle(m);
  double drift = 0.0, drift_still = 0.0, drift_turning = 0.0;
  for (const Gait & g : gaits) {
    const BodyPose c = net_displacement(centroid, g);
    drift = std::max({drift, std::abs(c.x), std::abs(c.y)});
    const BodyPose d = net_displacement(middle, g);
    double & bucket = std::abs(d.theta) < 1e-9 ? drift_still : drift_turning;
    bucket = std::max({bucket, std::abs(d.x), std::abs(d.y)});
  }
  o.check(drift < 1e-9, "isotropic drag, centroid frame: largest |dx|, |dy| " + num(drift, 3) + " < 1e-9");
  o.check(drift_still < 1e-9, "isotropic drag, middle-link frame, gaits without net rotation: largest |dx|, |dy| " +
                                  num(drift_still, 3) + " < 1e-9");
  o.note("isotropic drag, middle-link frame, gaits with net rotation: largest |dx|, |dy| " + num(drift_turning, 3));
  return o;
}

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string quote(const std::string & s) { return "'" + s + "'"; }

// 9
Outcome determinism(Context & ctx)
{
  Outcome o;
  const fs::path root = ctx.work / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "purcell.cfg";
  std::ofstream(cfg) << "model = \"purcell\"\nct = 1\ncn = 2\nseed = 7\n";

  const std::vector<std::pair<std::string, std::string>> runs = {
      {"sweep", "sweep --eps-step 0.1"},
      {"heightfield", "heightfield --grid 121"},
      {"pmp", "pmp --branch forward"},
      {"pmp_fail", "pmp --branch forward --scan-max 0.3"},
      {"compare", "compare --grid 201 --scan-step 0.05"},
  };
  for (const auto & [name, args] : runs) {
    std::vector<fs::path> dirs;
    std::vector<int> codes;
    for (const char * rep : {"a", "b"}) {
      const fs::path out = root / name / rep;
      const std::string cmd = quote(ctx.cli) + " " + args + " --model-config " + quote(cfg.string()) + " --out " +
                              quote(out.string()) + " > " + quote((root / (name + "_" + rep + ".log")).string()) +
                              " 2>&1";
      const int status = std::system(cmd.c_str());
      codes.push_back(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
      dirs.push_back(out);
    }
    int files = 0;
    bool same = codes[0] == codes[1];
    for (const auto & entry : fs::directory_iterator(dirs[0])) {
      const auto ext = entry.path().extension();
      if (ext != ".csv" && ext != ".json") {
        continue;
      }
      ++files;
      const fs::path other = dirs[1] / entry.path().filename();
      same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
    }
    o.check(same && files > 0, name + ": exit " + std::to_string(codes[0]) + ", " + std::to_string(files) +
                                   " CSV/JSON file(s) byte-identical across runs");
  }
  return o;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Acceptance checks"};
  Context ctx;
  std::string work = "acceptance_work", fixtures = "fixtures";
  app.add_option("--cli", ctx.cli, "Path to the gaitforge executable")->required();
  app.add_option("--work", work, "Scratch directory");
  app.add_option("--fixtures", fixtures, "Directory for recorded fixtures");
  CLI11_PARSE(app, argc, argv);
  ctx.work = work;
  ctx.fixtures = fixtures;
  fs::create_directories(ctx.work);

  const std::vector<std::pair<std::string, std::function<Outcome(Context &)>>> criteria = {
      {"model connections match independent oracles", oracles},
      {"cBVI agrees with line integrals, better in the optimized frame", stokes},
      {"displacement sweep has one sign change and two interior extrema", sweep},
      {"forward gaits from PMP match inner zero contours", forward},
      {"reverse Purcell gait needs joint bounds", reverse},
      {"perfect-fluid loop topology changes with eta", topology},
      {"PMP necessary conditions hold", conditions},
      {"geometric invariants", invariants},
      {"CLI outputs are deterministic", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i].second(ctx);
    } catch (const std::exception & e) {
      r.check(false, std::string("unexpected error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += r.pass ? 0 : 1;
    std::cout << "criterion " << i + 1 << ": " << (r.pass ? "PASS" : "FAIL") << " " << criteria[i].first << " ("
              << num(secs, 3) << " s)\n";
    for (const auto & n : r.notes) {
      std::cout << "    " << n << "\n";
    }
    std::cout.flush();
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion/criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
