#include "gaitforge/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "format.hpp"
#include "gaitforge/connection.hpp"
#include "gaitforge/parallel.hpp"
#include "gaitforge/svg.hpp"

namespace gaitforge {

using json = nlohmann::ordered_json;
using detail::fmt;

FrameChoice RunConfig::frame_or_config() const
{
  return frame ? *frame : model.frame;
}

FrameChoice RunConfig::frame_or_optimized() const
{
  if (frame) {
    return *frame;
  }
  if (model.entries.count("frame")) {
    return model.frame;
  }
  FrameChoice c;
  c.mode = FrameChoice::Mode::Optimized;
  return c;
}

namespace {

std::filesystem::path prepare(const RunConfig & config)
{
  std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw UsageError("cannot create output directory '" + config.out_dir + "'");
  }
  return dir;
}

std::ofstream open_out(const std::filesystem::path & p)
{
  std::ofstream out(p, std::ios::binary);
  if (!out) {
    throw Error("cannot write '" + p.string() + "'");
  }
  return out;
}

void write_json(const std::filesystem::path & p, const json & j)
{
  auto out = open_out(p);
  out << j.dump(2) << "\n";
}

json number(double v)
{
  return std::isfinite(v) ? json(v) : json(nullptr);
}

json weights(const std::array<double, 3> & w)
{
  return json::array({w[0], w[1], w[2]});
}

json frame_json(const BodyFrameSpec & f, const FrameChoice & choice)
{
  json j;
  j["choice"] = choice.mode == FrameChoice::Mode::Optimized ? "optimized" : choice.to_string();
  j["kind"] = f.kind == BodyFrameSpec::Kind::MiddleLink ? "middle-link" : "weighted";
  j["position_weights"] = weights(f.position_weights);
  j["orientation_weights"] = weights(f.orientation_weights);
  return j;
}

json header(const RunConfig & config, const std::string & command)
{
  json j;
  j["schema_version"] = schema_version;
  j["command"] = command;
  j["model"] = config.model.model_name;
  j["model_config"] = serialize_model_config(config.model);
  j["seed"] = config.seed;
  return j;
}

json window_json(const ShapeWindow & w)
{
  return json::array({w.phi1_min, w.phi1_max, w.phi2_min, w.phi2_max});
}

json pose_json(const BodyPose & p)
{
  return json{{"dx", number(p.x)}, {"dy", number(p.y)}, {"dtheta", number(p.theta)}};
}

std::string family_name(Gait::Family f)
{
  return f == Gait::Family::Circle ? "circle" : f == Gait::Family::Square ? "square" : "polyline";
}

std::vector<ShapePoint> closed_copy(std::vector<ShapePoint> pts)
{
  if (!pts.empty()) {
    pts.push_back(pts.front());
  }
  return pts;
}

/// Normalized cumulative arc length along a closed polyline (closing vertex included).
std::vector<double> arc_parameter(const std::vector<ShapePoint> & closed)
{
  std::vector<double> s(closed.size(), 0.0);
  for (std::size_t k = 1; k < closed.size(); ++k) {
    s[k] = s[k - 1] + std::hypot(closed[k].phi1 - closed[k - 1].phi1, closed[k].phi2 - closed[k - 1].phi2);
  }
  if (!s.empty() && s.back() > 0.0) {
    const double total = s.back();
    for (auto & v : s) {
      v /= total;
    }
  }
  return s;
}

double signed_area(const std::vector<ShapePoint> & pts)
{
  double a = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto & p = pts[k];
    const auto & q = pts[(k + 1) % pts.size()];
    a += p.phi1 * q.phi2 - q.phi1 * p.phi2;
  }
  return 0.5 * a;
}

struct FieldDump
{
  HeightField field;
  std::vector<CurvatureSample> samples;
};

FieldDump sample_dump(const FramedConnection & a, const ShapeWindow & window, int n, int component)
{
  if (n < 33) {
    throw UsageError("--grid must be at least 33");
  }
  if (component < 0 || component > 2) {
    throw UsageError("--component must be x, y or theta");
  }
  if (!(window.phi1_max > window.phi1_min) || !(window.phi2_max > window.phi2_min)) {
    throw UsageError("--window is empty");
  }
  FieldDump d;
  d.field.window = window;
  d.field.n = n;
  d.field.component = component;
  d.field.frame = a.frame();
  d.field.sampler = [a, component](ShapePoint p) { return curvature(a, p).DA(component); };
  d.samples.resize(static_cast<std::size_t>(n) * n);
  d.field.values.resize(d.samples.size());
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = j * n + i;
      d.samples[k] = curvature(a, {d.field.x(i), d.field.y(static_cast<int>(j))});
      d.field.values[k] = d.samples[k].DA(component);
    }
  });
  return d;
}

void write_field_csv(const std::filesystem::path & p, const FieldDump & d)
{
  auto out = open_out(p);
  out << "phi1,phi2,dAx,dAy,dAth,brx,bry,DAx,DAy,DAth\n";
  for (const auto & s : d.samples) {
    out << fmt(s.phi.phi1) << ',' << fmt(s.phi.phi2) << ',' << fmt(s.dA(0)) << ',' << fmt(s.dA(1)) << ','
        << fmt(s.dA(2)) << ',' << fmt(s.bracket(0)) << ',' << fmt(s.bracket(1)) << ',' << fmt(s.DA(0)) << ','
        << fmt(s.DA(1)) << ',' << fmt(s.DA(2)) << '\n';
  }
}

void write_contours_csv(const std::filesystem::path & p, const ContourSet & set)
{
  auto out = open_out(p);
  out << "contour,kind,index,phi1,phi2\n";
  for (std::size_t c = 0; c < set.contours.size(); ++c) {
    const auto & con = set.contours[c];
    for (std::size_t k = 0; k < con.points.size(); ++k) {
      out << c << ',' << to_string(con.kind) << ',' << k << ',' << fmt(con.points[k].phi1) << ','
          << fmt(con.points[k].phi2) << '\n';
    }
  }
}

void write_junctions_csv(const std::filesystem::path & p, const ContourSet & set)
{
  auto out = open_out(p);
  out << "phi1,phi2,branches,value,gap\n";
  for (const auto & j : set.junctions) {
    out << fmt(j.at.phi1) << ',' << fmt(j.at.phi2) << ',' << j.branches << ',' << fmt(j.value) << ',' << fmt(j.gap)
        << '\n';
  }
}

json contours_json(const ContourSet & set)
{
  json list = json::array();
  for (std::size_t c = 0; c < set.contours.size(); ++c) {
    const auto & con = set.contours[c];
    list.push_back({{"index", c},
                    {"kind", to_string(con.kind)},
                    {"closed", con.closed},
                    {"area", number(con.area)},
                    {"points", con.points.size()}});
  }
  json junctions = json::array();
  for (const auto & j : set.junctions) {
    junctions.push_back({{"phi1", j.at.phi1}, {"phi2", j.at.phi2}, {"branches", j.branches}, {"value", number(j.value)},
                         {"gap", number(j.gap)}});
  }
  return json{{"contours", list}, {"junctions", junctions}};
}

void draw_field(svg::Plot & plot, const HeightField & field, const ContourSet & set)
{
  plot.field(field);
  for (const auto & c : set.contours) {
    svg::Style s;
    s.dashed = true;
    s.width = 1.2;
    s.closed = c.closed;
    plot.polyline(c.points, s);
  }
  for (const auto & j : set.junctions) {
    plot.dot(j.at, svg::palette::green, 4.0);
  }
}

std::string component_name(int c)
{
  return c == 0 ? "x" : c == 1 ? "y" : "theta";
}

void write_gait_csv(const std::filesystem::path & p, const std::vector<ShapePoint> & gait)
{
  const auto closed = closed_copy(gait);
  const auto s = arc_parameter(closed);
  auto out = open_out(p);
  out << "s,phi1,phi2\n";
  for (std::size_t k = 0; k < closed.size(); ++k) {
    out << fmt(s[k]) << ',' << fmt(closed[k].phi1) << ',' << fmt(closed[k].phi2) << '\n';
  }
}

void write_costate_csv(const std::filesystem::path & p, const pmp::PmpSolution & sol)
{
  auto out = open_out(p);
  out << "t,arc,phi1,phi2,theta,lambda1,lambda2,lambda3,u1,u2,psi,hamiltonian,hu1,hu2,nu\n";
  for (const auto & q : sol.quarter) {
    out << fmt(q.t) << ',' << (q.arc == pmp::ArcKind::Singular ? "singular" : "bound") << ',' << fmt(q.state.phi1)
        << ',' << fmt(q.state.phi2) << ',' << fmt(q.state.theta) << ',' << fmt(q.state.lambda1) << ','
        << fmt(q.state.lambda2) << ',' << fmt(q.state.lambda3) << ',' << fmt(q.u(0)) << ',' << fmt(q.u(1)) << ','
        << fmt(q.psi) << ',' << fmt(q.hamiltonian) << ',' << fmt(q.hu(0)) << ',' << fmt(q.hu(1)) << ','
        << fmt(q.nu) << '\n';
  }
}

json solution_json(const pmp::PmpSolution & sol)
{
  json j;
  j["converged"] = sol.converged;
  j["branch"] = sol.branch;
  j["bound"] = sol.bound ? json(*sol.bound) : json(nullptr);
  j["phi1_0"] = number(sol.phi1_0);
  j["lambda3_0"] = number(sol.lambda3_0);
  j["tau1"] = sol.tau1 ? json(*sol.tau1) : json(nullptr);
  j["tau2"] = sol.tau2 ? json(*sol.tau2) : json(nullptr);
  j["bound_entries"] = sol.bound_entries;
  j["bound_exits"] = sol.bound_exits;
  j["t_final"] = number(sol.t_final);
  j["dx"] = number(sol.displacement.x);
  j["dy"] = number(sol.displacement.y);
  j["dtheta"] = number(sol.displacement.theta);
  const auto & d = sol.diagnostics;
  j["residuals"] = {{"lambda3_final", number(d.lambda3_final)},
                    {"lambda_gap_final", number(d.lambda_gap_final)},
                    {"max_hu", number(d.max_hu)},
                    {"max_psi", number(d.max_psi)},
                    {"hamiltonian_drift", number(d.hamiltonian_drift)},
                    {"hamiltonian_jump", number(d.hamiltonian_jump)},
                    {"closure_error", number(d.closure_error)}};
  j["residual_evaluations"] = sol.residual_evaluations;
  return j;
}

struct PmpOutcome
{
  std::optional<pmp::PmpSolution> solution;
  std::string error_type;
  std::string error;
  std::optional<ShapePoint> breakdown_at;
};

PmpOutcome run_pmp(const FramedConnection & a, const std::string & branch, std::optional<double> bound,
                   const pmp::ShootOptions & shoot)
{
  PmpOutcome out;
  try {
    out.solution = bound ? pmp::solve_bounded(a, *bound, shoot) : pmp::solve_unbounded(a, branch, shoot);
  } catch (const SingularArcBreakdown & e) {
    out.error_type = "SingularArcBreakdown";
    out.error = e.what();
    out.breakdown_at = ShapePoint{e.phi1(), e.phi2()};
  } catch (const NoBracket & e) {
    out.error_type = "NoBracket";
    out.error = e.what();
  } catch (const BoundNeverReached & e) {
    out.error_type = "BoundNeverReached";
    out.error = e.what();
  } catch (const NoRoot & e) {
    out.error_type = "NoRoot";
    out.error = e.what();
  } catch (const IntegrationFailure & e) {
    out.error_type = "IntegrationFailure";
    out.error = e.what();
  }
  return out;
}

json outcome_json(const PmpOutcome & o)
{
  if (o.solution) {
    return solution_json(*o.solution);
  }
  json j;
  j["converged"] = false;
  j["error_type"] = o.error_type;
  j["error"] = o.error;
  if (o.breakdown_at) {
    j["breakdown_at"] = json::array({o.breakdown_at->phi1, o.breakdown_at->phi2});
  }
  return j;
}

}  // namespace

std::vector<ShapePoint> read_shape_csv(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot read overlay '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw UsageError("overlay '" + path + "' is empty");
  }
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      names.push_back(cell);
    }
  }
  const auto c1 = std::find(names.begin(), names.end(), "phi1") - names.begin();
  const auto c2 = std::find(names.begin(), names.end(), "phi2") - names.begin();
  if (c1 == static_cast<long>(names.size()) || c2 == static_cast<long>(names.size())) {
    throw UsageError("overlay '" + path + "' needs phi1 and phi2 columns");
  }
  std::vector<ShapePoint> pts;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    if (static_cast<long>(cells.size()) <= std::max(c1, c2)) {
      throw UsageError("overlay '" + path + "': short row");
    }
    try {
      pts.push_back({std::stod(cells[c1]), std::stod(cells[c2])});
    } catch (const std::exception &) {
      throw UsageError("overlay '" + path + "': bad number");
    }
  }
  return pts;
}

int cmd_sweep(const RunConfig & config, const SweepOptions & options, std::ostream & log)
{
  if (!options.circle && !options.square) {
    throw UsageError("sweep: no gait family selected");
  }
  if (!(options.eps_step > 0.0) || !(options.eps_min > 0.0)) {
    throw UsageError("sweep: --eps-min and --eps-step must be positive");
  }
  const auto grid = make_grid(options.eps_min, options.eps_max, options.eps_step);
  if (grid.empty()) {
    throw UsageError("sweep: empty amplitude grid");
  }
  const auto dir = prepare(config);
  const FrameChoice choice = config.frame_or_config();
  const BodyFrameSpec frame = resolve_frame(config.model.model, choice, ShapeWindow::square(options.eps_max));
  const FramedConnection a(config.model.model, frame);

  json report = header(config, "sweep");
  report["frame"] = frame_json(frame, choice);
  report["eps"] = {{"min", options.eps_min}, {"max", options.eps_max}, {"step", options.eps_step}};
  report["families"] = json::object();

  double lo = 0.0, hi = 0.0;
  std::vector<SweepResult> results;
  for (Gait::Family fam : {Gait::Family::Circle, Gait::Family::Square}) {
    if ((fam == Gait::Family::Circle && !options.circle) || (fam == Gait::Family::Square && !options.square)) {
      continue;
    }
    SweepResult r = displacement_sweep(a, fam, grid);
    const std::string name = family_name(fam);
    auto out = open_out(dir / ("sweep_" + name + ".csv"));
    out << "eps,dx,dy,dtheta\n";
    for (const auto & row : r.rows) {
      out << fmt(row.eps) << ',' << fmt(row.dx) << ',' << fmt(row.dy) << ',' << fmt(row.dtheta) << '\n';
      lo = std::min(lo, row.dx);
      hi = std::max(hi, row.dx);
    }
    auto ext = [](const SweepExtremum & e) {
      return json{{"eps", e.eps}, {"dx", e.dx}, {"index", e.index}, {"interior", e.interior}};
    };
    report["families"][name] = {{"argmax", ext(r.argmax)}, {"argmin", ext(r.argmin)}, {"sign_changes", r.sign_changes}};
    log << name << ": max dx " << fmt(r.argmax.dx, 6) << " at eps " << fmt(r.argmax.eps, 6) << ", min dx "
        << fmt(r.argmin.dx, 6) << " at eps " << fmt(r.argmin.eps, 6) << ", " << r.sign_changes.size()
        << " sign change(s)\n";
    results.push_back(std::move(r));
  }

  const double pad = 0.08 * std::max(hi - lo, 1e-12);
  svg::Plot plot(0.0, grid.back(), lo - pad, hi + pad, "Net x displacement per cycle vs amplitude");
  plot.set_labels("amplitude eps (rad)", "dx per cycle");
  plot.polyline({{0.0, 0.0}, {grid.back(), 0.0}}, {svg::palette::gray, 0.8, false, false});
  for (const auto & r : results) {
    std::vector<ShapePoint> pts;
    for (const auto & row : r.rows) {
      pts.push_back({row.eps, row.dx});
    }
    const bool circle = r.family == Gait::Family::Circle;
    const svg::Style style{circle ? svg::palette::blue : svg::palette::green, 1.8, !circle, false};
    plot.polyline(pts, style);
    plot.legend(circle ? "circle gait" : "square gait", style);
    plot.cross({r.argmax.eps, r.argmax.dx}, svg::palette::purple, "max " + fmt(r.argmax.dx, 3));
    plot.cross({r.argmin.eps, r.argmin.dx}, svg::palette::red, "min " + fmt(r.argmin.dx, 3));
  }
  plot.save((dir / "fig2.svg").string());
  write_json(dir / "sweep.json", report);
  return exit_code::ok;
}

int cmd_heightfield(const RunConfig & config, const HeightfieldOptions & options, std::ostream & log)
{
  const auto dir = prepare(config);
  std::vector<std::vector<ShapePoint>> overlays;
  for (const auto & path : options.overlays) {
    overlays.push_back(read_shape_csv(path));
  }
  const FrameChoice choice = config.frame_or_optimized();
  const BodyFrameSpec frame = resolve_frame(config.model.model, choice, options.window);
  const FramedConnection a(config.model.model, frame);
  const FieldDump dump = sample_dump(a, options.window, options.grid, options.component);
  const ContourSet set = extract_zero_contours(dump.field, options.junctions);

  write_field_csv(dir / "heightfield.csv", dump);
  write_contours_csv(dir / "contours.csv", set);
  write_junctions_csv(dir / "junctions.csv", set);

  json report = header(config, "heightfield");
  report["frame"] = frame_json(frame, choice);
  report["window"] = window_json(options.window);
  report["grid"] = options.grid;
  report["component"] = component_name(options.component);
  report["field_min"] = dump.field.min();
  report["field_max"] = dump.field.max();
  report["empty"] = set.empty;
  const json cj = contours_json(set);
  report["contours"] = cj["contours"];
  report["junctions"] = cj["junctions"];
  write_json(dir / "heightfield.json", report);

  const auto & w = options.window;
  svg::Plot plot(w.phi1_min, w.phi1_max, w.phi2_min, w.phi2_max,
                 "Height function DA_" + component_name(options.component) + " (" + config.model.model_name + ")", 600,
                 520);
  draw_field(plot, dump.field, set);
  const svg::Color colors[] = {svg::palette::purple, svg::palette::red, svg::palette::blue};
  for (std::size_t k = 0; k < overlays.size(); ++k) {
    svg::Style s{colors[k % 3], 2.2, false, false};
    plot.polyline(overlays[k], s);
    plot.legend(std::filesystem::path(options.overlays[k]).filename().string(), s);
  }
  plot.save((dir / "heightfield.svg").string());

  std::size_t closed = 0;
  for (const auto & c : set.contours) {
    closed += c.closed;
  }
  log << "height field " << options.grid << "x" << options.grid << ": " << set.contours.size() << " zero contour(s), "
      << closed << " closed, " << set.junctions.size() << " junction(s)\n";
  return exit_code::ok;
}

int cmd_pmp(const RunConfig & config, const PmpOptions & options, std::ostream & log)
{
  if (options.branch != "forward" && options.branch != "reverse") {
    throw UsageError("--branch must be forward or reverse");
  }
  if (options.bound && !(*options.bound > 0.0)) {
    throw UsageError("--bound must be positive");
  }
  if (options.bound && options.branch == "forward") {
    throw UsageError("joint-angle bounds apply to the reverse branch");
  }
  const auto dir = prepare(config);
  const FrameChoice choice = config.frame_or_config();
  const BodyFrameSpec frame = resolve_frame(config.model.model, choice, options.window);
  const FramedConnection a(config.model.model, frame);

  const PmpOutcome o = run_pmp(a, options.branch, options.bound, options.shoot);
  json report = header(config, "pmp");
  report["frame"] = frame_json(frame, choice);
  report["request"] = {{"branch", options.branch}, {"bound", options.bound ? json(*options.bound) : json(nullptr)}};
  const json result = outcome_json(o);
  for (auto it = result.begin(); it != result.end(); ++it) {
    report[it.key()] = it.value();
  }
  write_json(dir / "pmp.json", report);

  if (o.solution) {
    write_gait_csv(dir / "gait.csv", o.solution->full_gait);
    write_costate_csv(dir / "costates.csv", *o.solution);
  }

  std::optional<FieldDump> dump;
  std::optional<ContourSet> set;
  if (options.overlay_heightfield) {
    dump = sample_dump(a, options.window, options.grid, 0);
    set = extract_zero_contours(dump->field);
  }
  if (o.solution || dump) {
    const auto & w = options.window;
    svg::Plot plot(w.phi1_min, w.phi1_max, w.phi2_min, w.phi2_max,
                   "PMP " + options.branch + " gait (" + config.model.model_name + ")", 600, 520);
    if (dump) {
      draw_field(plot, dump->field, *set);
    }
    if (options.bound) {
      const double b = *options.bound;
      const svg::Style box{svg::palette::gray, 1.0, true, true};
      plot.polyline({{-b, -b}, {b, -b}, {b, b}, {-b, b}}, box);
    }
    if (o.solution) {
      const svg::Style s{options.bound ? svg::palette::red : svg::palette::purple, 2.2, false, true};
      plot.polyline(o.solution->full_gait, s);
      plot.legend("dx = " + fmt(o.solution->displacement.x, 4), s);
    }
    plot.save((dir / "pmp.svg").string());
  }

  if (!o.solution) {
    log << "pmp " << options.branch << ": no solution (" << o.error_type << ": " << o.error << ")\n";
    return exit_code::nonconvergence;
  }
  const auto & s = *o.solution;
  log << "pmp " << options.branch << (options.bound ? " bound " + fmt(*options.bound) : std::string()) << ": phi1(0) "
      << fmt(s.phi1_0, 8) << ", dx " << fmt(s.displacement.x, 6) << ", lambda3(tf) "
      << fmt(s.diagnostics.lambda3_final, 3) << (s.converged ? "" : " (not converged)") << "\n";
  return s.converged ? exit_code::ok : exit_code::nonconvergence;
}

int cmd_compare(const RunConfig & config, const CompareOptions & options, std::ostream & log)
{
  for (double b : options.bounds) {
    if (!(b > 0.0)) {
      throw UsageError("--bound must be positive");
    }
  }
  const auto dir = prepare(config);
  const FrameChoice choice = config.frame_or_optimized();
  const BodyFrameSpec frame = resolve_frame(config.model.model, choice, options.window);
  const FramedConnection a(config.model.model, frame);
  const FieldDump dump = sample_dump(a, options.window, options.grid, 0);
  const ContourSet set = extract_zero_contours(dump.field, options.junctions);

  struct Case
  {
    std::string name;
    std::string branch;
    std::optional<double> bound;
    PmpOutcome outcome;
  };
  std::vector<Case> cases = {{"forward", "forward", std::nullopt, {}}, {"reverse", "reverse", std::nullopt, {}}};
  for (double b : options.bounds) {
    cases.push_back({"reverse_bound_" + fmt(b), "reverse", b, {}});
  }
  for (auto & c : cases) {
    c.outcome = run_pmp(a, c.branch, c.bound, options.shoot);
  }

  std::size_t junction_bearing = 0;
  for (const auto & c : set.contours) {
    junction_bearing += c.kind == ContourKind::JunctionBearing;
  }

  json report = header(config, "compare");
  report["frame"] = frame_json(frame, choice);
  report["window"] = window_json(options.window);
  report["grid"] = options.grid;
  report["match_tolerance"] = options.match_tolerance;
  const json cj = contours_json(set);
  report["contours"] = cj["contours"];
  report["junctions"] = cj["junctions"];
  report["cases"] = json::array();

  const auto & w = options.window;
  svg::Plot plot(w.phi1_min, w.phi1_max, w.phi2_min, w.phi2_max,
                 "PMP gaits over zero contours (" + config.model.model_name + ")", 600, 520);
  draw_field(plot, dump.field, set);
  const svg::Color colors[] = {svg::palette::purple, svg::palette::red, svg::palette::blue};

  std::size_t k = 0;
  for (const auto & c : cases) {
    json entry;
    entry["name"] = c.name;
    entry["pmp"] = outcome_json(c.outcome);
    if (c.outcome.solution && c.outcome.solution->converged) {
      const auto & sol = *c.outcome.solution;
      const svg::Style style{colors[k % 3], 2.2, false, true};
      plot.polyline(sol.full_gait, style);
      plot.legend(c.name, style);
      double best = std::numeric_limits<double>::infinity();
      std::optional<std::size_t> best_index;
      for (std::size_t i = 0; i < set.contours.size(); ++i) {
        if (!set.contours[i].closed) {
          continue;
        }
        const double d = hausdorff_distance(sol.full_gait, set.contours[i].points);
        if (d < best) {
          best = d;
          best_index = i;
        }
      }
      json match;
      match["matched"] = best_index && best < options.match_tolerance;
      match["contour"] = best_index ? json(*best_index) : json(nullptr);
      match["hausdorff"] = number(best);
      if (best_index) {
        const auto & con = set.contours[*best_index];
        match["contour_kind"] = to_string(con.kind);
        const bool clockwise = signed_area(sol.full_gait) < 0.0;
        try {
          const auto rep = contour_as_gait(a, con, clockwise);
          match["contour_displacement"] = pose_json(rep.line_integral);
          match["contour_cbvi"] = pose_json(rep.cbvi);
        } catch (const JunctionBearing & e) {
          match["contour_displacement"] = nullptr;
          match["contour_rejected"] = e.what();
        }
      }
      match["pmp_displacement"] = pose_json(sol.displacement);
      entry["match"] = match;
      log << c.name << ": dx " << fmt(sol.displacement.x, 6) << ", Hausdorff to nearest closed contour "
          << fmt(best, 4) << (best < options.match_tolerance ? " (matched)" : " (no match)") << "\n";
    } else {
      double nearest = std::numeric_limits<double>::infinity();
      if (c.outcome.breakdown_at) {
        for (const auto & j : set.junctions) {
          nearest = std::min(nearest, std::hypot(j.at.phi1 - c.outcome.breakdown_at->phi1,
                                                 j.at.phi2 - c.outcome.breakdown_at->phi2));
        }
      }
      entry["junction_flags"] = {{"pmp_failed", true},
                                 {"junction_bearing_contours", junction_bearing},
                                 {"junctions", set.junctions.size()},
                                 {"explained_by_junction", junction_bearing > 0},
                                 {"breakdown_to_nearest_junction", number(nearest)}};
      log << c.name << ": PMP failed (" << (c.outcome.solution ? std::string("not converged") : c.outcome.error_type)
          << "), " << junction_bearing << " junction-bearing contour(s)\n";
    }
    report["cases"].push_back(entry);
    ++k;
  }
  write_json(dir / "compare.json", report);
  plot.save((dir / "compare.svg").string());
  return exit_code::ok;
}

}  // namespace gaitforge
