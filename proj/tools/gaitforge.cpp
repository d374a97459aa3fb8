#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitforge/commands.hpp"

using namespace gaitforge;

namespace {

ShapeWindow parse_window(const std::string & text)
{
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception &) {
      throw UsageError("--window: bad number '" + item + "'");
    }
  }
  if (v.size() == 1 && v[0] > 0.0) {
    return ShapeWindow::square(v[0]);
  }
  if (v.size() == 4 && v[1] > v[0] && v[3] > v[2]) {
    return {v[0], v[1], v[2], v[3]};
  }
  throw UsageError("--window expects HALF or PHI1MIN,PHI1MAX,PHI2MIN,PHI2MAX");
}

int parse_component(const std::string & c)
{
  if (c == "x") {
    return 0;
  }
  if (c == "y") {
    return 1;
  }
  if (c == "theta") {
    return 2;
  }
  throw UsageError("--component must be x, y or theta");
}

std::optional<double> parse_bound(const std::string & text)
{
  if (text.empty() || text == "none") {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const double b = std::stod(text, &used);
    if (used != text.size()) {
      throw std::invalid_argument(text);
    }
    return b;
  } catch (const std::exception &) {
    throw UsageError("--bound expects radians or 'none'");
  }
}

struct Common
{
  std::string model_config;
  std::string out = "out";
  std::string frame;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App * app)
  {
    app->add_option("--model-config", model_config, "Swimmer parameter file (key = value lines)");
    app->add_option("--out", out, "Output directory")->capture_default_str();
    app->add_option("--frame", frame, "middle-link | optimized | weighted:w0,w1,w2;v0,v1,v2");
    app->add_option("--seed", seed, "Seed recorded in reports (overrides the config)");
  }

  RunConfig resolve() const
  {
    RunConfig rc;
    if (!model_config.empty()) {
      rc.model = load_model_config(model_config);
    }
    if (!frame.empty()) {
      rc.frame = FrameChoice::parse(frame);
    }
    rc.out_dir = out;
    rc.seed = seed ? *seed : rc.model.seed;
    rc.model.seed = rc.seed;
    return rc;
  }
};

ShapeWindow default_window(const RunConfig & rc)
{
  return ShapeWindow::square(rc.model.model_name == "perfect_fluid" ? 6.0 : 3.2);
}

int default_grid(const ShapeWindow & w)
{
  return std::max(w.phi1_max - w.phi1_min, w.phi2_max - w.phi2_min) > 6.4 + 1e-9 ? 601 : 401;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Displacement-maximizing gaits for three-link swimmers"};
  app.require_subcommand(1);

  // sweep
  Common sweep_common;
  std::string family = "both";
  SweepOptions sweep;
  auto * sweep_cmd = app.add_subcommand("sweep", "Net displacement of circle and square gaits over amplitude");
  sweep_common.attach(sweep_cmd);
  sweep_cmd->add_option("--family", family, "circle | square | both")->capture_default_str();
  sweep_cmd->add_option("--eps-min", sweep.eps_min)->capture_default_str();
  sweep_cmd->add_option("--eps-max", sweep.eps_max)->capture_default_str();
  sweep_cmd->add_option("--eps-step", sweep.eps_step)->capture_default_str();

  // heightfield
  Common hf_common;
  std::string hf_window, hf_component = "x";
  int hf_grid = 0;
  HeightfieldOptions hf;
  auto * hf_cmd = app.add_subcommand("heightfield", "Total-curvature height function with zero contours");
  hf_common.attach(hf_cmd);
  hf_cmd->add_option("--window", hf_window, "HALF or PHI1MIN,PHI1MAX,PHI2MIN,PHI2MAX");
  hf_cmd->add_option("--grid", hf_grid, "Samples per side (default 401, or 601 on windows wider than 6.4)");
  hf_cmd->add_option("--component", hf_component, "x | y | theta")->capture_default_str();
  hf_cmd->add_option("--overlay", hf.overlays, "CSV gait files (phi1, phi2 columns) to draw");
  hf_cmd->add_option("--junction-level", hf.junctions.level_fraction, "Saddle level tolerance (fraction of range)")
      ->capture_default_str();
  hf_cmd->add_option("--junction-gradient", hf.junctions.gradient_fraction,
                     "Saddle gradient tolerance (fraction of range / window size)")
      ->capture_default_str();
  hf_cmd->add_option("--junction-gap", hf.junctions.max_gap, "Largest branch gap at a junction (rad)")
      ->capture_default_str();

  // pmp
  Common pmp_common;
  std::string pmp_bound = "none", pmp_window;
  int pmp_grid = 0;
  PmpOptions pmp_opts;
  auto * pmp_cmd = app.add_subcommand("pmp", "Optimal gait by Pontryagin shooting on the quarter gait");
  pmp_common.attach(pmp_cmd);
  pmp_cmd->add_option("--bound", pmp_bound, "Joint-angle bound in radians, or none")->capture_default_str();
  pmp_cmd->add_option("--branch", pmp_opts.branch, "forward | reverse")->capture_default_str();
  pmp_cmd->add_flag("--overlay-heightfield", pmp_opts.overlay_heightfield, "Draw the gait over the height function");
  pmp_cmd->add_option("--window", pmp_window, "Window for the overlay and for frame optimization");
  pmp_cmd->add_option("--grid", pmp_grid, "Overlay grid size");
  pmp_cmd->add_option("--scan-step", pmp_opts.shoot.scan_step, "Diagonal scan step for brackets")
      ->capture_default_str();
  pmp_cmd->add_option("--scan-max", pmp_opts.shoot.scan_max, "Largest diagonal starting angle")
      ->capture_default_str();

  // compare
  Common cmp_common;
  std::string cmp_window;
  std::vector<double> cmp_bounds;
  int cmp_grid = 0;
  CompareOptions cmp;
  auto * cmp_cmd = app.add_subcommand("compare", "Match PMP gaits against zero contours of the height function");
  cmp_common.attach(cmp_cmd);
  cmp_cmd->add_option("--window", cmp_window, "HALF or PHI1MIN,PHI1MAX,PHI2MIN,PHI2MAX");
  cmp_cmd->add_option("--grid", cmp_grid, "Samples per side");
  cmp_cmd->add_option("--bound", cmp_bounds, "Bounded reverse runs to add (radians)");
  cmp_cmd->add_option("--match-tol", cmp.match_tolerance, "Hausdorff match tolerance (rad)")->capture_default_str();
  cmp_cmd->add_option("--scan-step", cmp.shoot.scan_step, "Diagonal scan step for brackets")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return exit_code::usage;
  }

  try {
    if (sweep_cmd->parsed()) {
      if (family != "circle" && family != "square" && family != "both") {
        throw UsageError("--family must be circle, square or both");
      }
      sweep.circle = family != "square";
      sweep.square = family != "circle";
      return cmd_sweep(sweep_common.resolve(), sweep, std::cout);
    }
    if (hf_cmd->parsed()) {
      const RunConfig rc = hf_common.resolve();
      hf.window = hf_window.empty() ? default_window(rc) : parse_window(hf_window);
      hf.grid = hf_grid > 0 ? hf_grid : default_grid(hf.window);
      hf.component = parse_component(hf_component);
      return cmd_heightfield(rc, hf, std::cout);
    }
    if (pmp_cmd->parsed()) {
      const RunConfig rc = pmp_common.resolve();
      pmp_opts.bound = parse_bound(pmp_bound);
      pmp_opts.window = pmp_window.empty() ? default_window(rc) : parse_window(pmp_window);
      pmp_opts.grid = pmp_grid > 0 ? pmp_grid : default_grid(pmp_opts.window);
      return cmd_pmp(rc, pmp_opts, std::cout);
    }
    if (cmp_cmd->parsed()) {
      const RunConfig rc = cmp_common.resolve();
      cmp.window = cmp_window.empty() ? default_window(rc) : parse_window(cmp_window);
      cmp.grid = cmp_grid > 0 ? cmp_grid : default_grid(cmp.window);
      cmp.bounds = cmp_bounds;
      return cmd_compare(rc, cmp, std::cout);
    }
  } catch (const UsageError & e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const ConfigError & e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return exit_code::usage;
}
