#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gaitforge/config.hpp"
#include "gaitforge/errors.hpp"
#include "gaitforge/geometry.hpp"
#include "gaitforge/pmp.hpp"
#include "gaitforge/simulate.hpp"

namespace gaitforge {

/// Bad command-line input; the CLI exits with code 2.
class UsageError : public Error
{
public:
  using Error::Error;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int nonconvergence = 1;
inline constexpr int usage = 2;
}  // namespace exit_code

/// Version of every JSON report layout written by the commands.
inline constexpr int schema_version = 1;

struct RunConfig
{
  ModelConfig model;
  /// --frame on the command line; wins over the config file
  std::optional<FrameChoice> frame;
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  /// Frame for commands that default to the middle link.
  FrameChoice frame_or_config() const;
  /// Frame for commands that default to the optimized frame unless one is given explicitly.
  FrameChoice frame_or_optimized() const;
};

struct SweepOptions
{
  bool circle = true;
  bool square = true;
  double eps_min = 0.05;
  double eps_max = 3.14159265358979323846;
  double eps_step = 0.05;
};

struct HeightfieldOptions
{
  ShapeWindow window = ShapeWindow::square(3.2);
  int grid = 401;
  int component = 0;
  JunctionOptions junctions;
  /// CSV files with phi1, phi2 columns drawn over the field
  std::vector<std::string> overlays;
};

struct PmpOptions
{
  std::optional<double> bound;
  std::string branch = "forward";
  bool overlay_heightfield = false;
  ShapeWindow window = ShapeWindow::square(3.2);
  int grid = 401;
  pmp::ShootOptions shoot;
};

struct CompareOptions
{
  ShapeWindow window = ShapeWindow::square(3.2);
  int grid = 401;
  /// bounded reverse runs in addition to the two unbounded branches
  std::vector<double> bounds;
  /// PMP gait counts as matched when its Hausdorff distance to a contour is below this (rad)
  double match_tolerance = 0.05;
  JunctionOptions junctions;
  pmp::ShootOptions shoot;
};

/// Each command writes into config.out_dir, prints a short summary to `log`, and returns an exit
/// code. Errors other than documented nonconvergence propagate as exceptions.
int cmd_sweep(const RunConfig & config, const SweepOptions & options, std::ostream & log);
int cmd_heightfield(const RunConfig & config, const HeightfieldOptions & options, std::ostream & log);
int cmd_pmp(const RunConfig & config, const PmpOptions & options, std::ostream & log);
int cmd_compare(const RunConfig & config, const CompareOptions & options, std::ostream & log);

/// Reads phi1/phi2 columns from a CSV file with a header row.
std::vector<ShapePoint> read_shape_csv(const std::string & path);

}  // namespace gaitforge
