#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaitforge/commands.hpp"

using namespace gaitforge;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig in_dir(const std::string & name)
{
  RunConfig rc;
  const fs::path dir = fs::temp_directory_path() / "gaitforge_unit" / name;
  fs::remove_all(dir);
  rc.out_dir = dir.string();
  return rc;
}

}  // namespace

TEST_SUITE("commands")
{
  TEST_CASE("sweep writes tables and a summary")
  {
    const RunConfig rc = in_dir("sweep");
    SweepOptions o;
    o.eps_min = 0.2;
    o.eps_step = 0.4;
    std::ostringstream log;
    CHECK(cmd_sweep(rc, o, log) == exit_code::ok);
    const fs::path dir = rc.out_dir;
    for (const char * f : {"sweep_circle.csv", "sweep_square.csv", "sweep.json", "fig2.svg"}) {
      CHECK(fs::exists(dir / f));
    }
    CHECK(slurp(dir / "sweep_circle.csv").rfind("eps,dx,dy,dtheta\n", 0) == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "sweep.json"));
    CHECK(j["schema_version"] == schema_version);
  }

  TEST_CASE("sweep output is byte-for-byte repeatable")
  {
    SweepOptions o;
    o.eps_min = 0.3;
    o.eps_step = 0.5;
    o.square = false;
    std::ostringstream log;
    const RunConfig a = in_dir("rep_a"), b = in_dir("rep_b");
    cmd_sweep(a, o, log);
    cmd_sweep(b, o, log);
    CHECK(slurp(fs::path(a.out_dir) / "sweep_circle.csv") == slurp(fs::path(b.out_dir) / "sweep_circle.csv"));
    CHECK(slurp(fs::path(a.out_dir) / "sweep.json") == slurp(fs::path(b.out_dir) / "sweep.json"));
  }

  TEST_CASE("an empty amplitude grid is a usage error")
  {
    SweepOptions o;
    o.eps_min = 2.0;
    o.eps_max = 1.0;
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_sweep(in_dir("empty"), o, log), UsageError);
  }

  TEST_CASE("heightfield writes the field, contours and junctions")
  {
    RunConfig rc = in_dir("hf");
    rc.frame = FrameChoice::parse("middle-link");
    HeightfieldOptions o;
    o.grid = 65;
    std::ostringstream log;
    CHECK(cmd_heightfield(rc, o, log) == exit_code::ok);
    const fs::path dir = rc.out_dir;
    CHECK(slurp(dir / "heightfield.csv").rfind("phi1,phi2,dAx,dAy,dAth,brx,bry,DAx,DAy,DAth\n", 0) == 0);
    for (const char * f : {"contours.csv", "junctions.csv", "heightfield.json", "heightfield.svg"}) {
      CHECK(fs::exists(dir / f));
    }
  }

  TEST_CASE("pmp reports nonconvergence with exit code 1")
  {
    const RunConfig rc = in_dir("pmp_fail");
    PmpOptions o;
    o.shoot.scan_max = 0.2;
    std::ostringstream log;
    CHECK(cmd_pmp(rc, o, log) == exit_code::nonconvergence);
    const auto j = nlohmann::json::parse(slurp(fs::path(rc.out_dir) / "pmp.json"));
    CHECK(j["converged"] == false);
    CHECK(j["error_type"].get<std::string>().size() > 0);
  }

  TEST_CASE("pmp argument checks")
  {
    PmpOptions o;
    o.bound = 3.2;
    std::ostringstream log;
    CHECK_THROWS_AS(cmd_pmp(in_dir("pmp_bad"), o, log), UsageError);
    o.branch = "sideways";
    CHECK_THROWS_AS(cmd_pmp(in_dir("pmp_bad"), o, log), UsageError);
  }

  TEST_CASE("shape csv reader")
  {
    const fs::path p = fs::temp_directory_path() / "gaitforge_unit" / "shape.csv";
    fs::create_directories(p.parent_path());
    std::ofstream(p) << "s,phi1,phi2\n0,0.1,0.2\n0.5,0.3,-0.4\n";
    const auto pts = read_shape_csv(p.string());
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].phi2 == -0.4);
  }
}
