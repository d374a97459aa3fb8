#include <doctest.h>

#include <sstream>

#include "gaitforge/config.hpp"
#include "gaitforge/errors.hpp"

using namespace gaitforge;

namespace {

ModelConfig parse(const std::string & text)
{
  std::istringstream in(text);
  return parse_model_config(in, "test");
}

}  // namespace

TEST_SUITE("config")
{
  TEST_CASE("defaults describe the equal-link purcell swimmer")
  {
    const ModelConfig c = parse("");
    CHECK(c.model_name == "purcell");
    CHECK(c.model.kind() == "purcell");
    CHECK(c.frame.mode == FrameChoice::Mode::Fixed);
    CHECK(c.seed == 1);
  }

  TEST_CASE("purcell keys with comments and quotes")
  {
    const ModelConfig c = parse("# drag test\nmodel = \"purcell\"  # trailing\nct = 0.5\ncn = 1.5\n"
                                "lengths = [0.4, 0.3, 0.3]\nseed = 17\n");
    const auto & p = std::get<PurcellParams>(c.model.params());
    CHECK(p.ct == 0.5);
    CHECK(p.cn == 1.5);
    CHECK(p.l0 == 0.4);
    CHECK(c.seed == 17);
  }

  TEST_CASE("perfect fluid by eta")
  {
    const ModelConfig c = parse("model = perfect_fluid\neta = 0.5\nalpha = 0.25\nrotational_added_mass = linear\n");
    const auto & p = std::get<PerfectFluidParams>(c.model.params());
    CHECK(p.lengths[0] == doctest::Approx(0.2));
    CHECK(p.lengths[1] == doctest::Approx(0.4));
    CHECK(p.alpha == 0.25);
    CHECK(p.rotational == RotationalAddedMass::Linear);
  }

  TEST_CASE("bad input is a config error")
  {
    CHECK_THROWS_AS(parse("model = purcell\neta = 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("model = jellyfish\n"), ConfigError);
    CHECK_THROWS_AS(parse("ct = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse("lengths = [1, 2]\n"), ConfigError);
    CHECK_THROWS_AS(parse("ct = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[section]\nct = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("model = perfect_fluid\neta = 0.4\nlengths = [1, 1, 1]\n"), ConfigError);
    CHECK_THROWS_AS(parse("frame = weighted\nposition_weights = [1, 0, 0]\n"), ConfigError);
    CHECK_THROWS_AS(parse("seed = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(load_model_config("/nonexistent/model.cfg"), ConfigError);
  }

  TEST_CASE("frame strings")
  {
    CHECK(FrameChoice::parse("middle-link").spec.kind == BodyFrameSpec::Kind::MiddleLink);
    CHECK(FrameChoice::parse("optimized").mode == FrameChoice::Mode::Optimized);
    const FrameChoice w = FrameChoice::parse("weighted:0.5,0.25,0.25;0.2,0.4,0.4");
    CHECK(w.spec.kind == BodyFrameSpec::Kind::Weighted);
    CHECK(w.spec.orientation_weights[1] == 0.4);
    CHECK(FrameChoice::parse(w.to_string()).to_string() == w.to_string());
    CHECK_THROWS_AS(FrameChoice::parse("weighted:1,0,0"), ConfigError);
    CHECK_THROWS_AS(FrameChoice::parse("weighted:0.6,0.6,0;1,0,0"), ConfigError);
    CHECK_THROWS_AS(FrameChoice::parse("tail"), ConfigError);
  }

  TEST_CASE("serialized configs parse back to the same model")
  {
    for (const char * text : {"model = purcell\nct = 0.7\ncn = 2.1\nframe = optimized\nseed = 9\n",
                              "model = perfect_fluid\neta = 0.45\nalpha = 0.3\nrho = 2\n"
                              "frame = weighted\nposition_weights = [0.5, 0.25, 0.25]\n"
                              "orientation_weights = [0.6, 0.2, 0.2]\n"}) {
      const ModelConfig a = parse(text);
      const ModelConfig b = parse(serialize_model_config(a));
      CHECK(serialize_model_config(b) == serialize_model_config(a));
      CHECK(b.frame.to_string() == a.frame.to_string());
      CHECK(b.seed == a.seed);
      const ShapePoint phi{0.4, 1.3};
      CHECK((a.model.connection(phi) - b.model.connection(phi)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}
