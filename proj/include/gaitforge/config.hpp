#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaitforge/connection.hpp"
#include "gaitforge/models.hpp"

namespace gaitforge {

/// Frame selection as written in a config file or on the command line.
struct FrameChoice
{
  enum class Mode
  {
    Fixed,
    Optimized,
  };

  Mode mode = Mode::Fixed;
  BodyFrameSpec spec = BodyFrameSpec::middle_link();

  /// "middle-link", "optimized", or "weighted:w0,w1,w2;v0,v1,v2".
  static FrameChoice parse(const std::string & text);
  std::string to_string() const;
};

/// Parsed model config: a flat list of `key = value` lines, `#` comments, quoted strings and
/// bracketed number lists. See docs/config.md.
struct ModelConfig
{
  std::string source = "<defaults>";
  std::string model_name = "purcell";
  SwimmerModel model = SwimmerModel::purcell();
  FrameChoice frame;
  std::uint64_t seed = 1;
  /// every key as read, with comments and quotes removed
  std::map<std::string, std::string> entries;
};

/// Throws ConfigError on unknown keys, malformed values, or invalid parameters.
ModelConfig parse_model_config(std::istream & in, const std::string & source = "<stream>");
ModelConfig load_model_config(const std::string & path);

/// Key-value text that parses back to the same model and frame.
std::string serialize_model_config(const ModelConfig & config);

/// Resolves an optimized frame choice over a window; fixed choices are returned as is.
BodyFrameSpec resolve_frame(const SwimmerModel & model, const FrameChoice & choice, const ShapeWindow & window);

}  // namespace gaitforge
