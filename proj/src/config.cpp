#include "gaitforge/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "format.hpp"
#include "gaitforge/errors.hpp"

namespace gaitforge {

namespace {

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Drops a trailing `# comment` outside quotes and surrounding quotes.
std::string clean_value(const std::string & raw)
{
  bool quoted = false;
  std::size_t cut = raw.size();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '"') {
      quoted = !quoted;
    } else if (raw[i] == '#' && !quoted) {
      cut = i;
      break;
    }
  }
  std::string v = trim(raw.substr(0, cut));
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    v = v.substr(1, v.size() - 2);
  }
  return v;
}

double parse_number(const std::string & key, const std::string & text)
{
  std::istringstream in(text);
  double v = 0.0;
  in >> v;
  if (!in || !(in >> std::ws).eof()) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string & key, const std::string & text, std::size_t count)
{
  std::string body = trim(text);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
    throw ConfigError("config: '" + key + "' expects a list like [a, b, c]");
  }
  body = body.substr(1, body.size() - 2);
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_number(key, trim(item)));
  }
  if (out.size() != count) {
    throw ConfigError("config: '" + key + "' expects " + std::to_string(count) + " entries");
  }
  return out;
}

std::array<double, 3> triple(const std::string & key, const std::string & text)
{
  const auto v = parse_list(key, text, 3);
  return {v[0], v[1], v[2]};
}

std::array<double, 3> parse_weights(const std::string & text)
{
  std::array<double, 3> w{};
  std::stringstream ss(text);
  std::string item;
  std::size_t k = 0;
  while (std::getline(ss, item, ',')) {
    if (k >= 3) {
      throw ConfigError("frame: expected three weights in '" + text + "'");
    }
    w[k++] = parse_number("frame", trim(item));
  }
  if (k != 3) {
    throw ConfigError("frame: expected three weights in '" + text + "'");
  }
  return w;
}

std::string list(const std::array<double, 3> & v)
{
  return "[" + detail::fmt(v[0]) + ", " + detail::fmt(v[1]) + ", " + detail::fmt(v[2]) + "]";
}

const std::set<std::string> & known_keys(const std::string & model)
{
  static const std::set<std::string> purcell = {"model", "frame", "position_weights", "orientation_weights", "seed",
                                                "lengths", "ct", "cn"};
  static const std::set<std::string> fluid = {"model", "frame", "position_weights", "orientation_weights", "seed",
                                              "lengths", "eta", "total_length", "alpha", "rho",
                                              "rotational_added_mass"};
  return model == "purcell" ? purcell : fluid;
}

}  // namespace

FrameChoice FrameChoice::parse(const std::string & text)
{
  const std::string t = trim(text);
  FrameChoice c;
  if (t == "middle-link") {
    return c;
  }
  if (t == "optimized") {
    c.mode = Mode::Optimized;
    return c;
  }
  const std::string prefix = "weighted:";
  if (t.rfind(prefix, 0) == 0) {
    const std::string body = t.substr(prefix.size());
    const auto semi = body.find(';');
    if (semi == std::string::npos) {
      throw ConfigError("frame: weighted frames are written weighted:w0,w1,w2;v0,v1,v2");
    }
    try {
      c.spec = BodyFrameSpec::weighted(parse_weights(body.substr(0, semi)), parse_weights(body.substr(semi + 1)));
    } catch (const InvalidParameters & e) {
      throw ConfigError(e.what());
    }
    return c;
  }
  throw ConfigError("frame: unknown frame '" + t + "' (middle-link, optimized, weighted:...)");
}

std::string FrameChoice::to_string() const
{
  if (mode == Mode::Optimized) {
    return "optimized";
  }
  if (spec.kind == BodyFrameSpec::Kind::MiddleLink) {
    return "middle-link";
  }
  const auto & w = spec.position_weights;
  const auto & v = spec.orientation_weights;
  return "weighted:" + detail::fmt(w[0]) + "," + detail::fmt(w[1]) + "," + detail::fmt(w[2]) + ";" +
         detail::fmt(v[0]) + "," + detail::fmt(v[1]) + "," + detail::fmt(v[2]);
}

ModelConfig parse_model_config(std::istream & in, const std::string & source)
{
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error & e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  ModelConfig cfg;
  cfg.source = source;
  for (const auto & [key, node] : tree) {
    if (!node.empty()) {
      throw ConfigError(source + ": sections are not supported ([" + key + "])");
    }
    cfg.entries[key] = clean_value(node.data());
  }
  auto get = [&](const std::string & k) -> std::optional<std::string> {
    auto it = cfg.entries.find(k);
    return it == cfg.entries.end() ? std::nullopt : std::optional<std::string>(it->second);
  };

  cfg.model_name = get("model").value_or("purcell");
  if (cfg.model_name != "purcell" && cfg.model_name != "perfect_fluid") {
    throw ConfigError(source + ": model must be \"purcell\" or \"perfect_fluid\"");
  }
  const auto & keys = known_keys(cfg.model_name);
  for (const auto & [k, v] : cfg.entries) {
    if (!keys.count(k)) {
      throw ConfigError(source + ": unknown key '" + k + "' for model " + cfg.model_name);
    }
  }

  try {
    if (cfg.model_name == "purcell") {
      PurcellParams p;
      if (auto v = get("lengths")) {
        const auto l = triple("lengths", *v);
        p.l0 = l[0];
        p.l1 = l[1];
        p.l2 = l[2];
      }
      if (auto v = get("ct")) {
        p.ct = parse_number("ct", *v);
      }
      if (auto v = get("cn")) {
        p.cn = parse_number("cn", *v);
      }
      p.validate();
      cfg.model = SwimmerModel::purcell(p);
    } else {
      PerfectFluidParams p;
      if (auto v = get("alpha")) {
        p.alpha = parse_number("alpha", *v);
      }
      if (auto v = get("rho")) {
        p.rho = parse_number("rho", *v);
      }
      if (get("eta") && get("lengths")) {
        throw ConfigError(source + ": give either eta or lengths, not both");
      }
      if (auto v = get("eta")) {
        const double total = get("total_length") ? parse_number("total_length", *get("total_length")) : 1.0;
        p = PerfectFluidParams::from_eta(parse_number("eta", *v), p.alpha, p.rho, total);
      } else if (get("total_length")) {
        throw ConfigError(source + ": total_length only applies together with eta");
      }
      if (auto v = get("lengths")) {
        p.lengths = triple("lengths", *v);
      }
      if (auto v = get("rotational_added_mass")) {
        if (*v == "squared") {
          p.rotational = RotationalAddedMass::Squared;
        } else if (*v == "linear") {
          p.rotational = RotationalAddedMass::Linear;
        } else {
          throw ConfigError(source + ": rotational_added_mass must be \"squared\" or \"linear\"");
        }
      }
      p.validate();
      cfg.model = SwimmerModel::perfect_fluid(p);
    }

    const std::string frame = get("frame").value_or("middle-link");
    if (frame == "weighted") {
      const auto w = get("position_weights");
      const auto v = get("orientation_weights");
      if (!w || !v) {
        throw ConfigError(source + ": weighted frames need position_weights and orientation_weights");
      }
      cfg.frame.spec = BodyFrameSpec::weighted(triple("position_weights", *w), triple("orientation_weights", *v));
    } else {
      if (get("position_weights") || get("orientation_weights")) {
        throw ConfigError(source + ": weight lists require frame = \"weighted\"");
      }
      cfg.frame = FrameChoice::parse(frame);
    }
  } catch (const InvalidParameters & e) {
    throw ConfigError(source + ": " + e.what());
  }

  if (auto v = get("seed")) {
    const double s = parse_number("seed", *v);
    if (s < 0 || s != static_cast<double>(static_cast<std::uint64_t>(s))) {
      throw ConfigError(source + ": seed must be a nonnegative integer");
    }
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  return cfg;
}

ModelConfig load_model_config(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open model config '" + path + "'");
  }
  return parse_model_config(in, path);
}

std::string serialize_model_config(const ModelConfig & config)
{
  std::ostringstream out;
  out << "model = \"" << config.model_name << "\"\n";
  if (const auto * p = std::get_if<PurcellParams>(&config.model.params())) {
    out << "lengths = " << list(p->lengths()) << "\n";
    out << "ct = " << detail::fmt(p->ct) << "\n";
    out << "cn = " << detail::fmt(p->cn) << "\n";
  } else if (const auto * f = std::get_if<PerfectFluidParams>(&config.model.params())) {
    out << "lengths = " << list(f->lengths) << "\n";
    out << "alpha = " << detail::fmt(f->alpha) << "\n";
    out << "rho = " << detail::fmt(f->rho) << "\n";
    out << "rotational_added_mass = \""
        << (f->rotational == RotationalAddedMass::Squared ? "squared" : "linear") << "\"\n";
  }
  if (config.frame.mode == FrameChoice::Mode::Optimized) {
    out << "frame = \"optimized\"\n";
  } else if (config.frame.spec.kind == BodyFrameSpec::Kind::MiddleLink) {
    out << "frame = \"middle-link\"\n";
  } else {
    out << "frame = \"weighted\"\n";
    out << "position_weights = " << list(config.frame.spec.position_weights) << "\n";
    out << "orientation_weights = " << list(config.frame.spec.orientation_weights) << "\n";
  }
  out << "seed = " << config.seed << "\n";
  return out.str();
}

BodyFrameSpec resolve_frame(const SwimmerModel & model, const FrameChoice & choice, const ShapeWindow & window)
{
  if (choice.mode == FrameChoice::Mode::Fixed) {
    return choice.spec;
  }
  return optimize_frame(model, window).frame;
}

}  // namespace gaitforge
