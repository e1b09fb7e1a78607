#include "trailgate/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "trailgate/core.hpp"
#include "yaml_util.hpp"

namespace trailgate {

namespace detail {

void config_error(const std::string& where, const std::string& what) {
  throw Error(Errc::kConfigError, where.empty() ? what : where + ": " + what);
}

double as_double(const YAML::Node& node, const std::string& where) {
  if (!node || !node.IsScalar()) config_error(where, "expected a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    config_error(where, "'" + node.Scalar() + "' is not a number");
  }
}

std::string as_string(const YAML::Node& node, const std::string& where) {
  if (!node || !node.IsScalar()) config_error(where, "expected a string");
  return node.Scalar();
}

RawPrefs parse_raw_prefs(const YAML::Node& node, const std::string& where) {
  RawPrefs raw;
  if (!node || node.IsNull()) return raw;
  if (!node.IsSequence()) config_error(where, "expected a list of prompt-weight pairs");
  for (std::size_t i = 0; i < node.size(); ++i) {
    const auto item = node[i];
    const std::string at = fmt::format("{}[{}]", where, i);
    if (item.IsMap()) {
      raw.emplace_back(as_string(item["prompt"], at + ".prompt"), as_double(item["weight"], at + ".weight"));
    } else if (item.IsSequence() && item.size() == 2) {
      raw.emplace_back(as_string(item[0], at + "[0]"), as_double(item[1], at + "[1]"));
    } else {
      config_error(at, "expected {prompt, weight} or [prompt, weight]");
    }
  }
  return raw;
}

std::vector<Point2> parse_polygon(const YAML::Node& node, const std::string& where) {
  if (!node || !node.IsSequence()) config_error(where, "expected a list of [x, y] vertices");
  std::vector<Point2> poly;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const auto v = node[i];
    const std::string at = fmt::format("{}[{}]", where, i);
    if (!v.IsSequence() || v.size() != 2) config_error(at, "expected [x, y]");
    poly.push_back({as_double(v[0], at + "[0]"), as_double(v[1], at + "[1]")});
  }
  return poly;
}

void emit_prefs(YAML::Emitter& out, const TraversalPrefs& prefs) {
  out << YAML::BeginSeq;
  for (const auto& pw : prefs) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "prompt" << YAML::Value << YAML::DoubleQuoted << pw.prompt;
    out << YAML::Key << "weight" << YAML::Value << fmt::format("{}", pw.weight);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
}

}  // namespace detail

namespace {

using detail::as_double;
using detail::as_string;
using detail::config_error;

ProviderSpec parse_provider(const YAML::Node& node, const std::string& where) {
  ProviderSpec spec;
  if (!node || node.IsNull()) return spec;
  if (!node.IsMap()) config_error(where, "expected a map");
  const std::string kind = node["kind"] ? as_string(node["kind"], where + ".kind") : "auto";
  if (kind == "auto") {
    spec.kind = ProviderSpec::Kind::kAuto;
  } else if (kind == "synthetic") {
    spec.kind = ProviderSpec::Kind::kSynthetic;
  } else if (kind == "replay") {
    spec.kind = ProviderSpec::Kind::kReplay;
  } else if (kind == "remote") {
    spec.kind = ProviderSpec::Kind::kRemote;
  } else {
    config_error(where + ".kind", "unknown provider kind '" + kind + "'");
  }
  if (node["endpoint"]) spec.endpoint = as_string(node["endpoint"], where + ".endpoint");
  if (node["timeout"]) spec.timeout_s = as_double(node["timeout"], where + ".timeout");
  if (node["seed"]) spec.seed = static_cast<std::uint64_t>(as_double(node["seed"], where + ".seed"));
  if (node["directory"]) spec.directory = as_string(node["directory"], where + ".directory");
  if (spec.kind == ProviderSpec::Kind::kRemote && spec.endpoint.empty() && !std::getenv("TRAILGATE_PROVIDER_URL")) {
    config_error(where + ".endpoint", "remote provider needs an endpoint");
  }
  return spec;
}

std::string_view kind_name(ProviderSpec::Kind kind) {
  switch (kind) {
    case ProviderSpec::Kind::kAuto: return "auto";
    case ProviderSpec::Kind::kSynthetic: return "synthetic";
    case ProviderSpec::Kind::kReplay: return "replay";
    case ProviderSpec::Kind::kRemote: return "remote";
  }
  return "auto";
}

void emit_provider(YAML::Emitter& out, const ProviderSpec& spec) {
  out << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(kind_name(spec.kind));
  if (!spec.endpoint.empty()) out << YAML::Key << "endpoint" << YAML::Value << YAML::DoubleQuoted << spec.endpoint;
  out << YAML::Key << "timeout" << YAML::Value << fmt::format("{}", spec.timeout_s);
  out << YAML::Key << "seed" << YAML::Value << spec.seed;
  if (!spec.directory.empty()) {
    out << YAML::Key << "directory" << YAML::Value << YAML::DoubleQuoted << spec.directory;
  }
  out << YAML::EndMap;
}

YAML::Node parse_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& ex) {
    throw Error(Errc::kConfigError, std::string("YAML syntax: ") + ex.what());
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AppConfig parse_app_config(std::string_view yaml_text) {
  const YAML::Node root = parse_yaml(yaml_text);
  if (!root.IsMap()) config_error("", "config root must be a map");
  AppConfig cfg;
  auto& e = cfg.engine;
  if (root["theta_scene"]) e.theta_scene = as_double(root["theta_scene"], "theta_scene");
  if (root["theta_roi"]) e.theta_roi = as_double(root["theta_roi"], "theta_roi");
  if (root["theta_trav"]) e.theta_trav = as_double(root["theta_trav"], "theta_trav");
  if (root["hoc_timeout"]) e.hoc_timeout_s = as_double(root["hoc_timeout"], "hoc_timeout");

  const auto roi = root["roi"];
  if (!roi || !roi.IsMap()) config_error("roi", "missing ROI section");
  e.roi.name = roi["name"] ? as_string(roi["name"], "roi.name") : "roi";
  e.roi.polygon = detail::parse_polygon(roi["polygon"], "roi.polygon");

  if (!root["prefs"]) config_error("prefs", "missing prompt-weight list");
  e.initial_prefs = validate_prefs(detail::parse_raw_prefs(root["prefs"], "prefs"));

  if (const auto h = root["history"]; h && h.IsMap()) {
    if (h["persist"] && !h["persist"].IsNull()) e.history.persist_path = as_string(h["persist"], "history.persist");
    if (h["reuse"]) e.history.reuse_across_episodes = h["reuse"].as<bool>(false);
  }
  if (const auto p = root["providers"]) {
    cfg.masks = parse_provider(p["masks"], "providers.masks");
    cfg.embeddings = parse_provider(p["embeddings"], "providers.embeddings");
  }
  e.validate();
  return cfg;
}

AppConfig load_app_config(const std::filesystem::path& path) {
  try {
    return parse_app_config(read_text_file(path));
  } catch (const Error& err) {
    if (err.code() == Errc::kIoError) throw;
    throw Error(err.code(), path.string() + ": " + err.message());
  }
}

std::string emit_app_config(const AppConfig& cfg) {
  const auto& e = cfg.engine;
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "theta_scene" << YAML::Value << fmt::format("{}", e.theta_scene);
  out << YAML::Key << "theta_roi" << YAML::Value << fmt::format("{}", e.theta_roi);
  out << YAML::Key << "theta_trav" << YAML::Value << fmt::format("{}", e.theta_trav);
  out << YAML::Key << "hoc_timeout" << YAML::Value << fmt::format("{}", e.hoc_timeout_s);
  out << YAML::Key << "roi" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << e.roi.name;
  out << YAML::Key << "polygon" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& p : e.roi.polygon) {
    out << YAML::Flow << YAML::BeginSeq << fmt::format("{}", p.x) << fmt::format("{}", p.y) << YAML::EndSeq;
  }
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::Key << "prefs" << YAML::Value;
  detail::emit_prefs(out, e.initial_prefs);
  out << YAML::Key << "history" << YAML::Value << YAML::BeginMap;
  if (e.history.persist_path) {
    out << YAML::Key << "persist" << YAML::Value << YAML::DoubleQuoted << *e.history.persist_path;
  }
  out << YAML::Key << "reuse" << YAML::Value << e.history.reuse_across_episodes;
  out << YAML::EndMap;
  out << YAML::Key << "providers" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "masks" << YAML::Value;
  emit_provider(out, cfg.masks);
  out << YAML::Key << "embeddings" << YAML::Value;
  emit_provider(out, cfg.embeddings);
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

TraversalPrefs load_prompts_file(const std::filesystem::path& path) {
  const YAML::Node root = parse_yaml(read_text_file(path));
  const YAML::Node list = root.IsMap() ? root["prefs"] : root;
  try {
    return validate_prefs(detail::parse_raw_prefs(list, "prefs"));
  } catch (const Error& err) {
    throw Error(err.code(), path.string() + ": " + err.message());
  }
}

}  // namespace trailgate
