#pragma once

#include <string>

#include <yaml-cpp/yaml.h>

#include "trailgate/types.hpp"

namespace trailgate::detail {

[[noreturn]] void config_error(const std::string& where, const std::string& what);

double as_double(const YAML::Node& node, const std::string& where);
std::string as_string(const YAML::Node& node, const std::string& where);

/// Accepts `- {prompt: grass, weight: 1}` entries or `- [grass, 1]` pairs.
RawPrefs parse_raw_prefs(const YAML::Node& node, const std::string& where);

std::vector<Point2> parse_polygon(const YAML::Node& node, const std::string& where);

void emit_prefs(YAML::Emitter& out, const TraversalPrefs& prefs);

}  // namespace trailgate::detail
