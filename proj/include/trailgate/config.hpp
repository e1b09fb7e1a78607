#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "trailgate/types.hpp"

namespace trailgate {

/// Where attention maps or embeddings come from. kAuto defers to the episode:
/// synthetic episodes use the synthetic backends, recorded episodes replay
/// their stored maps.
struct ProviderSpec {
  enum class Kind { kAuto, kSynthetic, kReplay, kRemote };

  Kind kind = Kind::kAuto;
  std::string endpoint;
  double timeout_s = 30.0;
  std::uint64_t seed = 0;
  std::string directory;

  friend bool operator==(const ProviderSpec&, const ProviderSpec&) = default;
};

struct AppConfig {
  EngineConfig engine;
  ProviderSpec masks;
  ProviderSpec embeddings;

  friend bool operator==(const AppConfig&, const AppConfig&) = default;
};

/// YAML config file; the schema is documented in docs/formats.md.
/// Throws kConfigError naming the offending key.
AppConfig parse_app_config(std::string_view yaml_text);
AppConfig load_app_config(const std::filesystem::path& path);
std::string emit_app_config(const AppConfig& config);

/// Prompt file: a YAML list of {prompt, weight} maps (or a map with a
/// top-level `prefs` list).
TraversalPrefs load_prompts_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace trailgate
