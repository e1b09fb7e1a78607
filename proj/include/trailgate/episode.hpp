#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "trailgate/config.hpp"
#include "trailgate/providers/provider.hpp"
#include "trailgate/providers/synthetic.hpp"

namespace trailgate {

/// Ordered frames of one episode plus optional ground-truth annotations.
class EpisodeSource {
 public:
  virtual ~EpisodeSource() = default;
  virtual const std::string& name() const = 0;
  virtual std::size_t size() const = 0;
  virtual Frame frame(std::size_t index) const = 0;
  virtual std::optional<std::filesystem::path> annotation(std::size_t /*index*/) const { return std::nullopt; }
};

class SyntheticEpisode final : public EpisodeSource {
 public:
  SyntheticEpisode(std::string name, SyntheticScenario scenario);

  const std::string& name() const override { return name_; }
  std::size_t size() const override { return scenario_.frame_count; }
  Frame frame(std::size_t index) const override;
  const SyntheticScenario& scenario() const noexcept { return scenario_; }

 private:
  std::string name_;
  SyntheticScenario scenario_;
};

/// Recorded episode: PNG frames listed in manifest.yaml, with stored maps and
/// embeddings laid out as described in providers/replay.hpp.
class ReplayEpisode final : public EpisodeSource {
 public:
  struct Entry {
    FrameId id = 0;
    std::filesystem::path image;
    std::optional<double> timestamp;
    std::optional<std::filesystem::path> annotation;
  };

  ReplayEpisode(std::string name, std::filesystem::path dir, std::vector<Entry> entries);

  const std::string& name() const override { return name_; }
  std::size_t size() const override { return entries_.size(); }
  Frame frame(std::size_t index) const override;
  std::optional<std::filesystem::path> annotation(std::size_t index) const override;
  const std::filesystem::path& directory() const noexcept { return dir_; }

 private:
  std::string name_;
  std::filesystem::path dir_;
  std::vector<Entry> entries_;
};

/// Reads <dir>/manifest.yaml. Throws kIoError when the directory or manifest
/// is missing and kConfigError on schema problems.
std::unique_ptr<EpisodeSource> open_episode(const std::filesystem::path& dir);

SyntheticScenario parse_scenario(std::string_view yaml_text);

struct ProviderPair {
  std::shared_ptr<MaskProvider> masks;
  std::shared_ptr<EmbeddingProvider> embeddings;
};

/// Instantiates the configured backends; kAuto picks the episode's own.
ProviderPair make_providers(const ProviderSpec& masks, const ProviderSpec& embeddings, const EpisodeSource& episode);

/// Records an episode in replay form: frames, one stored map per prompt,
/// embeddings, and a ground-truth label image whose class is 1 + the index of
/// the prompt that wins weighted max pooling (0 where every weighted response
/// is zero). Also writes mapping.yaml assigning each class its role.
void export_replay_episode(const EpisodeSource& source, MaskProvider& masks, EmbeddingProvider& embeddings,
                           const TraversalPrefs& prefs, const std::filesystem::path& out_dir);

}  // namespace trailgate
