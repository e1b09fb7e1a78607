#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trailgate/providers/provider.hpp"

namespace trailgate {

/// Axis-aligned region where every prompt's attention is zero. Coordinates are
/// normalized; the rectangle moves by (vx, vy) and each side grows outward by
/// `growth` per frame after first_frame.
struct Obstacle {
  FrameId first_frame = 0;
  FrameId last_frame = std::numeric_limits<FrameId>::max();
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double growth = 0.0;

  bool covers(FrameId frame, double x, double y) const noexcept;
};

/// Parameters of a fully synthetic episode. Everything the synthetic backends
/// return is a pure function of these values and the frame id.
struct SyntheticScenario {
  std::uint64_t seed = 0;
  int width = 64;
  int height = 48;
  std::size_t frame_count = 10;
  FrameId first_id = 0;
  std::size_t embedding_dim = 8;
  /// Attention = floor + (1 - floor) * noise; 1 makes every map constant 1
  /// outside obstacles.
  double attention_floor = 0.0;
  /// Value-noise lattice resolution (cells per image side).
  int noise_cells = 4;
  /// Scene label per frame index. Frames past the end use "frame-<id>".
  std::vector<std::string> labels;
  /// Explicit embedding per scene label; other labels get seeded unit vectors.
  std::map<std::string, std::vector<double>> scene_vectors;
  std::vector<Obstacle> obstacles;

  std::string label_for(FrameId id) const;
  bool in_obstacle(FrameId id, double x, double y) const noexcept;
  void validate() const;
};

/// Smooth deterministic fields keyed by (seed, frame id, prompt hash), zeroed
/// inside obstacles.
class SyntheticMaskProvider final : public MaskProvider {
 public:
  explicit SyntheticMaskProvider(SyntheticScenario scenario);

  std::vector<AttentionMap> get_masks(const Frame& frame, std::span<const std::string> prompts) override;
  AttentionMap mask_for(const Frame& frame, std::string_view prompt) const;

 private:
  SyntheticScenario scenario_;
};

/// Unit vectors keyed by the scenario's scene label for the frame.
class SyntheticEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit SyntheticEmbeddingProvider(SyntheticScenario scenario);

  Embedding get_embedding(const Frame& frame) override;
  Embedding embedding_for_label(const std::string& label) const;

 private:
  SyntheticScenario scenario_;
};

/// Deterministic RGB image for frame index i of the scenario.
Frame render_synthetic_frame(const SyntheticScenario& scenario, std::size_t index);

}  // namespace trailgate
