#pragma once

#include <span>
#include <string>
#include <vector>

#include "trailgate/types.hpp"

namespace trailgate {

/// Prompt-conditioned segmentation backend: one [0, 1] attention map per
/// prompt, in prompt order, at frame resolution.
class MaskProvider {
 public:
  virtual ~MaskProvider() = default;
  virtual std::vector<AttentionMap> get_masks(const Frame& frame, std::span<const std::string> prompts) = 0;
};

/// Whole-image embedding backend with a fixed output dimension.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Embedding get_embedding(const Frame& frame) = 0;
};

/// Boundary checks applied to every provider response. Any violation becomes
/// kMalformedResponse so bad data never reaches the map algebra.
void conform_masks(const std::vector<AttentionMap>& masks, const Frame& frame, std::size_t prompt_count);
void conform_embedding(const Embedding& e, std::size_t expected_dim);

/// Half-pixel-centered bilinear resampling with edge clamping.
std::vector<double> resample_bilinear(std::span<const double> src, int src_w, int src_h, int dst_w, int dst_h);

/// Stable 64-bit FNV-1a, used wherever a hash must not vary across runs or
/// platforms (prompt keys, content ids).
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

/// File-name-safe form of a prompt: ASCII alphanumerics are kept, every other
/// run of bytes becomes a single '_'.
std::string prompt_slug(std::string_view prompt);

}  // namespace trailgate
