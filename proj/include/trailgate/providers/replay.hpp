#pragma once

#include <filesystem>
#include <optional>

#include "trailgate/providers/provider.hpp"

namespace trailgate {

/// Stored model outputs of a recorded episode:
///   <dir>/masks/<frame id, 6 digits>/<prompt slug>.f32   width*height float32 LE
///   <dir>/embeddings/<frame id, 6 digits>.f32           D float32 LE
std::filesystem::path replay_mask_path(const std::filesystem::path& dir, FrameId id, std::string_view prompt);
std::filesystem::path replay_embedding_path(const std::filesystem::path& dir, FrameId id);

class ReplayMaskProvider final : public MaskProvider {
 public:
  explicit ReplayMaskProvider(std::filesystem::path dir);

  /// Missing or wrongly sized map files raise kMalformedResponse.
  std::vector<AttentionMap> get_masks(const Frame& frame, std::span<const std::string> prompts) override;

 private:
  std::filesystem::path dir_;
};

class ReplayEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit ReplayEmbeddingProvider(std::filesystem::path dir);

  /// A stored vector whose dimension differs from the first one served
  /// raises kMalformedResponse.
  Embedding get_embedding(const Frame& frame) override;

 private:
  std::filesystem::path dir_;
  std::optional<std::size_t> dim_;
};

}  // namespace trailgate
