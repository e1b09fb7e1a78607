#include "trailgate/providers/replay.hpp"

#include <fmt/format.h>

#include "trailgate/image_io.hpp"

namespace trailgate {

std::filesystem::path replay_mask_path(const std::filesystem::path& dir, FrameId id, std::string_view prompt) {
  return dir / "masks" / fmt::format("{:06}", id) / (prompt_slug(prompt) + ".f32");
}

std::filesystem::path replay_embedding_path(const std::filesystem::path& dir, FrameId id) {
  return dir / "embeddings" / fmt::format("{:06}.f32", id);
}

ReplayMaskProvider::ReplayMaskProvider(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw Error(Errc::kConfigError, "replay directory " + dir_.string() + " does not exist");
  }
}

std::vector<AttentionMap> ReplayMaskProvider::get_masks(const Frame& frame, std::span<const std::string> prompts) {
  std::vector<AttentionMap> out;
  out.reserve(prompts.size());
  const std::size_t expected = static_cast<std::size_t>(frame.width) * frame.height;
  for (const auto& prompt : prompts) {
    const auto path = replay_mask_path(dir_, frame.id, prompt);
    if (!std::filesystem::exists(path)) {
      throw Error(Errc::kMalformedResponse, "no stored map for frame " + std::to_string(frame.id) + ", prompt '" +
                                                prompt + "' (" + path.string() + ")");
    }
    auto values = unpack_f32le(read_binary_file(path));
    if (values.size() != expected) {
      throw Error(Errc::kMalformedResponse, path.string() + " holds " + std::to_string(values.size()) +
                                                " values, expected " + std::to_string(expected));
    }
    out.emplace_back(frame.width, frame.height, std::move(values));
  }
  conform_masks(out, frame, prompts.size());
  return out;
}

ReplayEmbeddingProvider::ReplayEmbeddingProvider(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw Error(Errc::kConfigError, "replay directory " + dir_.string() + " does not exist");
  }
}

Embedding ReplayEmbeddingProvider::get_embedding(const Frame& frame) {
  const auto path = replay_embedding_path(dir_, frame.id);
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::kMalformedResponse, "no stored embedding for frame " + std::to_string(frame.id));
  }
  Embedding e{unpack_f32le(read_binary_file(path))};
  conform_embedding(e, dim_.value_or(0));
  dim_ = e.dim();
  return e;
}

}  // namespace trailgate
