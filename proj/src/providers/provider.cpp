#include "trailgate/providers/provider.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace trailgate {

void conform_masks(const std::vector<AttentionMap>& masks, const Frame& frame, std::size_t prompt_count) {
  if (masks.size() != prompt_count) {
    throw Error(Errc::kMalformedResponse, "provider returned " + std::to_string(masks.size()) +
                                              " maps for " + std::to_string(prompt_count) + " prompts");
  }
  for (std::size_t n = 0; n < masks.size(); ++n) {
    const auto& m = masks[n];
    if (m.width() != frame.width || m.height() != frame.height) {
      throw Error(Errc::kMalformedResponse, "map " + std::to_string(n) + " is " + std::to_string(m.width()) +
                                                "x" + std::to_string(m.height()) + ", frame is " +
                                                std::to_string(frame.width) + "x" + std::to_string(frame.height));
    }
    for (double v : m.values()) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(Errc::kMalformedResponse, "map " + std::to_string(n) + " has value outside [0, 1]");
      }
    }
  }
}

void conform_embedding(const Embedding& e, std::size_t expected_dim) {
  if (e.dim() == 0 || (expected_dim != 0 && e.dim() != expected_dim)) {
    throw Error(Errc::kMalformedResponse, "embedding dimension " + std::to_string(e.dim()) +
                                              ", expected " + std::to_string(expected_dim));
  }
  for (double v : e.values) {
    if (!std::isfinite(v)) throw Error(Errc::kMalformedResponse, "embedding has a non-finite component");
  }
  if (!(e.norm() > 0.0)) throw Error(Errc::kMalformedResponse, "embedding is the zero vector");
}

std::vector<double> resample_bilinear(std::span<const double> src, int src_w, int src_h, int dst_w, int dst_h) {
  if (src_w < 1 || src_h < 1 || dst_w < 1 || dst_h < 1 ||
      src.size() != static_cast<std::size_t>(src_w) * static_cast<std::size_t>(src_h)) {
    throw Error(Errc::kDimensionMismatch, "invalid resample dimensions");
  }
  std::vector<double> out(static_cast<std::size_t>(dst_w) * static_cast<std::size_t>(dst_h));
  const double sx = static_cast<double>(src_w) / dst_w;
  const double sy = static_cast<double>(src_h) / dst_h;
  for (int y = 0; y < dst_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src_h - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src_h - 1);
    const double ty = fy - y0;
    for (int x = 0; x < dst_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src_w - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src_w - 1);
      const double tx = fx - x0;
      auto at = [&](int xx, int yy) { return src[static_cast<std::size_t>(yy) * src_w + xx]; };
      const double top = at(x0, y0) * (1.0 - tx) + at(x1, y0) * tx;
      const double bottom = at(x0, y1) * (1.0 - tx) + at(x1, y1) * tx;
      out[static_cast<std::size_t>(y) * dst_w + x] = top * (1.0 - ty) + bottom * ty;
    }
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) noexcept {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string prompt_slug(std::string_view prompt) {
  std::string out;
  bool pending_sep = false;
  for (unsigned char c : prompt) {
    if (std::isalnum(c) != 0 && c < 0x80) {
      if (pending_sep && !out.empty()) out.push_back('_');
      pending_sep = false;
      out.push_back(static_cast<char>(c));
    } else {
      pending_sep = true;
    }
  }
  if (out.empty()) out = "prompt_" + std::to_string(fnv1a64(prompt) & 0xffffffffULL);
  return out;
}

}  // namespace trailgate
