#include "trailgate/preview.hpp"

#include <algorithm>
#include <cmath>

namespace trailgate {

namespace {

template <typename G, typename F>
Image8 gray(const G& grid, F&& level) {
  Image8 out{grid.width(), grid.height(), 1, std::vector<std::uint8_t>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.data[i] = static_cast<std::uint8_t>(std::lround(std::clamp(level(grid[i]), 0.0, 1.0) * 255.0));
  }
  return out;
}

}  // namespace

Image8 frame_image(const Frame& frame) { return {frame.width, frame.height, 3, frame.pixels}; }

Image8 pooled_image(const PooledMap& pooled) {
  return gray(pooled, [](double v) { return (v + 1.0) / 2.0; });
}

Image8 uncertainty_image(const UncertaintyMap& unc) {
  return gray(unc, [](double v) { return v; });
}

Image8 binary_image(const BinaryMask& mask) {
  return gray(mask, [](std::uint8_t v) { return v != 0 ? 1.0 : 0.0; });
}

Image8 downscale(const Image8& image, int max_width) {
  if (max_width < 1 || image.width <= max_width) return image;
  const int w = max_width;
  const int h = std::max(1, static_cast<int>(std::lround(static_cast<double>(image.height) * w / image.width)));
  Image8 out{w, h, image.channels, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * image.channels)};
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(image.height - 1, static_cast<int>((y + 0.5) * image.height / h));
    for (int x = 0; x < w; ++x) {
      const int sx = std::min(image.width - 1, static_cast<int>((x + 0.5) * image.width / w));
      for (int c = 0; c < image.channels; ++c) {
        out.data[(static_cast<std::size_t>(y) * w + x) * image.channels + c] =
            image.data[(static_cast<std::size_t>(sy) * image.width + sx) * image.channels + c];
      }
    }
  }
  return out;
}

}  // namespace trailgate
