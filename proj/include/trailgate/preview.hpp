#pragma once

#include "trailgate/image_io.hpp"
#include "trailgate/types.hpp"

namespace trailgate {

/// 8-bit renderings of engine maps for the console.
Image8 frame_image(const Frame& frame);
/// -1 maps to black, +1 to white.
Image8 pooled_image(const PooledMap& pooled);
Image8 uncertainty_image(const UncertaintyMap& unc);
Image8 binary_image(const BinaryMask& mask);

/// Nearest-neighbor shrink to at most max_width columns, keeping the aspect
/// ratio. Narrower images are returned unchanged.
Image8 downscale(const Image8& image, int max_width);

}  // namespace trailgate
