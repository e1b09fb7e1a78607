#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trailgate/types.hpp"

namespace trailgate {

/// 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels.
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;
};

/// Label raster: class ids for gray annotations, packed 0xRRGGBB for color
/// annotations.
struct LabelRaster {
  int width = 0;
  int height = 0;
  bool rgb = false;
  std::vector<std::uint32_t> codes;
};

std::vector<std::uint8_t> encode_png(const Image8& image);
/// Decodes to RGB (channels = 3) regardless of the stored format.
Image8 decode_png_rgb(std::span<const std::uint8_t> bytes);
/// Decodes without color conversion: gray PNGs (8 or 16 bit) yield ids,
/// color and palette PNGs yield packed RGB.
LabelRaster decode_label_png(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

Frame frame_from_png(std::span<const std::uint8_t> bytes, FrameId id);
std::vector<std::uint8_t> frame_to_png(const Frame& frame);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws kDecodeError on characters outside the standard alphabet.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Little-endian IEEE-754 float32 packing used by the wire protocol and the
/// replay map files.
std::vector<std::uint8_t> pack_f32le(std::span<const double> values);
std::vector<double> unpack_f32le(std::span<const std::uint8_t> bytes);

}  // namespace trailgate
