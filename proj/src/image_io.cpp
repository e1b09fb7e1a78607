#include "trailgate/image_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include <png.h>

namespace trailgate {

namespace {

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

}  // namespace

std::vector<std::uint8_t> encode_png(const Image8& img) {
  if (img.channels != 1 && img.channels != 3) {
    throw Error(Errc::kInvalidArgument, "PNG encoder supports 1 or 3 channels");
  }
  if (img.width < 1 || img.height < 1 ||
      img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw Error(Errc::kDimensionMismatch, "image buffer does not match its dimensions");
  }
  PngImage png;
  png.image.width = static_cast<png_uint_32>(img.width);
  png.image.height = static_cast<png_uint_32>(img.height);
  png.image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, img.data.data(), 0, nullptr)) {
    throw Error(Errc::kIoError, std::string("PNG encode failed: ") + png.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, img.data.data(), 0, nullptr)) {
    throw Error(Errc::kIoError, std::string("PNG encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

Image8 decode_png_rgb(std::span<const std::uint8_t> bytes) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    throw Error(Errc::kDecodeError, std::string("not a readable PNG: ") + png.image.message);
  }
  png.image.format = PNG_FORMAT_RGB;
  Image8 out{static_cast<int>(png.image.width), static_cast<int>(png.image.height), 3, {}};
  out.data.resize(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, out.data.data(), 0, nullptr)) {
    throw Error(Errc::kDecodeError, std::string("PNG decode failed: ") + png.image.message);
  }
  return out;
}

LabelRaster decode_label_png(std::span<const std::uint8_t> bytes) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    throw Error(Errc::kDecodeError, std::string("not a readable PNG: ") + png.image.message);
  }
  const bool color = (png.image.format & PNG_FORMAT_FLAG_COLOR) != 0 ||
                     (png.image.format & PNG_FORMAT_FLAG_COLORMAP) != 0;
  const bool wide = (png.image.format & PNG_FORMAT_FLAG_LINEAR) != 0;
  LabelRaster out{static_cast<int>(png.image.width), static_cast<int>(png.image.height), color, {}};
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height;
  out.codes.resize(n);
  if (color) {
    png.image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png.image));
    if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr)) {
      throw Error(Errc::kDecodeError, std::string("PNG decode failed: ") + png.image.message);
    }
    for (std::size_t i = 0; i < n; ++i) {
      out.codes[i] = (std::uint32_t{buf[3 * i]} << 16) | (std::uint32_t{buf[3 * i + 1]} << 8) | buf[3 * i + 2];
    }
  } else if (wide) {
    // Linear 16-bit output leaves 16-bit gray samples untouched.
    png.image.format = PNG_FORMAT_LINEAR_Y;
    std::vector<std::uint16_t> buf(n);
    if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr)) {
      throw Error(Errc::kDecodeError, std::string("PNG decode failed: ") + png.image.message);
    }
    for (std::size_t i = 0; i < n; ++i) out.codes[i] = buf[i];
  } else {
    png.image.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buf(n);
    if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr)) {
      throw Error(Errc::kDecodeError, std::string("PNG decode failed: ") + png.image.message);
    }
    for (std::size_t i = 0; i < n; ++i) out.codes[i] = buf[i];
  }
  return out;
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

Frame frame_from_png(std::span<const std::uint8_t> bytes, FrameId id) {
  Image8 img = decode_png_rgb(bytes);
  return Frame{id, img.width, img.height, std::move(img.data), std::nullopt};
}

std::vector<std::uint8_t> frame_to_png(const Frame& frame) {
  frame.validate();
  return encode_png(Image8{frame.width, frame.height, 3, frame.pixels});
}

namespace {

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<int, 256> make_reverse() {
  std::array<int, 256> rev{};
  for (auto& v : rev) v = -1;
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) rev[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);
  return rev;
}

constexpr auto kReverse = make_reverse();

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = std::uint32_t{bytes[i]} << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  std::uint32_t acc = 0;
  int bits = 0;
  std::size_t padding = 0;
  for (char c : text) {
    if (c == '=') {
      ++padding;
      continue;
    }
    if (c == '\n' || c == '\r' || c == ' ') continue;
    const int v = kReverse[static_cast<unsigned char>(c)];
    if (v < 0 || padding > 0) throw Error(Errc::kDecodeError, "invalid base64 input");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
    }
  }
  if (padding > 2) throw Error(Errc::kDecodeError, "invalid base64 padding");
  return out;
}

std::vector<std::uint8_t> pack_f32le(std::span<const double> values) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts need byte swapping here");
  std::vector<std::uint8_t> out(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float f = static_cast<float>(values[i]);
    std::memcpy(out.data() + 4 * i, &f, 4);
  }
  return out;
}

std::vector<double> unpack_f32le(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) throw Error(Errc::kDecodeError, "float32 payload length is not a multiple of 4");
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    float f = 0.0F;
    std::memcpy(&f, bytes.data() + 4 * i, 4);
    out[i] = f;
  }
  return out;
}

}  // namespace trailgate
