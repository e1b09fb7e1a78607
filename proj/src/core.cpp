#include "trailgate/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace trailgate {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::kDuplicatePrompt: return "DuplicatePrompt";
    case Errc::kWeightOutOfRange: return "WeightOutOfRange";
    case Errc::kEmptyPrompt: return "EmptyPrompt";
    case Errc::kEmptyPrefs: return "EmptyPrefs";
    case Errc::kInvalidRoi: return "InvalidRoi";
    case Errc::kDegenerateRoi: return "DegenerateRoi";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kEmptyRoi: return "EmptyRoi";
    case Errc::kZeroVector: return "ZeroVector";
    case Errc::kProviderUnavailable: return "ProviderUnavailable";
    case Errc::kMalformedResponse: return "MalformedResponse";
    case Errc::kHocTimeout: return "HocTimeout";
    case Errc::kNoPendingRequest: return "NoPendingRequest";
    case Errc::kUnmappedClass: return "UnmappedClass";
    case Errc::kDecodeError: return "DecodeError";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kIoError: return "IoError";
    case Errc::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void Frame::validate() const {
  if (width < 1 || height < 1) {
    throw Error(Errc::kDimensionMismatch, "frame dimensions must be positive");
  }
  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  if (pixels.size() != expected) {
    throw Error(Errc::kDimensionMismatch, "frame pixel buffer has " + std::to_string(pixels.size()) +
                                              " bytes, expected " + std::to_string(expected));
  }
}

double Embedding::norm() const noexcept {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

std::vector<std::string> TraversalPrefs::prompts() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.prompt);
  return out;
}

std::vector<double> TraversalPrefs::weights() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.weight);
  return out;
}

std::optional<double> TraversalPrefs::weight_of(std::string_view prompt) const {
  for (const auto& e : entries_) {
    if (e.prompt == prompt) return e.weight;
  }
  return std::nullopt;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

TraversalPrefs validate_prefs(std::vector<PromptWeight> entries, PrefsArity arity) {
  if (entries.empty() && arity == PrefsArity::kAtLeastOne) {
    throw Error(Errc::kEmptyPrefs, "at least one prompt-weight pair is required");
  }
  std::unordered_set<std::string> seen;
  for (auto& e : entries) {
    e.prompt = trim(e.prompt);
    if (e.prompt.empty()) {
      throw Error(Errc::kEmptyPrompt, "prompt is empty");
    }
    // NaN fails both comparisons, so test the accepted range positively.
    if (!(e.weight >= -1.0 && e.weight <= 1.0)) {
      throw Error(Errc::kWeightOutOfRange,
                  "weight for '" + e.prompt + "' is " + std::to_string(e.weight) + ", outside [-1, 1]");
    }
    if (!seen.insert(e.prompt).second) {
      throw Error(Errc::kDuplicatePrompt, "prompt '" + e.prompt + "' appears more than once");
    }
  }
  return TraversalPrefs(std::move(entries));
}

TraversalPrefs validate_prefs(const RawPrefs& raw, PrefsArity arity) {
  std::vector<PromptWeight> entries;
  entries.reserve(raw.size());
  for (const auto& [prompt, weight] : raw) entries.push_back({prompt, weight});
  return validate_prefs(std::move(entries), arity);
}

void EngineConfig::validate() const {
  if (!std::isfinite(theta_scene)) {
    throw Error(Errc::kConfigError, "theta_scene must be finite");
  }
  if (!(theta_roi >= 0.0 && theta_roi <= 1.0)) {
    throw Error(Errc::kConfigError, "theta_roi must lie in [0, 1]");
  }
  if (!(theta_trav >= -1.0 && theta_trav <= 1.0)) {
    throw Error(Errc::kConfigError, "theta_trav must lie in [-1, 1]");
  }
  if (!(hoc_timeout_s > 0.0)) {
    throw Error(Errc::kConfigError, "hoc_timeout must be positive");
  }
  validate_roi(roi);
  if (initial_prefs.empty()) {
    throw Error(Errc::kEmptyPrefs, "initial_prefs must contain at least one prompt");
  }
}

namespace {

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point2 p, Point2 a, Point2 b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

int orientation(Point2 o, Point2 a, Point2 b) {
  const double c = cross(o, a, b);
  return (c > 0.0) - (c < 0.0);
}

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  const int d1 = orientation(q1, q2, p1);
  const int d2 = orientation(q1, q2, p2);
  const int d3 = orientation(p1, p2, q1);
  const int d4 = orientation(p1, p2, q2);
  if (d1 != d2 && d3 != d4 && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0) return true;
  if (d1 == 0 && on_segment(p1, q1, q2)) return true;
  if (d2 == 0 && on_segment(p2, q1, q2)) return true;
  if (d3 == 0 && on_segment(q1, p1, p2)) return true;
  if (d4 == 0 && on_segment(q2, p1, p2)) return true;
  return false;
}

bool inside_even_odd(const std::vector<Point2>& poly, double px, double py) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 a = poly[i];
    const Point2 b = poly[j];
    if ((a.y > py) != (b.y > py)) {
      const double x_cross = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
      if (px < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

void validate_roi(const RoiSpec& roi) {
  const auto& poly = roi.polygon;
  if (poly.size() < 3) {
    throw Error(Errc::kInvalidRoi, "ROI '" + roi.name + "' needs at least 3 vertices");
  }
  for (const auto& p : poly) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0)) {
      throw Error(Errc::kInvalidRoi, "ROI '" + roi.name + "' has a vertex outside [0, 1]^2");
    }
  }
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
        throw Error(Errc::kInvalidRoi, "ROI '" + roi.name + "' polygon self-intersects");
      }
    }
  }
}

BinaryMask rasterize_roi(const RoiSpec& roi, int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(Errc::kDimensionMismatch, "raster dimensions must be positive");
  }
  if (roi.polygon.size() < 3) {
    throw Error(Errc::kDegenerateRoi, "ROI '" + roi.name + "' has fewer than 3 vertices");
  }
  std::vector<Point2> poly;
  poly.reserve(roi.polygon.size());
  for (const auto& p : roi.polygon) {
    poly.push_back({std::clamp(p.x, 0.0, 1.0), std::clamp(p.y, 0.0, 1.0)});
  }
  BinaryMask mask(width, height, std::uint8_t{0});
  std::size_t set = 0;
  for (int y = 0; y < height; ++y) {
    const double cy = (y + 0.5) / height;
    for (int x = 0; x < width; ++x) {
      const double cx = (x + 0.5) / width;
      if (inside_even_odd(poly, cx, cy)) {
        mask.at(x, y) = 1;
        ++set;
      }
    }
  }
  if (set == 0) {
    throw Error(Errc::kDegenerateRoi, "ROI '" + roi.name + "' covers no pixel at " +
                                          std::to_string(width) + "x" + std::to_string(height));
  }
  return mask;
}

std::size_t count_set(const BinaryMask& mask) noexcept {
  std::size_t n = 0;
  for (auto v : mask.values()) n += v != 0;
  return n;
}

}  // namespace trailgate
