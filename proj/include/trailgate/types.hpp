#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trailgate/error.hpp"

namespace trailgate {

using FrameId = std::uint64_t;

/// One RGB camera image. Pixels are interleaved 8-bit RGB, row-major.
struct Frame {
  FrameId id = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  std::optional<double> timestamp;

  /// Throws kDimensionMismatch when the buffer does not match width x height x 3.
  void validate() const;
};

struct PromptWeight {
  std::string prompt;
  double weight = 0.0;

  friend bool operator==(const PromptWeight&, const PromptWeight&) = default;
};

using RawPrefs = std::vector<std::pair<std::string, double>>;

/// Operator partial updates may be empty; engine preferences may not.
enum class PrefsArity { kAtLeastOne, kAllowEmpty };

class TraversalPrefs;
TraversalPrefs validate_prefs(std::vector<PromptWeight> entries, PrefsArity arity);
TraversalPrefs merge_prefs(const TraversalPrefs& base, const TraversalPrefs& update);

/// Ordered prompt -> weight pairs with unique prompts and weights in [-1, 1].
/// Only validate_prefs() and merge_prefs() construct non-empty instances, so a
/// TraversalPrefs value always satisfies its invariants.
class TraversalPrefs {
 public:
  TraversalPrefs() = default;

  const std::vector<PromptWeight>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  std::vector<std::string> prompts() const;
  std::vector<double> weights() const;
  std::optional<double> weight_of(std::string_view prompt) const;
  bool contains(std::string_view prompt) const { return weight_of(prompt).has_value(); }

  friend bool operator==(const TraversalPrefs&, const TraversalPrefs&) = default;

 private:
  friend TraversalPrefs validate_prefs(std::vector<PromptWeight>, PrefsArity);
  friend TraversalPrefs merge_prefs(const TraversalPrefs&, const TraversalPrefs&);

  explicit TraversalPrefs(std::vector<PromptWeight> entries) : entries_(std::move(entries)) {}

  std::vector<PromptWeight> entries_;
};

/// Dense row-major 2-D grid. The tag distinguishes maps that share a storage
/// type but carry different value-range contracts.
template <typename Tag, typename T = double>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        values_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width < 0 || height < 0) {
      throw Error(Errc::kDimensionMismatch, "negative grid dimensions");
    }
  }
  Grid(int width, int height, std::vector<T> values)
      : width_(width), height_(height), values_(std::move(values)) {
    if (width < 0 || height < 0 ||
        values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw Error(Errc::kDimensionMismatch, "grid value count does not match dimensions");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }
  T& at(int x, int y) { return values_[index(x, y)]; }
  const T& at(int x, int y) const { return values_[index(x, y)]; }

  std::span<T> values() & noexcept { return values_; }
  std::span<const T> values() const& noexcept { return values_; }
  /// Views into a temporary would dangle.
  void values() && = delete;

  template <typename OtherTag, typename U>
  bool same_shape(const Grid<OtherTag, U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

struct AttentionTag {};
struct PooledTag {};
struct UncertaintyTag {};
struct BinaryTag {};
struct IgnoreTag {};

/// Per-prompt model response, values in [0, 1].
using AttentionMap = Grid<AttentionTag>;
/// Signed pooled traversability evidence, values in [-1, 1].
using PooledMap = Grid<PooledTag>;
/// 1 - max attention, values in [0, 1].
using UncertaintyMap = Grid<UncertaintyTag>;
using BinaryMask = Grid<BinaryTag, std::uint8_t>;
/// Pixels excluded from scoring (1 = ignored).
using IgnoreMask = Grid<IgnoreTag, std::uint8_t>;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Vehicle-specific region of interest as a polygon in normalized image
/// coordinates (origin top-left, x right, y down).
struct RoiSpec {
  std::string name;
  std::vector<Point2> polygon;

  friend bool operator==(const RoiSpec&, const RoiSpec&) = default;
};

struct Embedding {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  double norm() const noexcept;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

struct HistoryOptions {
  /// Written on shutdown when set.
  std::optional<std::string> persist_path;
  /// Load entries from persist_path at episode start. Off by default: history
  /// is scoped to one episode.
  bool reuse_across_episodes = false;

  friend bool operator==(const HistoryOptions&, const HistoryOptions&) = default;
};

struct EngineConfig {
  double theta_scene = 0.925;
  double theta_roi = 0.5;
  double theta_trav = 0.0;
  RoiSpec roi;
  TraversalPrefs initial_prefs;
  double hoc_timeout_s = 60.0;
  HistoryOptions history;

  /// Throws kConfigError on out-of-range thresholds, kInvalidRoi on a bad
  /// polygon and kEmptyPrefs when no prompt is configured.
  void validate() const;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

}  // namespace trailgate
