#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trailgate/config.hpp"
#include "trailgate/episode.hpp"
#include "trailgate/image_io.hpp"
#include "trailgate/operator.hpp"

namespace trailgate {

enum class ClassRole { kTraversable, kNonTraversable, kIgnore };

std::string_view to_string(ClassRole role) noexcept;

/// Ground-truth class table for one dataset. Classes are keyed by integer id
/// (gray annotations) or by RGB color (palette annotations).
struct LabelMapping {
  enum class Encoding { kId, kRgb };

  struct Class {
    std::uint32_t code = 0;
    std::string name;
    ClassRole role = ClassRole::kIgnore;
  };

  std::string dataset;
  Encoding encoding = Encoding::kId;
  std::vector<Class> classes;

  std::optional<ClassRole> role_of(std::uint32_t code) const;
};

/// Parses the mapping YAML; kConfigError messages name the first bad entry,
/// e.g. "classes[3].role: unknown role 'road'".
LabelMapping parse_label_mapping(std::string_view yaml_text);
LabelMapping load_label_mapping(const std::filesystem::path& path);

struct Annotation {
  BinaryMask traversable;
  IgnoreMask ignore;
};

/// Applies the mapping to a decoded raster, resampling nearest-neighbor to
/// width x height. Throws kUnmappedClass listing every unmapped code.
Annotation map_annotation(const LabelRaster& raster, const LabelMapping& mapping, int width, int height);
Annotation load_annotation(const std::filesystem::path& path, const LabelMapping& mapping, int width, int height);

/// Pixel counts with class 1 = traversable. Ignored pixels are counted apart
/// and never enter an IoU.
struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
  std::uint64_t ignored = 0;

  void add(const BinaryMask& pred, const BinaryMask& gt, const IgnoreMask& ignore);
  Confusion& operator+=(const Confusion& other);

  /// IoU of a class is 1 when its union is empty.
  double iou_traversable() const noexcept;
  double iou_non_traversable() const noexcept;
  double miou() const noexcept;
};

struct MiouResult {
  double iou_traversable = 0.0;
  double iou_non_traversable = 0.0;
  double miou = 0.0;
};

MiouResult miou(const BinaryMask& pred, const BinaryMask& gt, const IgnoreMask& ignore);

struct EvalReport {
  std::string dataset;
  std::string episode;
  std::size_t frames = 0;
  std::size_t frames_scored = 0;
  Confusion confusion;
  double miou = 0.0;
  double iou_traversable = 0.0;
  double iou_non_traversable = 0.0;
  std::vector<std::pair<FrameId, double>> per_frame_miou;
  std::string config_yaml;

  nlohmann::json to_json() const;
};

/// Runs the engine over the episode and scores every annotated frame,
/// accumulating pixel counts across the whole episode.
EvalReport run_episode_eval(const EpisodeSource& source, const AppConfig& config, const LabelMapping& mapping,
                            Operator& op, const ProviderPair& providers);
EvalReport run_episode_eval(const EpisodeSource& source, const AppConfig& config, const LabelMapping& mapping,
                            Operator& op);

struct SweepRow {
  FrameId frame_id = 0;
  std::uint64_t scene_calls_cum = 0;
  std::uint64_t roi_calls_cum = 0;
  std::uint64_t history_updates_cum = 0;
};

struct HocSweepResult {
  double threshold = 0.0;
  std::vector<SweepRow> rows;

  std::uint64_t total_scene_calls() const noexcept { return rows.empty() ? 0 : rows.back().scene_calls_cum; }
  std::uint64_t total_roi_calls() const noexcept { return rows.empty() ? 0 : rows.back().roi_calls_cum; }
  std::uint64_t total_history_updates() const noexcept {
    return rows.empty() ? 0 : rows.back().history_updates_cum;
  }
  std::uint64_t total_operator_calls() const noexcept { return total_scene_calls() + total_roi_calls(); }
};

using OperatorFactory = std::function<std::unique_ptr<Operator>()>;

/// One full engine run per scene threshold, each with fresh providers and a
/// fresh operator. Runs execute on up to `jobs` threads; results keep the
/// order of `thresholds`.
std::vector<HocSweepResult> run_hoc_sweep(const EpisodeSource& source, const AppConfig& config,
                                          const std::vector<double>& thresholds, const OperatorFactory& make_operator,
                                          unsigned jobs = 1);

/// Header: threshold,frame_id,scene_calls_cum,roi_calls_cum,history_updates_cum
void write_sweep_csv(std::ostream& out, const std::vector<HocSweepResult>& results);
std::string sweep_csv(const std::vector<HocSweepResult>& results);

/// Parses "0.85,0.9,0.925"; throws kInvalidArgument on bad items.
std::vector<double> parse_threshold_list(std::string_view text);

}  // namespace trailgate
