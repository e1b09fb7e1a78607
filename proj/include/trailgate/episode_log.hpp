#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "trailgate/engine.hpp"
#include "trailgate/episode.hpp"

namespace trailgate {

/// One log line per frame. Only deterministic fields are written, so two runs
/// over the same inputs produce byte-identical logs.
///
///   {"frame_id", "s_t", "u_roi", "u_roi_final", "event", "events": [...],
///    "fail_safe", "traversable_px", "prefs": [{"prompt", "weight"}]}
nlohmann::json outcome_record(const FrameOutcome& outcome);

nlohmann::json prefs_json(const TraversalPrefs& prefs);

/// Append-only JSON-lines writer.
class EpisodeLog {
 public:
  explicit EpisodeLog(const std::filesystem::path& path);

  void append(const nlohmann::json& record);
  void append(const FrameOutcome& outcome) { append(outcome_record(outcome)); }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Reads a JSON-lines file; blank lines are skipped.
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

using OutcomeSink = std::function<void(std::size_t index, const FrameOutcome& outcome)>;

/// Drives an engine over every frame of the episode: init on the first frame,
/// then step each frame in order. Returns the number of frames processed.
std::size_t run_episode(const EpisodeSource& source, Engine& engine, const OutcomeSink& sink);

}  // namespace trailgate
