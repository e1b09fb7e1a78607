#include "trailgate/episode_log.hpp"


#include "trailgate/core.hpp"

namespace trailgate {

using nlohmann::json;

json prefs_json(const TraversalPrefs& prefs) {
  json out = json::array();
  for (const auto& pw : prefs) out.push_back({{"prompt", pw.prompt}, {"weight", pw.weight}});
  return out;
}

json outcome_record(const FrameOutcome& outcome) {
  json events = json::array();
  for (const auto& ev : outcome.events) {
    json e = {{"kind", to_string(ev.kind)}};
    if (ev.matched_frame) e["matched_frame"] = *ev.matched_frame;
    if (ev.match_similarity) e["similarity"] = *ev.match_similarity;
    if (ev.request_id) e["request_id"] = *ev.request_id;
    if (ev.timed_out) e["timed_out"] = true;
    events.push_back(std::move(e));
  }
  return {{"frame_id", outcome.frame_id},
          {"s_t", outcome.scene_similarity},
          {"u_roi", outcome.u_roi},
          {"u_roi_final", outcome.u_roi_final},
          {"event", to_string(outcome.event())},
          {"events", std::move(events)},
          {"fail_safe", outcome.fail_safe},
          {"traversable_px", count_set(outcome.binary)},
          {"prefs", prefs_json(outcome.prefs_after)}};
}

EpisodeLog::EpisodeLog(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw Error(Errc::kIoError, "cannot write " + path.string());
}

void EpisodeLog::append(const json& record) {
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw Error(Errc::kIoError, "write to " + path_.string() + " failed");
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot read " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& ex) {
      throw Error(Errc::kDecodeError, path.string() + ":" + std::to_string(n) + ": " + ex.what());
    }
  }
  return out;
}

std::size_t run_episode(const EpisodeSource& source, Engine& engine, const OutcomeSink& sink) {
  if (source.size() == 0) throw Error(Errc::kEmptyInput, "episode '" + source.name() + "' has no frames");
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Frame frame = source.frame(i);
    if (i == 0) engine.init_episode(frame);
    const FrameOutcome outcome = engine.step(frame);
    if (sink) sink(i, outcome);
  }
  return source.size();
}

}  // namespace trailgate
