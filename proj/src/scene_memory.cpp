#include "trailgate/scene_memory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "trailgate/core.hpp"

namespace trailgate {

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::kDimensionMismatch, "embedding dimensions " + std::to_string(a.dim()) + " and " +
                                              std::to_string(b.dim()) + " differ");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw Error(Errc::kZeroVector, "cosine similarity of a zero vector");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) dot += a.values[i] * b.values[i];
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

TraversalPrefs merge_prefs(const TraversalPrefs& base, const TraversalPrefs& update) {
  std::vector<PromptWeight> merged = update.entries();
  std::unordered_set<std::string> in_update;
  for (const auto& e : update) in_update.insert(e.prompt);
  for (const auto& e : base) {
    if (!in_update.contains(e.prompt)) merged.push_back(e);
  }
  return TraversalPrefs(std::move(merged));
}

void SceneMemory::check_dim(const Embedding& e) {
  if (e.dim() == 0) {
    throw Error(Errc::kDimensionMismatch, "empty embedding");
  }
  if (dim_ && *dim_ != e.dim()) {
    throw Error(Errc::kDimensionMismatch, "embedding dimension " + std::to_string(e.dim()) +
                                              " differs from episode dimension " + std::to_string(*dim_));
  }
  dim_ = e.dim();
}

void SceneMemory::set_reference(const Embedding& e) {
  check_dim(e);
  reference_ = e;
}

void SceneMemory::record_hoc(const Embedding& e_t, const TraversalPrefs& prefs, FrameId frame_id,
                             double created_at) {
  check_dim(e_t);
  reference_ = e_t;
  history_.push_back({e_t, prefs, frame_id, created_at});
}

std::optional<HistoryMatch> SceneMemory::find_match(const Embedding& e_t, double theta_scene) const {
  std::optional<HistoryMatch> best;
  for (const auto& entry : history_) {
    const double s = cosine_similarity(e_t, entry.embedding);
    if (!best || s > best->similarity) best = HistoryMatch{entry, s};
  }
  if (best && best->similarity >= theta_scene) return best;
  return std::nullopt;
}

void SceneMemory::save_history(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write history file " + path.string());
  for (const auto& entry : history_) {
    nlohmann::json prefs = nlohmann::json::array();
    for (const auto& pw : entry.prefs) prefs.push_back({{"prompt", pw.prompt}, {"weight", pw.weight}});
    nlohmann::json rec = {{"frame_id", entry.frame_id},
                          {"created_at", entry.created_at},
                          {"embedding", entry.embedding.values},
                          {"prefs", prefs}};
    out << rec.dump() << '\n';
  }
}

SceneMemory SceneMemory::load_history(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot read history file " + path.string());
  SceneMemory memory;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      RawPrefs raw;
      for (const auto& pw : rec.at("prefs")) raw.emplace_back(pw.at("prompt").get<std::string>(),
                                                              pw.at("weight").get<double>());
      Embedding e{rec.at("embedding").get<std::vector<double>>()};
      memory.check_dim(e);
      memory.history_.push_back({std::move(e), validate_prefs(raw, PrefsArity::kAllowEmpty), rec.at("frame_id").get<FrameId>(),
                                 rec.value("created_at", 0.0)});
    } catch (const nlohmann::json::exception& ex) {
      throw Error(Errc::kConfigError, path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return memory;
}

}  // namespace trailgate
