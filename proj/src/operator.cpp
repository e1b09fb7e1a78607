#include "trailgate/operator.hpp"

#include <fmt/format.h>

#include "trailgate/config.hpp"
#include "yaml_util.hpp"

namespace trailgate {

std::string_view to_string(HocReason reason) noexcept {
  switch (reason) {
    case HocReason::kSceneChange: return "SCENE_CHANGE";
    case HocReason::kUnknownObject: return "UNKNOWN_OBJECT";
  }
  return "UNKNOWN";
}

ScriptedOperator ScriptedOperator::from_file(const std::filesystem::path& path) {
  ScriptedOperator op;
  try {
    YAML::Node root;
    try {
      root = YAML::Load(read_text_file(path));
    } catch (const YAML::Exception& ex) {
      detail::config_error("", ex.what());
    }
    if (root.IsNull()) return op;
    if (!root.IsMap()) detail::config_error("", "expected a map with by_frame, sequence or fallback");
    if (root["responder"]) op.responder(detail::as_string(root["responder"], "responder"));
    if (const auto by_frame = root["by_frame"]) {
      for (std::size_t i = 0; i < by_frame.size(); ++i) {
        const std::string at = fmt::format("by_frame[{}]", i);
        const auto frame = static_cast<FrameId>(detail::as_double(by_frame[i]["frame"], at + ".frame"));
        op.answer_frame(frame, detail::parse_raw_prefs(by_frame[i]["prefs"], at + ".prefs"));
      }
    }
    if (const auto seq = root["sequence"]) {
      for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto item = seq[i];
        const std::string at = fmt::format("sequence[{}]", i);
        op.then(detail::parse_raw_prefs(item.IsMap() ? item["prefs"] : item, at + ".prefs"));
      }
    }
    if (root["fallback"]) op.otherwise(detail::parse_raw_prefs(root["fallback"], "fallback"));
  } catch (const Error& err) {
    if (err.code() == Errc::kIoError) throw;
    throw Error(err.code(), path.string() + ": " + err.message());
  }
  return op;
}

ScriptedOperator& ScriptedOperator::answer_frame(FrameId frame, RawPrefs prefs) {
  by_frame_[frame] = std::move(prefs);
  return *this;
}

ScriptedOperator& ScriptedOperator::then(RawPrefs prefs) {
  sequence_.push_back(std::move(prefs));
  return *this;
}

ScriptedOperator& ScriptedOperator::otherwise(RawPrefs prefs) {
  fallback_ = std::move(prefs);
  return *this;
}

ScriptedOperator& ScriptedOperator::responder(std::string name) {
  responder_ = std::move(name);
  return *this;
}

std::optional<HocResponse> ScriptedOperator::on_request(const HocRequest& request) {
  ++calls_;
  reasons_.push_back(request.reason);
  HocResponse response{request.request_id, {}, responder_, 0.0};
  if (const auto it = by_frame_.find(request.frame_id); it != by_frame_.end()) {
    response.prefs = it->second;
  } else if (next_ < sequence_.size()) {
    response.prefs = sequence_[next_++];
  } else {
    response.prefs = fallback_;
  }
  return response;
}

}  // namespace trailgate
