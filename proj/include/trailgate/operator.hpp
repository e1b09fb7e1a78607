#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trailgate/types.hpp"

namespace trailgate {

enum class HocReason { kSceneChange, kUnknownObject };

std::string_view to_string(HocReason reason) noexcept;

/// Snapshot handed to the operator when the engine needs a preference update.
struct HocRequest {
  std::uint64_t request_id = 0;
  FrameId frame_id = 0;
  HocReason reason = HocReason::kSceneChange;
  Frame frame;
  PooledMap pooled;
  UncertaintyMap unc;
  double u_roi = 0.0;
  TraversalPrefs prefs;
};

/// Operator answer. prefs is a partial update and may be empty; it is
/// validated when applied. request_id 0 addresses whichever request is
/// pending.
struct HocResponse {
  std::uint64_t request_id = 0;
  RawPrefs prefs;
  std::string responder;
  std::optional<double> latency_s;
};

/// What the engine applied for one answered request.
struct HocResolution {
  std::uint64_t request_id = 0;
  FrameId frame_id = 0;
  HocReason reason = HocReason::kSceneChange;
  TraversalPrefs update;
  TraversalPrefs prefs_after;
  std::string responder;
  double latency_s = 0.0;
};

/// Front end that answers operator calls. Returning a response answers
/// synchronously; returning nullopt means the answer arrives later through
/// Engine::resolve_hoc() from another thread. Implementations must not call
/// back into the engine from these hooks.
class Operator {
 public:
  virtual ~Operator() = default;
  virtual std::optional<HocResponse> on_request(const HocRequest& request) = 0;
  virtual void on_resolved(const HocResolution&) {}
};

/// Deterministic operator for replays, sweeps and tests.
///
/// Lookup order per request: an entry keyed by the request's frame id, then
/// the next unused entry of the sequence, then the fallback (empty by
/// default, which acknowledges the scene without changing preferences).
class ScriptedOperator final : public Operator {
 public:
  ScriptedOperator() = default;

  static ScriptedOperator from_file(const std::filesystem::path& path);

  ScriptedOperator& answer_frame(FrameId frame, RawPrefs prefs);
  ScriptedOperator& then(RawPrefs prefs);
  ScriptedOperator& otherwise(RawPrefs prefs);
  ScriptedOperator& responder(std::string name);

  std::optional<HocResponse> on_request(const HocRequest& request) override;

  std::size_t calls() const noexcept { return calls_; }
  const std::vector<HocReason>& reasons() const noexcept { return reasons_; }

 private:
  std::map<FrameId, RawPrefs> by_frame_;
  std::vector<RawPrefs> sequence_;
  std::size_t next_ = 0;
  RawPrefs fallback_;
  std::string responder_ = "scripted";
  std::size_t calls_ = 0;
  std::vector<HocReason> reasons_;
};

}  // namespace trailgate
