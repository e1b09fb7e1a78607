#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <vector>

#include "trailgate/operator.hpp"
#include "trailgate/providers/provider.hpp"
#include "trailgate/scene_memory.hpp"
#include "trailgate/types.hpp"

namespace trailgate {

enum class EventKind {
  kNoCall,
  kHistoryUpdate,
  kHocSceneChange,
  kHocUnknownObject,
  /// Frame skipped gating because an earlier operator call is still open.
  kAwaitingOperator,
};

std::string_view to_string(EventKind kind) noexcept;

struct FrameEvent {
  EventKind kind = EventKind::kNoCall;
  /// HISTORY_UPDATE only.
  std::optional<FrameId> matched_frame;
  std::optional<double> match_similarity;
  /// Operator calls only.
  std::optional<std::uint64_t> request_id;
  bool timed_out = false;

  friend bool operator==(const FrameEvent&, const FrameEvent&) = default;
};

struct FrameOutcome {
  FrameId frame_id = 0;
  PooledMap pooled;
  BinaryMask binary;
  UncertaintyMap unc;
  /// ROI uncertainty that decided the unknown-object gate.
  double u_roi = 0.0;
  /// ROI uncertainty of the returned maps (differs from u_roi only after an
  /// operator update changed the prompts).
  double u_roi_final = 0.0;
  double scene_similarity = 0.0;
  /// At most one scene event followed by at most one unknown-object call.
  std::vector<FrameEvent> events;
  TraversalPrefs prefs_after;
  /// Set when an operator call timed out; binary is then all zeros.
  bool fail_safe = false;

  /// Last event of the frame, or NO_CALL.
  EventKind event() const noexcept { return events.empty() ? EventKind::kNoCall : events.back().kind; }
  bool has(EventKind kind) const noexcept;
};

/// Per-episode traversability state machine.
///
/// Per frame: embed, compare with the reference scene, consult history or
/// call the operator on a scene change, pool the prompt masks, and call the
/// operator again if the ROI is too uncertain. step() runs on one thread;
/// resolve_hoc(), pending() and stage_thresholds() may be called from others.
class Engine {
 public:
  Engine(EngineConfig config, MaskProvider& masks, EmbeddingProvider& embeddings, Operator& op);
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  void init_episode(const Frame& first_frame);
  FrameOutcome step(const Frame& frame);

  /// Applies an operator answer to the pending request.
  /// Throws kNoPendingRequest, or a validation error that leaves the request
  /// pending.
  HocResolution resolve_hoc(const HocResponse& response);

  std::optional<HocRequest> pending() const;
  TraversalPrefs prefs() const;
  SceneMemory memory() const;
  EngineConfig config() const;
  const BinaryMask& roi_mask() const noexcept { return roi_mask_; }

  /// Threshold changes take effect at the start of the next step().
  void stage_thresholds(std::optional<double> theta_scene, std::optional<double> theta_roi);

  /// Wakes a step() blocked on the operator; it returns a fail-safe outcome.
  void cancel();

  /// Writes history when persistence is configured.
  void shutdown();

 private:
  struct Maps {
    TraversalPrefs prefs;
    PooledMap pooled;
    UncertaintyMap unc;
    double u_roi = 0.0;
  };

  struct Pending {
    HocRequest request;
    Embedding embedding;
    std::chrono::steady_clock::time_point issued;
  };

  Embedding embed(const Frame& frame);
  Maps compute_maps(const Frame& frame);
  const BinaryMask& roi_for(int width, int height);
  std::uint64_t issue(HocReason reason, const Frame& frame, const Maps& maps, const Embedding& e,
                      std::unique_lock<std::mutex>& lock);
  bool await_pending(std::unique_lock<std::mutex>& lock);
  HocResolution resolve_locked(const HocResponse& response);
  FrameOutcome finish(FrameOutcome out, const Maps& maps, bool fail_safe);
  void apply_staged();

  EngineConfig config_;
  MaskProvider& masks_;
  EmbeddingProvider& embeddings_;
  Operator& operator_;

  mutable std::mutex mu_;
  std::condition_variable resolved_cv_;
  bool initialized_ = false;
  bool cancelled_ = false;
  TraversalPrefs prefs_;
  SceneMemory memory_;
  BinaryMask roi_mask_;
  std::optional<FrameId> last_frame_;
  std::optional<std::pair<FrameId, Embedding>> cached_embedding_;
  std::optional<Pending> pending_;
  std::uint64_t next_request_id_ = 1;

  std::mutex staged_mu_;
  std::optional<double> staged_theta_scene_;
  std::optional<double> staged_theta_roi_;
};

}  // namespace trailgate
