#include "trailgate/engine.hpp"

#include <cmath>

#include "trailgate/core.hpp"
#include "trailgate/mask_ops.hpp"

namespace trailgate {

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::kNoCall: return "NO_CALL";
    case EventKind::kHistoryUpdate: return "HISTORY_UPDATE";
    case EventKind::kHocSceneChange: return "HOC_SCENE_CHANGE";
    case EventKind::kHocUnknownObject: return "HOC_UNKNOWN_OBJECT";
    case EventKind::kAwaitingOperator: return "AWAITING_OPERATOR";
  }
  return "UNKNOWN";
}

bool FrameOutcome::has(EventKind kind) const noexcept {
  for (const auto& e : events) {
    if (e.kind == kind) return true;
  }
  return false;
}

namespace {

double wall_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

Engine::Engine(EngineConfig config, MaskProvider& masks, EmbeddingProvider& embeddings, Operator& op)
    : config_(std::move(config)), masks_(masks), embeddings_(embeddings), operator_(op) {
  config_.validate();
}

Engine::~Engine() { cancel(); }

void Engine::init_episode(const Frame& first_frame) {
  first_frame.validate();
  std::unique_lock lock(mu_);
  config_.validate();
  prefs_ = config_.initial_prefs;
  memory_ = SceneMemory{};
  if (config_.history.reuse_across_episodes && config_.history.persist_path &&
      std::filesystem::exists(*config_.history.persist_path)) {
    memory_ = SceneMemory::load_history(*config_.history.persist_path);
  }
  pending_.reset();
  cancelled_ = false;
  last_frame_.reset();
  cached_embedding_.reset();
  roi_mask_ = rasterize_roi(config_.roi, first_frame.width, first_frame.height);
  memory_.set_reference(embed(first_frame));
  initialized_ = true;
}

Embedding Engine::embed(const Frame& frame) {
  if (cached_embedding_ && cached_embedding_->first == frame.id) return cached_embedding_->second;
  Embedding e = embeddings_.get_embedding(frame);
  conform_embedding(e, memory_.dimension().value_or(0));
  cached_embedding_.emplace(frame.id, e);
  return e;
}

const BinaryMask& Engine::roi_for(int width, int height) {
  if (roi_mask_.width() != width || roi_mask_.height() != height) {
    roi_mask_ = rasterize_roi(config_.roi, width, height);
  }
  return roi_mask_;
}

Engine::Maps Engine::compute_maps(const Frame& frame) {
  const auto prompts = prefs_.prompts();
  auto masks = masks_.get_masks(frame, prompts);
  conform_masks(masks, frame, prompts.size());
  Maps maps{prefs_, weighted_max_pool(masks, prefs_), uncertainty_map(masks), 0.0};
  maps.u_roi = roi_uncertainty_score(maps.unc, roi_for(frame.width, frame.height));
  return maps;
}

void Engine::apply_staged() {
  std::lock_guard staged(staged_mu_);
  if (staged_theta_scene_) config_.theta_scene = *std::exchange(staged_theta_scene_, std::nullopt);
  if (staged_theta_roi_) config_.theta_roi = *std::exchange(staged_theta_roi_, std::nullopt);
}

void Engine::stage_thresholds(std::optional<double> theta_scene, std::optional<double> theta_roi) {
  if (theta_scene && !std::isfinite(*theta_scene)) {
    throw Error(Errc::kConfigError, "theta_scene must be finite");
  }
  if (theta_roi && !(*theta_roi >= 0.0 && *theta_roi <= 1.0)) {
    throw Error(Errc::kConfigError, "theta_roi must lie in [0, 1]");
  }
  std::lock_guard staged(staged_mu_);
  if (theta_scene) staged_theta_scene_ = theta_scene;
  if (theta_roi) staged_theta_roi_ = theta_roi;
}

std::uint64_t Engine::issue(HocReason reason, const Frame& frame, const Maps& maps, const Embedding& e,
                            std::unique_lock<std::mutex>& /*held*/) {
  const std::uint64_t id = next_request_id_++;
  pending_ = Pending{HocRequest{id, frame.id, reason, frame, maps.pooled, maps.unc, maps.u_roi, prefs_}, e,
                     std::chrono::steady_clock::now()};
  if (auto answer = operator_.on_request(pending_->request)) {
    if (answer->request_id == 0) answer->request_id = id;
    resolve_locked(*answer);
  }
  return id;
}

bool Engine::await_pending(std::unique_lock<std::mutex>& lock) {
  if (!pending_) return true;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(config_.hoc_timeout_s));
  resolved_cv_.wait_until(lock, deadline, [this] { return !pending_ || cancelled_; });
  return !pending_;
}

HocResolution Engine::resolve_hoc(const HocResponse& response) {
  HocResolution resolution;
  {
    std::lock_guard lock(mu_);
    resolution = resolve_locked(response);
  }
  resolved_cv_.notify_all();
  return resolution;
}

HocResolution Engine::resolve_locked(const HocResponse& response) {
  if (!pending_) {
    throw Error(Errc::kNoPendingRequest, "no operator call is pending");
  }
  if (response.request_id != 0 && response.request_id != pending_->request.request_id) {
    throw Error(Errc::kNoPendingRequest, "request " + std::to_string(response.request_id) + " is not pending");
  }
  const TraversalPrefs update = validate_prefs(response.prefs, PrefsArity::kAllowEmpty);
  const auto& req = pending_->request;
  prefs_ = merge_prefs(prefs_, update);
  const double created_at = req.frame.timestamp.value_or(wall_seconds());
  memory_.record_hoc(pending_->embedding, prefs_, req.frame_id, created_at);

  HocResolution resolution{req.request_id, req.frame_id, req.reason, update, prefs_, response.responder, 0.0};
  resolution.latency_s = response.latency_s.value_or(
      std::chrono::duration<double>(std::chrono::steady_clock::now() - pending_->issued).count());
  pending_.reset();
  operator_.on_resolved(resolution);
  return resolution;
}

FrameOutcome Engine::finish(FrameOutcome out, const Maps& maps, bool fail_safe) {
  out.pooled = maps.pooled;
  out.unc = maps.unc;
  out.u_roi_final = maps.u_roi;
  out.prefs_after = prefs_;
  out.fail_safe = fail_safe;
  out.binary = fail_safe ? BinaryMask(maps.pooled.width(), maps.pooled.height(), std::uint8_t{0})
                         : binarize(maps.pooled, config_.theta_trav);
  return out;
}

FrameOutcome Engine::step(const Frame& frame) {
  frame.validate();
  std::unique_lock lock(mu_);
  if (!initialized_) {
    throw Error(Errc::kInvalidArgument, "step() before init_episode()");
  }
  if (last_frame_ && frame.id <= *last_frame_) {
    throw Error(Errc::kInvalidArgument, "frame id " + std::to_string(frame.id) +
                                            " does not follow " + std::to_string(*last_frame_));
  }
  apply_staged();
  last_frame_ = frame.id;

  FrameOutcome out;
  out.frame_id = frame.id;

  // An unanswered call from an earlier frame blocks gating until it resolves.
  if (pending_) {
    const auto waiting_for = pending_->request.request_id;
    if (!await_pending(lock)) {
      const Embedding e = embed(frame);
      out.scene_similarity = cosine_similarity(e, *memory_.reference());
      Maps maps = compute_maps(frame);
      out.u_roi = maps.u_roi;
      out.events.push_back({EventKind::kAwaitingOperator, {}, {}, waiting_for, true});
      return finish(std::move(out), maps, true);
    }
  }

  const Embedding e = embed(frame);
  const double s_t = cosine_similarity(e, *memory_.reference());
  out.scene_similarity = s_t;

  std::optional<Maps> maps;
  if (s_t < config_.theta_scene) {
    if (auto match = memory_.find_match(e, config_.theta_scene)) {
      prefs_ = merge_prefs(prefs_, match->entry.prefs);
      memory_.set_reference(e);
      out.events.push_back({EventKind::kHistoryUpdate, match->entry.frame_id, match->similarity, {}, false});
    } else {
      maps = compute_maps(frame);
      const auto id = issue(HocReason::kSceneChange, frame, *maps, e, lock);
      const bool answered = await_pending(lock);
      out.events.push_back({EventKind::kHocSceneChange, {}, {}, id, !answered});
      if (!answered) {
        out.u_roi = maps->u_roi;
        return finish(std::move(out), *maps, true);
      }
    }
  }

  if (!maps || maps->prefs != prefs_) maps = compute_maps(frame);
  out.u_roi = maps->u_roi;

  if (maps->u_roi > config_.theta_roi) {
    const auto id = issue(HocReason::kUnknownObject, frame, *maps, e, lock);
    const bool answered = await_pending(lock);
    out.events.push_back({EventKind::kHocUnknownObject, {}, {}, id, !answered});
    if (!answered) return finish(std::move(out), *maps, true);
    // Single recompute with the updated prompts; no further gating this frame.
    if (maps->prefs != prefs_) maps = compute_maps(frame);
  }
  return finish(std::move(out), *maps, false);
}

std::optional<HocRequest> Engine::pending() const {
  std::lock_guard lock(mu_);
  if (!pending_) return std::nullopt;
  return pending_->request;
}

TraversalPrefs Engine::prefs() const {
  std::lock_guard lock(mu_);
  return prefs_;
}

SceneMemory Engine::memory() const {
  std::lock_guard lock(mu_);
  return memory_;
}

EngineConfig Engine::config() const {
  std::lock_guard lock(mu_);
  return config_;
}

void Engine::cancel() {
  {
    std::lock_guard lock(mu_);
    cancelled_ = true;
  }
  resolved_cv_.notify_all();
}

void Engine::shutdown() {
  std::lock_guard lock(mu_);
  if (config_.history.persist_path) memory_.save_history(*config_.history.persist_path);
}

}  // namespace trailgate
