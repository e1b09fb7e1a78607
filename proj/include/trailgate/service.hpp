#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "trailgate/config.hpp"
#include "trailgate/episode.hpp"

namespace trailgate {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  /// 0 binds a free port.
  int port = 0;
  /// Static files served under "/"; empty disables static hosting.
  std::filesystem::path console_dir;
  /// Optional copy of the episode log on disk.
  std::optional<std::filesystem::path> log_path;
  /// Pause between frames so a human can follow along.
  double frame_interval_s = 0.0;
  /// Width cap for preview images embedded in events.
  int preview_width = 320;
  /// Recent frames kept for GET /frames/{id}/{layer}.
  std::size_t frames_retained = 64;
  unsigned io_threads = 2;
};

/// HTTP + WebSocket front end that runs one episode and hands operator calls
/// to connected humans.
///
/// REST:
///   GET  /state                    engine status, thresholds, pending call
///   GET  /episode/log              JSON lines, one record per processed frame
///   POST /hoc/resolve              {"request_id"?, "prefs": [[prompt, weight]], "responder"?}
///                                  409 when nothing (or another id) is pending,
///                                  422 when the update fails validation
///   POST /config/thresholds        {"theta_scene"?, "theta_roi"?}, applied at the next frame
///   GET  /frames/{id}/{layer}      full-resolution PNG; layer = frame|pooled|unc|binary
/// WebSocket:
///   /events[?last_event_id=N]      every event with id > N, then live events
///   message: {"id": n, "type": frame_outcome|hoc_pending|hoc_resolved|episode_done|error, "data": {...}}
class OperatorService {
 public:
  OperatorService(std::shared_ptr<const EpisodeSource> source, AppConfig config, ProviderPair providers,
                  ServiceOptions options = {});
  ~OperatorService();

  OperatorService(const OperatorService&) = delete;
  OperatorService& operator=(const OperatorService&) = delete;

  /// Binds and starts serving; the episode starts running immediately.
  /// Returns the bound port. Throws kIoError when the port is taken.
  int start();
  /// Blocks until the episode finishes or the timeout expires.
  bool wait_done(std::chrono::milliseconds timeout);
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait_stopped();
  void stop();

  int port() const noexcept;
  /// Snapshot of every event published so far.
  std::vector<nlohmann::json> events() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace trailgate
