#pragma once

#include <atomic>
#include <memory>
#include <string>

#include <json.hpp>

#include "trailgate/providers/provider.hpp"

namespace trailgate {

/// JSON wire protocol spoken with the model sidecar.
///
///   POST /v1/masks  {"image": <base64 PNG>, "prompts": [string]}
///                -> {"width": W, "height": H, "masks": [<base64 float32 LE, row-major>]}
///   POST /v1/embed  {"image": <base64 PNG>}
///                -> {"dim": D, "values": [number]}
///   GET  /v1/health -> {"status": "ok"}
///   errors: HTTP 4xx/5xx with {"error": string}
namespace wire {

nlohmann::json masks_request(const Frame& frame, std::span<const std::string> prompts);
nlohmann::json embed_request(const Frame& frame);

nlohmann::json masks_response(const std::vector<AttentionMap>& masks);
nlohmann::json embed_response(const Embedding& e);

/// Decodes a masks response at its native resolution. Throws
/// kMalformedResponse on missing fields, wrong counts or bad payloads.
std::vector<AttentionMap> parse_masks_response(const nlohmann::json& body, std::size_t prompt_count);
Embedding parse_embed_response(const nlohmann::json& body);

}  // namespace wire

/// Client for a sidecar speaking the wire protocol. Maps at a resolution other
/// than the frame's are bilinearly resampled to frame size. The endpoint can
/// be overridden with the TRAILGATE_PROVIDER_URL environment variable.
class RemoteProvider final : public MaskProvider, public EmbeddingProvider {
 public:
  explicit RemoteProvider(std::string endpoint, double timeout_s = 30.0);
  ~RemoteProvider() override;

  RemoteProvider(const RemoteProvider&) = delete;
  RemoteProvider& operator=(const RemoteProvider&) = delete;

  std::vector<AttentionMap> get_masks(const Frame& frame, std::span<const std::string> prompts) override;
  Embedding get_embedding(const Frame& frame) override;

  bool healthy();
  const std::string& endpoint() const noexcept { return endpoint_; }

  /// Resolves the endpoint, giving TRAILGATE_PROVIDER_URL precedence.
  static std::string resolve_endpoint(const std::string& configured);

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body);

  struct Client;
  std::string endpoint_;
  std::unique_ptr<Client> client_;
  std::optional<std::size_t> dim_;
  std::atomic<std::uint64_t> next_request_id_{1};
};

/// In-process server for the wire protocol backed by any pair of providers.
/// Frames decoded from requests get a content-hash id, so identical images
/// map to identical outputs. Used as a model-free sidecar stand-in.
class ProtocolServer {
 public:
  ProtocolServer(MaskProvider& masks, EmbeddingProvider& embeddings);
  ~ProtocolServer();

  ProtocolServer(const ProtocolServer&) = delete;
  ProtocolServer& operator=(const ProtocolServer&) = delete;

  /// Binds host:port (0 picks a free port) and serves on a background thread.
  /// Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();
  int port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace trailgate
