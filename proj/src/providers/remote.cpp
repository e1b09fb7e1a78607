#include "trailgate/providers/remote.hpp"

#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "trailgate/image_io.hpp"

namespace trailgate {

namespace wire {

using nlohmann::json;

json masks_request(const Frame& frame, std::span<const std::string> prompts) {
  return {{"image", base64_encode(frame_to_png(frame))},
          {"prompts", std::vector<std::string>(prompts.begin(), prompts.end())}};
}

json embed_request(const Frame& frame) { return {{"image", base64_encode(frame_to_png(frame))}}; }

json masks_response(const std::vector<AttentionMap>& masks) {
  json out = {{"width", masks.empty() ? 0 : masks.front().width()},
              {"height", masks.empty() ? 0 : masks.front().height()},
              {"masks", json::array()}};
  for (const auto& m : masks) out["masks"].push_back(base64_encode(pack_f32le(m.values())));
  return out;
}

json embed_response(const Embedding& e) { return {{"dim", e.dim()}, {"values", e.values}}; }

std::vector<AttentionMap> parse_masks_response(const json& body, std::size_t prompt_count) {
  try {
    const int w = body.at("width").get<int>();
    const int h = body.at("height").get<int>();
    const auto& masks = body.at("masks");
    if (w < 1 || h < 1) throw Error(Errc::kMalformedResponse, "non-positive map dimensions");
    if (!masks.is_array() || masks.size() != prompt_count) {
      throw Error(Errc::kMalformedResponse, "expected " + std::to_string(prompt_count) + " masks");
    }
    std::vector<AttentionMap> out;
    for (const auto& m : masks) {
      auto values = unpack_f32le(base64_decode(m.get<std::string>()));
      if (values.size() != static_cast<std::size_t>(w) * h) {
        throw Error(Errc::kMalformedResponse, "mask payload does not match width x height");
      }
      out.emplace_back(w, h, std::move(values));
    }
    return out;
  } catch (const json::exception& ex) {
    throw Error(Errc::kMalformedResponse, std::string("masks response: ") + ex.what());
  } catch (const Error& ex) {
    if (ex.code() == Errc::kDecodeError) throw Error(Errc::kMalformedResponse, ex.message());
    throw;
  }
}

Embedding parse_embed_response(const json& body) {
  try {
    Embedding e{body.at("values").get<std::vector<double>>()};
    if (body.contains("dim") && body.at("dim").get<std::size_t>() != e.dim()) {
      throw Error(Errc::kMalformedResponse, "dim field disagrees with values length");
    }
    return e;
  } catch (const json::exception& ex) {
    throw Error(Errc::kMalformedResponse, std::string("embed response: ") + ex.what());
  }
}

}  // namespace wire

struct RemoteProvider::Client {
  httplib::Client http;
  std::mutex mu;
  explicit Client(const std::string& endpoint) : http(endpoint) {}
};

std::string RemoteProvider::resolve_endpoint(const std::string& configured) {
  if (const char* env = std::getenv("TRAILGATE_PROVIDER_URL"); env != nullptr && *env != '\0') return env;
  return configured;
}

RemoteProvider::RemoteProvider(std::string endpoint, double timeout_s)
    : endpoint_(resolve_endpoint(endpoint)) {
  if (endpoint_.rfind("http://", 0) != 0 && endpoint_.rfind("https://", 0) != 0) {
    throw Error(Errc::kConfigError, "remote endpoint '" + endpoint_ + "' is not an http(s) URL");
  }
  client_ = std::make_unique<Client>(endpoint_);
  if (!client_->http.is_valid()) {
    throw Error(Errc::kConfigError, "remote endpoint '" + endpoint_ + "' is not a valid URL");
  }
  const auto secs = static_cast<time_t>(timeout_s);
  const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
  client_->http.set_connection_timeout(secs, usecs);
  client_->http.set_read_timeout(secs, usecs);
  client_->http.set_write_timeout(secs, usecs);
}

RemoteProvider::~RemoteProvider() = default;

nlohmann::json RemoteProvider::post(const std::string& path, const nlohmann::json& body) {
  const std::string request_id = std::to_string(next_request_id_++);
  httplib::Headers headers{{"X-Request-Id", request_id}};
  httplib::Result res;
  {
    std::lock_guard lock(client_->mu);
    res = client_->http.Post(path, headers, body.dump(), "application/json");
  }
  if (!res) {
    throw Error(Errc::kProviderUnavailable, endpoint_ + path + ": " + httplib::to_string(res.error()));
  }
  if (res->has_header("X-Request-Id") && res->get_header_value("X-Request-Id") != request_id) {
    throw Error(Errc::kMalformedResponse, "response answers request " + res->get_header_value("X-Request-Id") +
                                              ", sent " + request_id);
  }
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::kMalformedResponse, endpoint_ + path + " returned a non-JSON body");
  }
  if (res->status >= 500) {
    throw Error(Errc::kProviderUnavailable,
                endpoint_ + path + " -> HTTP " + std::to_string(res->status) + ": " + parsed.value("error", ""));
  }
  if (res->status >= 400) {
    throw Error(Errc::kMalformedResponse,
                endpoint_ + path + " -> HTTP " + std::to_string(res->status) + ": " + parsed.value("error", ""));
  }
  return parsed;
}

std::vector<AttentionMap> RemoteProvider::get_masks(const Frame& frame, std::span<const std::string> prompts) {
  auto maps = wire::parse_masks_response(post("/v1/masks", wire::masks_request(frame, prompts)), prompts.size());
  for (auto& m : maps) {
    if (m.width() != frame.width || m.height() != frame.height) {
      m = AttentionMap(frame.width, frame.height,
                       resample_bilinear(m.values(), m.width(), m.height(), frame.width, frame.height));
    }
  }
  conform_masks(maps, frame, prompts.size());
  return maps;
}

Embedding RemoteProvider::get_embedding(const Frame& frame) {
  Embedding e = wire::parse_embed_response(post("/v1/embed", wire::embed_request(frame)));
  conform_embedding(e, dim_.value_or(0));
  dim_ = e.dim();
  return e;
}

bool RemoteProvider::healthy() {
  std::lock_guard lock(client_->mu);
  auto res = client_->http.Get("/v1/health");
  return res && res->status == 200;
}

struct ProtocolServer::Impl {
  MaskProvider& masks;
  EmbeddingProvider& embeddings;
  httplib::Server server;
  std::thread thread;
  std::mutex provider_mu;

  Impl(MaskProvider& m, EmbeddingProvider& e) : masks(m), embeddings(e) { install(); }

  static void reply_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
  }

  static Frame decode_frame(const nlohmann::json& body) {
    const auto png = base64_decode(body.at("image").get<std::string>());
    const std::string_view bytes(reinterpret_cast<const char*>(png.data()), png.size());
    return frame_from_png(png, fnv1a64(bytes));
  }

  void install() {
    server.set_pre_routing_handler([](const httplib::Request& req, httplib::Response& res) {
      if (req.has_header("X-Request-Id")) res.set_header("X-Request-Id", req.get_header_value("X-Request-Id"));
      return httplib::Server::HandlerResponse::Unhandled;
    });
    server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    server.Post("/v1/masks", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const auto body = nlohmann::json::parse(req.body);
        const auto prompts = body.at("prompts").get<std::vector<std::string>>();
        if (prompts.empty()) return reply_error(res, 422, "prompts must not be empty");
        const Frame frame = decode_frame(body);
        std::lock_guard lock(provider_mu);
        res.set_content(wire::masks_response(masks.get_masks(frame, prompts)).dump(), "application/json");
      } catch (const nlohmann::json::exception& ex) {
        reply_error(res, 422, ex.what());
      } catch (const Error& ex) {
        reply_error(res, ex.code() == Errc::kDecodeError ? 422 : 500, ex.what());
      }
    });
    server.Post("/v1/embed", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const Frame frame = decode_frame(nlohmann::json::parse(req.body));
        std::lock_guard lock(provider_mu);
        res.set_content(wire::embed_response(embeddings.get_embedding(frame)).dump(), "application/json");
      } catch (const nlohmann::json::exception& ex) {
        reply_error(res, 422, ex.what());
      } catch (const Error& ex) {
        reply_error(res, ex.code() == Errc::kDecodeError ? 422 : 500, ex.what());
      }
    });
  }
};

ProtocolServer::ProtocolServer(MaskProvider& masks, EmbeddingProvider& embeddings)
    : impl_(std::make_unique<Impl>(masks, embeddings)) {}

ProtocolServer::~ProtocolServer() { stop(); }

int ProtocolServer::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    port_ = port;
  } else {
    port_ = -1;
  }
  if (port_ < 0) throw Error(Errc::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void ProtocolServer::run(const std::string& host, int port) {
  port_ = port;
  if (!impl_->server.listen(host, port)) {
    throw Error(Errc::kIoError, "cannot serve on " + host + ":" + std::to_string(port));
  }
}

void ProtocolServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace trailgate
