#include "trailgate/service.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>

#include "trailgate/core.hpp"
#include "trailgate/engine.hpp"
#include "trailgate/episode_log.hpp"
#include "trailgate/preview.hpp"

namespace trailgate {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

class WsSession;

/// Ordered, replayable event stream with fan-out to WebSocket subscribers.
class EventHub {
 public:
  json publish(const std::string& type, json data);
  void subscribe(const std::shared_ptr<WsSession>& session, std::uint64_t after);
  std::vector<json> snapshot() const {
    std::lock_guard lock(mu_);
    return events_;
  }
  std::uint64_t last_id() const {
    std::lock_guard lock(mu_);
    return events_.size();
  }

 private:
  mutable std::mutex mu_;
  std::vector<json> events_;
  std::vector<std::shared_ptr<const std::string>> wire_;
  std::vector<std::weak_ptr<WsSession>> subscribers_;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, EventHub& hub, std::uint64_t after)
      : ws_(std::move(socket)), hub_(hub), after_(after) {}

  void run(http::request<http::string_body> req) {
    beast::get_lowest_layer(ws_).expires_never();
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->hub_.subscribe(self, self->after_);
      self->do_read();
    });
  }

  void send(std::shared_ptr<const std::string> message) {
    net::post(ws_.get_executor(), [self = shared_from_this(), message = std::move(message)] {
      self->queue_.push_back(message);
      if (self->queue_.size() == 1) self->do_write();
    });
  }

 private:
  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->buffer_.consume(self->buffer_.size());
      self->do_read();
    });
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->queue_.clear();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->do_write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  EventHub& hub_;
  std::uint64_t after_;
};

json EventHub::publish(const std::string& type, json data) {
  std::lock_guard lock(mu_);
  json event = {{"id", events_.size() + 1}, {"type", type}, {"data", std::move(data)}};
  auto wire = std::make_shared<const std::string>(event.dump());
  events_.push_back(event);
  wire_.push_back(wire);
  std::erase_if(subscribers_, [&](const std::weak_ptr<WsSession>& weak) {
    auto session = weak.lock();
    if (!session) return true;
    session->send(wire);
    return false;
  });
  return event;
}

void EventHub::subscribe(const std::shared_ptr<WsSession>& session, std::uint64_t after) {
  std::lock_guard lock(mu_);
  for (std::size_t i = after; i < wire_.size(); ++i) session->send(wire_[i]);
  subscribers_.push_back(session);
}

std::string png_base64(const Image8& image, int max_width) {
  return base64_encode(encode_png(downscale(image, max_width)));
}

struct StoredFrame {
  Frame frame;
  PooledMap pooled;
  UncertaintyMap unc;
  BinaryMask binary;
};

std::string_view content_type_for(const std::filesystem::path& path) {
  static const std::map<std::string, std::string_view> types = {
      {".html", "text/html; charset=utf-8"}, {".js", "text/javascript"}, {".mjs", "text/javascript"},
      {".css", "text/css"},                  {".json", "application/json"}, {".png", "image/png"},
      {".svg", "image/svg+xml"},             {".ico", "image/x-icon"},      {".map", "application/json"}};
  const auto it = types.find(path.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

std::optional<std::string> query_param(std::string_view target, std::string_view key) {
  const auto q = target.find('?');
  if (q == std::string_view::npos) return std::nullopt;
  std::string query(target.substr(q + 1));
  std::istringstream in(query);
  std::string pair;
  while (std::getline(in, pair, '&')) {
    const auto eq = pair.find('=');
    if (pair.substr(0, eq) == key) return eq == std::string::npos ? std::string() : pair.substr(eq + 1);
  }
  return std::nullopt;
}

RawPrefs prefs_from_json(const json& node) {
  RawPrefs raw;
  if (node.is_null()) return raw;
  if (node.is_object()) {
    for (const auto& [prompt, weight] : node.items()) raw.emplace_back(prompt, weight.get<double>());
    return raw;
  }
  if (!node.is_array()) throw Error(Errc::kInvalidArgument, "prefs must be a list of [prompt, weight] pairs");
  for (const auto& item : node) {
    if (item.is_array() && item.size() == 2) {
      raw.emplace_back(item[0].get<std::string>(), item[1].get<double>());
    } else if (item.is_object()) {
      raw.emplace_back(item.at("prompt").get<std::string>(), item.at("weight").get<double>());
    } else {
      throw Error(Errc::kInvalidArgument, "prefs entries must be [prompt, weight] or {prompt, weight}");
    }
  }
  return raw;
}

bool is_validation_error(Errc code) {
  return code == Errc::kDuplicatePrompt || code == Errc::kWeightOutOfRange || code == Errc::kEmptyPrompt ||
         code == Errc::kInvalidArgument || code == Errc::kConfigError;
}

}  // namespace

struct OperatorService::Impl {
  class LiveOperator final : public Operator {
   public:
    explicit LiveOperator(Impl& svc) : svc_(svc) {}
    std::optional<HocResponse> on_request(const HocRequest& request) override {
      svc_.on_hoc_request(request);
      return std::nullopt;
    }
    void on_resolved(const HocResolution& resolution) override { svc_.on_hoc_resolved(resolution); }

   private:
    Impl& svc_;
  };

  std::shared_ptr<const EpisodeSource> source;
  AppConfig config;
  ProviderPair providers;
  ServiceOptions options;
  EventHub hub;
  LiveOperator live{*this};
  std::unique_ptr<Engine> engine;

  mutable std::mutex state_mu;
  std::string status = "starting";
  std::size_t frames_done = 0;
  std::optional<FrameId> last_frame;
  TraversalPrefs prefs;
  EngineConfig effective;
  json staged = json::object();
  json pending = nullptr;
  std::size_t history_size = 0;
  std::vector<std::string> log_lines;
  std::map<FrameId, StoredFrame> frames;
  std::deque<FrameId> frame_order;
  std::optional<EpisodeLog> log_file;

  std::mutex done_mu;
  std::condition_variable done_cv;
  bool done = false;
  bool stopping = false;
  bool stopped = false;

  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::vector<std::thread> io_threads;
  std::thread engine_thread;
  int port = 0;

  Impl(std::shared_ptr<const EpisodeSource> src, AppConfig cfg, ProviderPair prov, ServiceOptions opts)
      : source(std::move(src)), config(std::move(cfg)), providers(std::move(prov)), options(std::move(opts)) {
    engine = std::make_unique<Engine>(config.engine, *providers.masks, *providers.embeddings, live);
    prefs = config.engine.initial_prefs;
    effective = config.engine;
    if (options.log_path) log_file.emplace(*options.log_path);
  }

  // Engine callbacks run on the engine thread with the engine lock held.
  void on_hoc_request(const HocRequest& request) {
    json data = {{"request_id", request.request_id},
                 {"frame_id", request.frame_id},
                 {"reason", to_string(request.reason)},
                 {"u_roi", request.u_roi},
                 {"prefs", prefs_json(request.prefs)}};
    json snapshot = data;
    data["previews"] = {{"frame", png_base64(frame_image(request.frame), options.preview_width)},
                        {"pooled", png_base64(pooled_image(request.pooled), options.preview_width)},
                        {"unc", png_base64(uncertainty_image(request.unc), options.preview_width)}};
    {
      std::lock_guard lock(state_mu);
      pending = std::move(snapshot);
      status = "awaiting_operator";
    }
    hub.publish("hoc_pending", std::move(data));
  }

  void on_hoc_resolved(const HocResolution& r) {
    {
      std::lock_guard lock(state_mu);
      pending = nullptr;
      prefs = r.prefs_after;
      ++history_size;
      status = "running";
    }
    hub.publish("hoc_resolved", {{"request_id", r.request_id},
                                 {"frame_id", r.frame_id},
                                 {"reason", to_string(r.reason)},
                                 {"update", prefs_json(r.update)},
                                 {"prefs_after", prefs_json(r.prefs_after)},
                                 {"responder", r.responder},
                                 {"latency_s", r.latency_s}});
  }

  void record_frame(std::size_t index, const Frame& frame, const FrameOutcome& outcome) {
    json record = outcome_record(outcome);
    const std::string line = record.dump();
    json data = record;
    data["frame_index"] = index;
    data["frames_total"] = source->size();
    data["previews"] = {{"frame", png_base64(frame_image(frame), options.preview_width)},
                        {"pooled", png_base64(pooled_image(outcome.pooled), options.preview_width)},
                        {"unc", png_base64(uncertainty_image(outcome.unc), options.preview_width)},
                        {"binary", png_base64(binary_image(outcome.binary), options.preview_width)}};
    const EngineConfig cfg = engine->config();
    {
      std::lock_guard lock(state_mu);
      ++frames_done;
      last_frame = outcome.frame_id;
      prefs = outcome.prefs_after;
      effective = cfg;
      staged = json::object();
      log_lines.push_back(line);
      if (log_file) log_file->append(record);
      frames[outcome.frame_id] = StoredFrame{frame, outcome.pooled, outcome.unc, outcome.binary};
      frame_order.push_back(outcome.frame_id);
      while (frame_order.size() > std::max<std::size_t>(1, options.frames_retained)) {
        frames.erase(frame_order.front());
        frame_order.pop_front();
      }
      if (pending.is_null()) status = "running";
    }
    hub.publish("frame_outcome", std::move(data));
  }

  void run_engine() {
    std::size_t operator_calls = 0;
    std::size_t history_updates = 0;
    try {
      {
        std::lock_guard lock(state_mu);
        status = "running";
      }
      for (std::size_t i = 0; i < source->size(); ++i) {
        {
          std::unique_lock lock(done_mu);
          if (i > 0 && options.frame_interval_s > 0.0) {
            done_cv.wait_for(lock, std::chrono::duration<double>(options.frame_interval_s), [&] { return stopping; });
          }
          if (stopping) break;
        }
        const Frame frame = source->frame(i);
        if (i == 0) engine->init_episode(frame);
        const FrameOutcome outcome = engine->step(frame);
        for (const auto& ev : outcome.events) {
          if (ev.kind == EventKind::kHocSceneChange || ev.kind == EventKind::kHocUnknownObject) ++operator_calls;
          if (ev.kind == EventKind::kHistoryUpdate) ++history_updates;
        }
        record_frame(i, frame, outcome);
      }
      engine->shutdown();
      {
        std::lock_guard lock(state_mu);
        status = "done";
      }
      hub.publish("episode_done", {{"frames", frames_done},
                                   {"operator_calls", operator_calls},
                                   {"history_updates", history_updates}});
    } catch (const Error& err) {
      {
        std::lock_guard lock(state_mu);
        status = "error";
      }
      hub.publish("error", {{"code", to_string(err.code())}, {"message", err.message()}});
    } catch (const std::exception& ex) {
      {
        std::lock_guard lock(state_mu);
        status = "error";
      }
      hub.publish("error", {{"code", "Internal"}, {"message", ex.what()}});
    }
    {
      std::lock_guard lock(done_mu);
      done = true;
    }
    done_cv.notify_all();
  }

  // --- HTTP ---------------------------------------------------------------

  using Request = http::request<http::string_body>;
  using Response = http::response<http::string_body>;

  static Response reply(const Request& req, http::status status, std::string body, std::string_view type) {
    Response res{status, req.version()};
    res.set(http::field::server, "trailgate");
    res.set(http::field::content_type, beast::string_view(type.data(), type.size()));
    res.set(http::field::access_control_allow_origin, "*");
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  }

  static Response reply_json(const Request& req, http::status status, const json& body) {
    return reply(req, status, body.dump(), "application/json");
  }

  static Response reply_error(const Request& req, http::status status, const std::string& message,
                              std::string_view code = {}) {
    json body = {{"error", message}};
    if (!code.empty()) body["code"] = code;
    return reply_json(req, status, body);
  }

  json state_json() const {
    std::lock_guard lock(state_mu);
    return {{"status", status},
            {"episode", source->name()},
            {"frames_total", source->size()},
            {"frames_done", frames_done},
            {"last_frame_id", last_frame ? json(*last_frame) : json(nullptr)},
            {"prefs", prefs_json(prefs)},
            {"thresholds",
             {{"theta_scene", effective.theta_scene},
              {"theta_roi", effective.theta_roi},
              {"theta_trav", effective.theta_trav}}},
            {"staged_thresholds", staged},
            {"roi", effective.roi.name},
            {"pending", pending},
            {"history_size", history_size},
            {"last_event_id", hub.last_id()}};
  }

  Response handle_resolve(const Request& req) {
    json body;
    try {
      body = json::parse(req.body());
    } catch (const json::exception& ex) {
      return reply_error(req, http::status::bad_request, std::string("body is not JSON: ") + ex.what());
    }
    HocResponse response;
    try {
      if (!body.is_object() || !body.contains("prefs")) {
        return reply_error(req, http::status::unprocessable_entity, "body must be an object with a prefs field");
      }
      response.prefs = prefs_from_json(body.at("prefs"));
      response.request_id = body.value("request_id", std::uint64_t{0});
      response.responder = body.value("responder", std::string("console"));
    } catch (const json::exception& ex) {
      return reply_error(req, http::status::unprocessable_entity, ex.what());
    } catch (const Error& err) {
      return reply_error(req, http::status::unprocessable_entity, err.message(), to_string(err.code()));
    }
    try {
      const HocResolution r = engine->resolve_hoc(response);
      return reply_json(req, http::status::ok,
                        {{"request_id", r.request_id},
                         {"frame_id", r.frame_id},
                         {"reason", to_string(r.reason)},
                         {"prefs_after", prefs_json(r.prefs_after)}});
    } catch (const Error& err) {
      if (err.code() == Errc::kNoPendingRequest) {
        return reply_error(req, http::status::conflict, err.message(), to_string(err.code()));
      }
      if (is_validation_error(err.code())) {
        return reply_error(req, http::status::unprocessable_entity, err.message(), to_string(err.code()));
      }
      return reply_error(req, http::status::internal_server_error, err.message(), to_string(err.code()));
    }
  }

  Response handle_thresholds(const Request& req) {
    std::optional<double> scene;
    std::optional<double> roi;
    try {
      const json body = json::parse(req.body());
      if (!body.is_object()) return reply_error(req, http::status::unprocessable_entity, "expected an object");
      if (body.contains("theta_scene")) scene = body.at("theta_scene").get<double>();
      if (body.contains("theta_roi")) roi = body.at("theta_roi").get<double>();
    } catch (const json::parse_error& ex) {
      return reply_error(req, http::status::bad_request, std::string("body is not JSON: ") + ex.what());
    } catch (const json::exception& ex) {
      return reply_error(req, http::status::unprocessable_entity, ex.what());
    }
    if (!scene && !roi) {
      return reply_error(req, http::status::unprocessable_entity, "give theta_scene and/or theta_roi");
    }
    try {
      engine->stage_thresholds(scene, roi);
    } catch (const Error& err) {
      return reply_error(req, http::status::unprocessable_entity, err.message(), to_string(err.code()));
    }
    json out;
    {
      std::lock_guard lock(state_mu);
      if (scene) staged["theta_scene"] = *scene;
      if (roi) staged["theta_roi"] = *roi;
      out = {{"staged", staged}, {"applies", "next_frame"}};
    }
    return reply_json(req, http::status::accepted, out);
  }

  Response handle_frame(const Request& req, std::string_view path) {
    // path = /frames/{id}/{layer}
    const auto rest = path.substr(std::string_view("/frames/").size());
    const auto slash = rest.find('/');
    if (slash == std::string_view::npos) return reply_error(req, http::status::not_found, "expected /frames/{id}/{layer}");
    FrameId id = 0;
    try {
      std::size_t used = 0;
      id = std::stoull(std::string(rest.substr(0, slash)), &used);
      if (used != slash) throw std::invalid_argument("id");
    } catch (const std::exception&) {
      return reply_error(req, http::status::bad_request, "frame id must be an integer");
    }
    const auto layer = rest.substr(slash + 1);
    Image8 image;
    {
      std::lock_guard lock(state_mu);
      const auto it = frames.find(id);
      if (it == frames.end()) return reply_error(req, http::status::not_found, fmt::format("frame {} not retained", id));
      const auto& f = it->second;
      if (layer == "frame") {
        image = frame_image(f.frame);
      } else if (layer == "pooled") {
        image = pooled_image(f.pooled);
      } else if (layer == "unc") {
        image = uncertainty_image(f.unc);
      } else if (layer == "binary") {
        image = binary_image(f.binary);
      } else {
        return reply_error(req, http::status::not_found,
                           "unknown layer '" + std::string(layer) + "'; use frame, pooled, unc or binary");
      }
    }
    const auto png = encode_png(image);
    return reply(req, http::status::ok, std::string(png.begin(), png.end()), "image/png");
  }

  Response handle_static(const Request& req, std::string_view path) {
    if (options.console_dir.empty()) return reply_error(req, http::status::not_found, "no such endpoint");
    std::filesystem::path rel = std::string(path.substr(1));
    if (rel.empty() || path.back() == '/') rel /= "index.html";
    for (const auto& part : rel) {
      if (part == "..") return reply_error(req, http::status::forbidden, "path escapes the console directory");
    }
    const auto file = options.console_dir / rel;
    if (!std::filesystem::is_regular_file(file)) return reply_error(req, http::status::not_found, "not found");
    const auto bytes = read_binary_file(file);
    return reply(req, http::status::ok, std::string(bytes.begin(), bytes.end()), content_type_for(file));
  }

  Response handle(const Request& req) {
    const std::string_view target(req.target().data(), req.target().size());
    const std::string_view path = target.substr(0, target.find('?'));
    const auto method = req.method();
    try {
      if (method == http::verb::options) return reply(req, http::status::no_content, "", "text/plain");
      if (path == "/state") {
        if (method != http::verb::get) return reply_error(req, http::status::method_not_allowed, "use GET");
        return reply_json(req, http::status::ok, state_json());
      }
      if (path == "/episode/log") {
        if (method != http::verb::get) return reply_error(req, http::status::method_not_allowed, "use GET");
        std::string body;
        {
          std::lock_guard lock(state_mu);
          for (const auto& line : log_lines) body += line + '\n';
        }
        return reply(req, http::status::ok, std::move(body), "application/x-ndjson");
      }
      if (path == "/hoc/resolve") {
        if (method != http::verb::post) return reply_error(req, http::status::method_not_allowed, "use POST");
        return handle_resolve(req);
      }
      if (path == "/config/thresholds") {
        if (method != http::verb::post) return reply_error(req, http::status::method_not_allowed, "use POST");
        return handle_thresholds(req);
      }
      if (path.starts_with("/frames/")) {
        if (method != http::verb::get) return reply_error(req, http::status::method_not_allowed, "use GET");
        return handle_frame(req, path);
      }
      if (path == "/events") return reply_error(req, http::status::upgrade_required, "connect with WebSocket");
      if (method != http::verb::get) return reply_error(req, http::status::method_not_allowed, "use GET");
      return handle_static(req, path);
    } catch (const std::exception& ex) {
      return reply_error(req, http::status::internal_server_error, ex.what());
    }
  }

  class HttpSession : public std::enable_shared_from_this<HttpSession> {
   public:
    HttpSession(tcp::socket socket, Impl& svc) : stream_(std::move(socket)), svc_(svc) {}

    void run() {
      net::dispatch(stream_.get_executor(), [self = shared_from_this()] { self->do_read(); });
    }

   private:
    void do_read() {
      req_ = {};
      stream_.expires_after(std::chrono::seconds(60));
      http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        self->on_read(ec);
      });
    }

    void on_read(beast::error_code ec) {
      if (ec == http::error::end_of_stream) {
        stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      if (ec) return;
      const std::string_view target(req_.target().data(), req_.target().size());
      if (websocket::is_upgrade(req_) && target.substr(0, target.find('?')) == "/events") {
        std::uint64_t after = 0;
        if (const auto v = query_param(target, "last_event_id")) {
          try {
            after = std::stoull(*v);
          } catch (const std::exception&) {
            after = 0;
          }
        }
        std::make_shared<WsSession>(stream_.release_socket(), svc_.hub, after)->run(std::move(req_));
        return;
      }
      auto res = std::make_shared<Response>(svc_.handle(req_));
      http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code wec, std::size_t) {
        if (wec) return;
        if (res->need_eof()) {
          beast::error_code ignored;
          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
          return;
        }
        self->do_read();
      });
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    Request req_;
    Impl& svc_;
  };

  void do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (!acceptor.is_open()) return;
      if (!ec) std::make_shared<HttpSession>(std::move(socket), *this)->run();
      do_accept();
    });
  }

  int start() {
    const auto address = net::ip::make_address(options.host);
    const tcp::endpoint endpoint{address, static_cast<unsigned short>(options.port)};
    beast::error_code ec;
    acceptor.open(endpoint.protocol(), ec);
    if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(endpoint, ec);
    if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
    if (ec) {
      throw Error(Errc::kIoError, fmt::format("cannot listen on {}:{}: {}", options.host, options.port, ec.message()));
    }
    port = acceptor.local_endpoint().port();
    do_accept();
    for (unsigned i = 0; i < std::max(1u, options.io_threads); ++i) {
      io_threads.emplace_back([this] { ioc.run(); });
    }
    engine_thread = std::thread([this] { run_engine(); });
    return port;
  }

  void stop() {
    {
      std::lock_guard lock(done_mu);
      if (stopped) return;
      stopped = true;
      stopping = true;
    }
    done_cv.notify_all();
    engine->cancel();
    if (engine_thread.joinable()) engine_thread.join();
    ioc.stop();
    for (auto& t : io_threads) t.join();
    io_threads.clear();
    beast::error_code ignored;
    acceptor.close(ignored);
  }
};

OperatorService::OperatorService(std::shared_ptr<const EpisodeSource> source, AppConfig config,
                                 ProviderPair providers, ServiceOptions options)
    : impl_(std::make_shared<Impl>(std::move(source), std::move(config), std::move(providers), std::move(options))) {}

OperatorService::~OperatorService() { stop(); }

int OperatorService::start() { return impl_->start(); }

bool OperatorService::wait_done(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->done_mu);
  return impl_->done_cv.wait_for(lock, timeout, [this] { return impl_->done; });
}

void OperatorService::wait_stopped() {
  std::unique_lock lock(impl_->done_mu);
  impl_->done_cv.wait(lock, [this] { return impl_->stopping; });
}

void OperatorService::stop() {
  if (impl_) impl_->stop();
}

int OperatorService::port() const noexcept { return impl_->port; }

std::vector<json> OperatorService::events() const { return impl_->hub.snapshot(); }

}  // namespace trailgate
