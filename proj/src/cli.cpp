#include "trailgate/cli.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "trailgate/config.hpp"
#include "trailgate/core.hpp"
#include "trailgate/engine.hpp"
#include "trailgate/episode.hpp"
#include "trailgate/episode_log.hpp"
#include "trailgate/eval.hpp"
#include "trailgate/providers/remote.hpp"
#include "trailgate/service.hpp"

namespace trailgate {

namespace {

volatile std::sig_atomic_t g_interrupted = 0;

void on_signal(int) { g_interrupted = 1; }

struct RunArgs {
  std::string episode;
  std::string config;
  std::string op = "scripted";
  std::string log;
  std::string prompts;
};

bool is_usage_error(Errc code) {
  switch (code) {
    case Errc::kProviderUnavailable:
    case Errc::kMalformedResponse:
    case Errc::kHocTimeout:
    case Errc::kNoPendingRequest:
      return false;
    default:
      return true;
  }
}

std::filesystem::path require_dir(const std::string& path, const std::string& what) {
  if (path.empty()) throw Error(Errc::kInvalidArgument, what + " is required");
  if (!std::filesystem::is_directory(path)) {
    throw Error(Errc::kIoError, what + " '" + path + "' does not exist or is not a directory");
  }
  return path;
}

std::filesystem::path require_file(const std::string& path, const std::string& what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(Errc::kIoError, what + " '" + path + "' does not exist");
  }
  return path;
}

/// Explicit --config wins; otherwise the episode's own config.yaml.
AppConfig resolve_config(const std::string& config, const std::filesystem::path& episode) {
  if (!config.empty()) return load_app_config(require_file(config, "config file"));
  const auto fallback = episode / "config.yaml";
  if (std::filesystem::is_regular_file(fallback)) return load_app_config(fallback);
  throw Error(Errc::kInvalidArgument, "no --config given and " + fallback.string() + " does not exist");
}

std::unique_ptr<Operator> make_operator(const std::string& spec) {
  if (spec == "interactive") {
    throw Error(Errc::kInvalidArgument,
                "the interactive operator needs the operator console; run `trailgate serve --episode-source DIR` "
                "and answer calls from the console or with POST /hoc/resolve");
  }
  if (spec == "scripted") return std::make_unique<ScriptedOperator>();
  if (spec.rfind("scripted:", 0) == 0) {
    const auto path = spec.substr(std::string_view("scripted:").size());
    return std::make_unique<ScriptedOperator>(ScriptedOperator::from_file(require_file(path, "operator script")));
  }
  throw Error(Errc::kInvalidArgument, "--operator must be scripted, scripted:FILE or interactive, got '" + spec + "'");
}

void add_run_flags(CLI::App& cmd, RunArgs& a, bool with_log) {
  cmd.add_option("--episode", a.episode, "Episode directory (contains manifest.yaml)")->required();
  cmd.add_option("--config", a.config, "Engine config YAML (default: <episode>/config.yaml)");
  cmd.add_option("--operator", a.op, "scripted, scripted:FILE or interactive")->capture_default_str();
  cmd.add_option("--prompts", a.prompts, "Prompt file replacing the config's initial prefs");
  if (with_log) cmd.add_option("--log", a.log, "Episode log (JSON lines)");
}

struct Prepared {
  std::unique_ptr<EpisodeSource> source;
  AppConfig config;
};

Prepared prepare(const RunArgs& a) {
  const auto dir = require_dir(a.episode, "episode directory");
  Prepared p{open_episode(dir), resolve_config(a.config, dir)};
  if (!a.prompts.empty()) p.config.engine.initial_prefs = load_prompts_file(require_file(a.prompts, "prompt file"));
  p.config.engine.validate();
  return p;
}

int cmd_replay(const RunArgs& a, std::ostream& out) {
  auto op = make_operator(a.op);
  auto p = prepare(a);
  const auto providers = make_providers(p.config.masks, p.config.embeddings, *p.source);
  Engine engine(p.config.engine, *providers.masks, *providers.embeddings, *op);
  std::optional<EpisodeLog> log;
  if (!a.log.empty()) log.emplace(a.log);
  std::size_t calls = 0;
  std::size_t history = 0;
  std::size_t fail_safe = 0;
  const auto frames = run_episode(*p.source, engine, [&](std::size_t, const FrameOutcome& outcome) {
    for (const auto& ev : outcome.events) {
      if (ev.kind == EventKind::kHocSceneChange || ev.kind == EventKind::kHocUnknownObject) ++calls;
      if (ev.kind == EventKind::kHistoryUpdate) ++history;
    }
    if (outcome.fail_safe) ++fail_safe;
    if (log) log->append(outcome);
  });
  engine.shutdown();
  out << fmt::format("episode={} frames={} operator_calls={} history_updates={} fail_safe_frames={}\n",
                     p.source->name(), frames, calls, history, fail_safe);
  return kExitOk;
}

int cmd_eval(const RunArgs& a, const std::string& mapping_path, const std::string& dataset, const std::string& out_dir,
             std::ostream& out) {
  auto op = make_operator(a.op);
  auto p = prepare(a);
  auto mapping = load_label_mapping(require_file(mapping_path, "mapping file"));
  if (!dataset.empty()) mapping.dataset = dataset;
  const auto report = run_episode_eval(*p.source, p.config, mapping, *op);
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "eval_report.json";
  std::ofstream(path) << report.to_json().dump(2) << '\n';
  out << fmt::format("dataset={} episode={} frames_scored={} miou={:.6f} iou_traversable={:.6f} "
                     "iou_non_traversable={:.6f} report={}\n",
                     report.dataset, report.episode, report.frames_scored, report.miou, report.iou_traversable,
                     report.iou_non_traversable, path.string());
  return kExitOk;
}

int cmd_sweep(const RunArgs& a, const std::string& thresholds, const std::string& out_dir, unsigned jobs,
              std::ostream& out) {
  // Fail fast on a bad --operator value; each run gets its own copy.
  make_operator(a.op);
  auto p = prepare(a);
  const auto values = parse_threshold_list(thresholds);
  const auto results = run_hoc_sweep(*p.source, p.config, values, [&] { return make_operator(a.op); }, jobs);
  std::filesystem::create_directories(out_dir);
  const auto path = std::filesystem::path(out_dir) / "hoc_sweep.csv";
  std::ofstream csv(path);
  write_sweep_csv(csv, results);
  for (const auto& r : results) {
    out << fmt::format("threshold={} frames={} scene_calls={} roi_calls={} history_updates={}\n", r.threshold,
                       r.rows.size(), r.total_scene_calls(), r.total_roi_calls(), r.total_history_updates());
  }
  out << "csv=" << path.string() << '\n';
  return kExitOk;
}

struct ServeArgs {
  std::optional<int> port;
  std::string host = "127.0.0.1";
  std::string episode;
  std::string config;
  std::string console_dir;
  std::string log;
  double frame_interval = 0.0;
  bool exit_when_done = false;
};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  int port = 8080;
  if (a.port) {
    port = *a.port;
  } else if (const char* env = std::getenv("TRAILGATE_PORT"); env != nullptr && *env != '\0') {
    try {
      port = std::stoi(env);
    } catch (const std::exception&) {
      throw Error(Errc::kInvalidArgument, std::string("TRAILGATE_PORT='") + env + "' is not a port number");
    }
  }
  const auto dir = require_dir(a.episode, "episode source");
  std::shared_ptr<const EpisodeSource> source = open_episode(dir);
  const AppConfig config = resolve_config(a.config, dir);
  ServiceOptions options;
  options.host = a.host;
  options.port = port;
  options.frame_interval_s = a.frame_interval;
  if (!a.console_dir.empty()) options.console_dir = require_dir(a.console_dir, "console directory");
  if (!a.log.empty()) options.log_path = a.log;
  OperatorService service(source, config, make_providers(config.masks, config.embeddings, *source), options);
  const int bound = service.start();
  out << fmt::format("serving episode '{}' on http://{}:{}\n", source->name(), a.host, bound) << std::flush;

  g_interrupted = 0;
  auto previous_int = std::signal(SIGINT, on_signal);
  auto previous_term = std::signal(SIGTERM, on_signal);
  while (g_interrupted == 0) {
    if (service.wait_done(std::chrono::milliseconds(200)) && a.exit_when_done) break;
  }
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
  service.stop();
  return kExitOk;
}

struct SidecarArgs {
  std::string host = "127.0.0.1";
  int port = 8900;
  std::uint64_t seed = 0;
  std::size_t embedding_dim = 8;
};

int cmd_stub_sidecar(const SidecarArgs& a, std::ostream& out) {
  SyntheticScenario scenario;
  scenario.seed = a.seed;
  scenario.embedding_dim = a.embedding_dim;
  // Frames from the wire carry content-hash ids; the label is derived from
  // the id so identical images share an embedding.
  SyntheticMaskProvider masks(scenario);
  SyntheticEmbeddingProvider embeddings(scenario);
  ProtocolServer server(masks, embeddings);
  const int port = server.start(a.host, a.port);
  out << fmt::format("stub sidecar listening on http://{}:{}\n", a.host, port) << std::flush;
  g_interrupted = 0;
  auto previous_int = std::signal(SIGINT, on_signal);
  auto previous_term = std::signal(SIGTERM, on_signal);
  while (g_interrupted == 0) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
  server.stop();
  return kExitOk;
}

int cmd_export(const RunArgs& a, const std::string& out_dir, std::ostream& out) {
  auto p = prepare(a);
  const auto providers = make_providers(p.config.masks, p.config.embeddings, *p.source);
  export_replay_episode(*p.source, *providers.masks, *providers.embeddings, p.config.engine.initial_prefs, out_dir);
  std::ofstream(std::filesystem::path(out_dir) / "config.yaml") << emit_app_config([&] {
    AppConfig replay = p.config;
    replay.masks = ProviderSpec{};
    replay.embeddings = ProviderSpec{};
    return replay;
  }());
  out << fmt::format("exported {} frames to {}\n", p.source->size(), out_dir);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prompt-weighted traversability engine with operator calls", "trailgate"};
  app.require_subcommand(1);

  RunArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Run the engine over an episode and write the episode log");
  add_run_flags(*replay_cmd, replay, true);

  RunArgs eval;
  std::string mapping;
  std::string dataset;
  std::string eval_out = "out";
  auto* eval_cmd = app.add_subcommand("eval", "Score an annotated episode and write eval_report.json");
  add_run_flags(*eval_cmd, eval, false);
  eval_cmd->add_option("--mapping", mapping, "Label mapping YAML")->required();
  eval_cmd->add_option("--dataset", dataset, "Dataset name recorded in the report");
  eval_cmd->add_option("--out", eval_out, "Output directory")->capture_default_str();

  RunArgs sweep;
  std::string thresholds = "0.85,0.9,0.925,0.95";
  std::string sweep_out = "out";
  unsigned jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Count operator calls per frame for several scene thresholds");
  add_run_flags(*sweep_cmd, sweep, false);
  sweep_cmd->add_option("--thresholds", thresholds, "Comma-separated scene thresholds")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "Output directory")->capture_default_str();
  sweep_cmd->add_option("--jobs", jobs, "Thresholds run in parallel")->capture_default_str();
  sweep_cmd->add_option("--dataset", dataset, "Accepted for symmetry with eval; unused");
  sweep_cmd->add_option("--mapping", mapping, "Accepted for symmetry with eval; unused");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run an episode behind the operator REST/WebSocket service");
  serve_cmd->add_option("--port", serve.port, "TCP port (default: $TRAILGATE_PORT or 8080)");
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--episode-source", serve.episode, "Episode directory")->required();
  serve_cmd->add_option("--config", serve.config, "Engine config YAML (default: <episode>/config.yaml)");
  serve_cmd->add_option("--console-dir", serve.console_dir, "Static console bundle served under /");
  serve_cmd->add_option("--log", serve.log, "Episode log (JSON lines)");
  serve_cmd->add_option("--frame-interval", serve.frame_interval, "Seconds between frames")->capture_default_str();
  serve_cmd->add_flag("--exit-when-done", serve.exit_when_done, "Stop once the episode finishes");

  SidecarArgs sidecar;
  auto* sidecar_cmd = app.add_subcommand("stub-sidecar", "Serve the provider wire protocol from synthetic maps");
  sidecar_cmd->add_option("--host", sidecar.host, "Bind address")->capture_default_str();
  sidecar_cmd->add_option("--port", sidecar.port, "TCP port (0 = any)")->capture_default_str();
  sidecar_cmd->add_option("--seed", sidecar.seed, "Noise seed")->capture_default_str();
  sidecar_cmd->add_option("--embedding-dim", sidecar.embedding_dim, "Embedding dimension")->capture_default_str();

  RunArgs exp;
  std::string export_out;
  auto* export_cmd = app.add_subcommand("export-replay", "Record an episode's maps, embeddings and labels to disk");
  export_cmd->add_option("--episode", exp.episode, "Episode directory")->required();
  export_cmd->add_option("--config", exp.config, "Engine config YAML (default: <episode>/config.yaml)");
  export_cmd->add_option("--prompts", exp.prompts, "Prompt file replacing the config's initial prefs");
  export_cmd->add_option("--out", export_out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*replay_cmd) return cmd_replay(replay, out);
    if (*eval_cmd) return cmd_eval(eval, mapping, dataset, eval_out, out);
    if (*sweep_cmd) return cmd_sweep(sweep, thresholds, sweep_out, jobs, out);
    if (*serve_cmd) return cmd_serve(serve, out);
    if (*sidecar_cmd) return cmd_stub_sidecar(sidecar, out);
    if (*export_cmd) return cmd_export(exp, export_out, out);
  } catch (const Error& e) {
    err << "trailgate: " << e.what() << '\n';
    return is_usage_error(e.code()) ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "trailgate: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace trailgate
