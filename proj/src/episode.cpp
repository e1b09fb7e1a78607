#include "trailgate/episode.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "trailgate/image_io.hpp"
#include "trailgate/providers/remote.hpp"
#include "trailgate/providers/replay.hpp"
#include "yaml_util.hpp"

namespace trailgate {

using detail::as_double;
using detail::as_string;
using detail::config_error;

SyntheticEpisode::SyntheticEpisode(std::string name, SyntheticScenario scenario)
    : name_(std::move(name)), scenario_(std::move(scenario)) {
  scenario_.validate();
}

Frame SyntheticEpisode::frame(std::size_t index) const {
  if (index >= scenario_.frame_count) throw Error(Errc::kInvalidArgument, "frame index out of range");
  return render_synthetic_frame(scenario_, index);
}

ReplayEpisode::ReplayEpisode(std::string name, std::filesystem::path dir, std::vector<Entry> entries)
    : name_(std::move(name)), dir_(std::move(dir)), entries_(std::move(entries)) {
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].id <= entries_[i - 1].id) {
      throw Error(Errc::kConfigError, "manifest frame ids must strictly increase (frame " +
                                          std::to_string(entries_[i].id) + ")");
    }
  }
}

Frame ReplayEpisode::frame(std::size_t index) const {
  const auto& e = entries_.at(index);
  Frame f = frame_from_png(read_binary_file(dir_ / e.image), e.id);
  f.timestamp = e.timestamp;
  return f;
}

std::optional<std::filesystem::path> ReplayEpisode::annotation(std::size_t index) const {
  const auto& e = entries_.at(index);
  if (!e.annotation) return std::nullopt;
  return dir_ / *e.annotation;
}

namespace {

YAML::Node load_yaml(const std::string& text, const std::string& where) {
  try {
    return YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    config_error(where, ex.what());
  }
}

SyntheticScenario scenario_from(const YAML::Node& s) {
  if (!s || !s.IsMap()) config_error("scenario", "expected a map");
  SyntheticScenario sc;
  auto num = [&](const char* key, double fallback) {
    return s[key] ? as_double(s[key], std::string("scenario.") + key) : fallback;
  };
  sc.seed = static_cast<std::uint64_t>(num("seed", 0));
  sc.width = static_cast<int>(num("width", sc.width));
  sc.height = static_cast<int>(num("height", sc.height));
  sc.frame_count = static_cast<std::size_t>(num("frames", static_cast<double>(sc.frame_count)));
  sc.first_id = static_cast<FrameId>(num("first_id", 0));
  sc.embedding_dim = static_cast<std::size_t>(num("embedding_dim", static_cast<double>(sc.embedding_dim)));
  sc.attention_floor = num("attention_floor", sc.attention_floor);
  sc.noise_cells = static_cast<int>(num("noise_cells", sc.noise_cells));

  if (const auto labels = s["labels"]) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      sc.labels.push_back(as_string(labels[i], fmt::format("scenario.labels[{}]", i)));
    }
  }
  if (const auto runs = s["label_runs"]) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::string at = fmt::format("scenario.label_runs[{}]", i);
      if (!runs[i].IsSequence() || runs[i].size() != 2) config_error(at, "expected [label, count]");
      const auto label = as_string(runs[i][0], at);
      const auto count = static_cast<std::size_t>(as_double(runs[i][1], at));
      sc.labels.insert(sc.labels.end(), count, label);
    }
  }
  if (const auto vectors = s["scene_vectors"]) {
    for (const auto& kv : vectors) {
      const auto label = kv.first.Scalar();
      std::vector<double> v;
      for (std::size_t i = 0; i < kv.second.size(); ++i) {
        v.push_back(as_double(kv.second[i], fmt::format("scenario.scene_vectors.{}[{}]", label, i)));
      }
      sc.scene_vectors[label] = std::move(v);
    }
  }
  if (const auto obstacles = s["obstacles"]) {
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      const auto o = obstacles[i];
      const std::string at = fmt::format("scenario.obstacles[{}]", i);
      Obstacle ob;
      if (const auto fr = o["frames"]) {
        if (!fr.IsSequence() || fr.size() != 2) config_error(at + ".frames", "expected [first, last]");
        ob.first_frame = static_cast<FrameId>(as_double(fr[0], at + ".frames[0]"));
        ob.last_frame = static_cast<FrameId>(as_double(fr[1], at + ".frames[1]"));
      }
      const auto rect = o["rect"];
      if (!rect || !rect.IsSequence() || rect.size() != 4) config_error(at + ".rect", "expected [x0, y0, x1, y1]");
      ob.x0 = as_double(rect[0], at + ".rect");
      ob.y0 = as_double(rect[1], at + ".rect");
      ob.x1 = as_double(rect[2], at + ".rect");
      ob.y1 = as_double(rect[3], at + ".rect");
      if (const auto v = o["velocity"]) {
        if (!v.IsSequence() || v.size() != 2) config_error(at + ".velocity", "expected [vx, vy]");
        ob.vx = as_double(v[0], at + ".velocity");
        ob.vy = as_double(v[1], at + ".velocity");
      }
      if (o["growth"]) ob.growth = as_double(o["growth"], at + ".growth");
      sc.obstacles.push_back(ob);
    }
  }
  sc.validate();
  return sc;
}

}  // namespace

SyntheticScenario parse_scenario(std::string_view yaml_text) {
  const auto root = load_yaml(std::string(yaml_text), "scenario");
  return scenario_from(root.IsMap() && root["scenario"] ? root["scenario"] : root);
}

std::unique_ptr<EpisodeSource> open_episode(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(Errc::kIoError, "episode directory " + dir.string() + " does not exist");
  }
  const auto manifest_path = dir / "manifest.yaml";
  if (!std::filesystem::exists(manifest_path)) {
    throw Error(Errc::kIoError, "episode directory " + dir.string() + " has no manifest.yaml");
  }
  try {
    const auto root = load_yaml(read_text_file(manifest_path), "manifest");
    if (!root.IsMap()) config_error("manifest", "expected a map");
    const std::string kind = root["kind"] ? as_string(root["kind"], "kind") : "replay";
    const std::string name = root["name"] ? as_string(root["name"], "name") : dir.filename().string();
    if (kind == "synthetic") {
      return std::make_unique<SyntheticEpisode>(name, scenario_from(root["scenario"]));
    }
    if (kind != "replay") config_error("kind", "unknown episode kind '" + kind + "'");
    const auto frames = root["frames"];
    if (!frames || !frames.IsSequence()) config_error("frames", "expected a list of frames");
    std::vector<ReplayEpisode::Entry> entries;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto f = frames[i];
      const std::string at = fmt::format("frames[{}]", i);
      ReplayEpisode::Entry e;
      e.id = static_cast<FrameId>(as_double(f["id"], at + ".id"));
      e.image = as_string(f["image"], at + ".image");
      if (f["timestamp"]) e.timestamp = as_double(f["timestamp"], at + ".timestamp");
      if (f["annotation"]) e.annotation = as_string(f["annotation"], at + ".annotation");
      entries.push_back(std::move(e));
    }
    return std::make_unique<ReplayEpisode>(name, dir, std::move(entries));
  } catch (const Error& err) {
    if (err.code() == Errc::kIoError) throw;
    throw Error(err.code(), manifest_path.string() + ": " + err.message());
  }
}

namespace {

std::shared_ptr<RemoteProvider> remote_for(const ProviderSpec& spec, std::shared_ptr<RemoteProvider>& shared) {
  const auto endpoint = RemoteProvider::resolve_endpoint(spec.endpoint);
  if (!shared || shared->endpoint() != endpoint) shared = std::make_shared<RemoteProvider>(endpoint, spec.timeout_s);
  return shared;
}

std::filesystem::path replay_dir(const ProviderSpec& spec, const EpisodeSource& episode) {
  if (!spec.directory.empty()) return spec.directory;
  if (const auto* replay = dynamic_cast<const ReplayEpisode*>(&episode)) return replay->directory();
  throw Error(Errc::kConfigError, "replay provider needs a directory for a non-recorded episode");
}

SyntheticScenario scenario_for(const ProviderSpec& spec, const EpisodeSource& episode) {
  if (const auto* synth = dynamic_cast<const SyntheticEpisode*>(&episode)) {
    SyntheticScenario sc = synth->scenario();
    if (spec.kind == ProviderSpec::Kind::kSynthetic && spec.seed != 0) sc.seed = spec.seed;
    return sc;
  }
  SyntheticScenario sc;
  sc.seed = spec.seed;
  return sc;
}

}  // namespace

ProviderPair make_providers(const ProviderSpec& masks, const ProviderSpec& embeddings, const EpisodeSource& episode) {
  const bool synthetic_episode = dynamic_cast<const SyntheticEpisode*>(&episode) != nullptr;
  auto resolve = [&](ProviderSpec::Kind k) {
    if (k != ProviderSpec::Kind::kAuto) return k;
    return synthetic_episode ? ProviderSpec::Kind::kSynthetic : ProviderSpec::Kind::kReplay;
  };
  ProviderPair out;
  std::shared_ptr<RemoteProvider> remote;
  switch (resolve(masks.kind)) {
    case ProviderSpec::Kind::kSynthetic:
      out.masks = std::make_shared<SyntheticMaskProvider>(scenario_for(masks, episode));
      break;
    case ProviderSpec::Kind::kReplay:
      out.masks = std::make_shared<ReplayMaskProvider>(replay_dir(masks, episode));
      break;
    default:
      out.masks = remote_for(masks, remote);
  }
  switch (resolve(embeddings.kind)) {
    case ProviderSpec::Kind::kSynthetic:
      out.embeddings = std::make_shared<SyntheticEmbeddingProvider>(scenario_for(embeddings, episode));
      break;
    case ProviderSpec::Kind::kReplay:
      out.embeddings = std::make_shared<ReplayEmbeddingProvider>(replay_dir(embeddings, episode));
      break;
    default:
      out.embeddings = remote_for(embeddings, remote);
  }
  return out;
}

void export_replay_episode(const EpisodeSource& source, MaskProvider& masks, EmbeddingProvider& embeddings,
                           const TraversalPrefs& prefs, const std::filesystem::path& out_dir) {
  if (prefs.size() > 254) throw Error(Errc::kInvalidArgument, "label export supports at most 254 prompts");
  std::filesystem::create_directories(out_dir);
  const auto prompts = prefs.prompts();
  const auto weights = prefs.weights();

  YAML::Emitter manifest;
  manifest << YAML::BeginMap;
  manifest << YAML::Key << "kind" << YAML::Value << "replay";
  manifest << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << source.name();
  manifest << YAML::Key << "frames" << YAML::Value << YAML::BeginSeq;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Frame frame = source.frame(i);
    const auto image = fmt::format("frames/{:06}.png", frame.id);
    const auto label = fmt::format("labels/{:06}.png", frame.id);
    write_binary_file(out_dir / image, frame_to_png(frame));

    auto maps = masks.get_masks(frame, prompts);
    conform_masks(maps, frame, prompts.size());
    // Labels are derived from the stored float32 values so replaying the
    // files reproduces them exactly.
    std::vector<std::vector<double>> stored;
    for (std::size_t n = 0; n < maps.size(); ++n) {
      const auto bytes = pack_f32le(maps[n].values());
      write_binary_file(replay_mask_path(out_dir, frame.id, prompts[n]), bytes);
      stored.push_back(unpack_f32le(bytes));
    }
    Image8 labels{frame.width, frame.height, 1, std::vector<std::uint8_t>(maps.front().size(), 0)};
    for (std::size_t px = 0; px < labels.data.size(); ++px) {
      std::size_t best = 0;
      double best_mu = weights[0] * stored[0][px];
      for (std::size_t n = 1; n < stored.size(); ++n) {
        const double mu = weights[n] * stored[n][px];
        if (std::abs(mu) > std::abs(best_mu)) {
          best = n;
          best_mu = mu;
        }
      }
      labels.data[px] = best_mu == 0.0 ? 0 : static_cast<std::uint8_t>(best + 1);
    }
    write_binary_file(out_dir / label, encode_png(labels));

    const Embedding e = embeddings.get_embedding(frame);
    write_binary_file(replay_embedding_path(out_dir, frame.id), pack_f32le(e.values));

    manifest << YAML::BeginMap;
    manifest << YAML::Key << "id" << YAML::Value << frame.id;
    manifest << YAML::Key << "image" << YAML::Value << image;
    if (frame.timestamp) manifest << YAML::Key << "timestamp" << YAML::Value << fmt::format("{}", *frame.timestamp);
    manifest << YAML::Key << "annotation" << YAML::Value << label;
    manifest << YAML::EndMap;
  }
  manifest << YAML::EndSeq << YAML::EndMap;
  std::ofstream(out_dir / "manifest.yaml") << manifest.c_str() << '\n';

  YAML::Emitter mapping;
  mapping << YAML::BeginMap;
  mapping << YAML::Key << "dataset" << YAML::Value << YAML::DoubleQuoted << source.name();
  mapping << YAML::Key << "encoding" << YAML::Value << "id";
  mapping << YAML::Key << "classes" << YAML::Value << YAML::BeginSeq;
  mapping << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << 0 << YAML::Key << "name"
          << YAML::Value << "unexplained" << YAML::Key << "role" << YAML::Value << "non_traversable" << YAML::EndMap;
  for (std::size_t n = 0; n < prompts.size(); ++n) {
    mapping << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << n + 1 << YAML::Key << "name"
            << YAML::Value << YAML::DoubleQuoted << prompts[n] << YAML::Key << "role" << YAML::Value
            << (weights[n] > 0.0 ? "traversable" : "non_traversable") << YAML::EndMap;
  }
  mapping << YAML::EndSeq << YAML::EndMap;
  std::ofstream(out_dir / "mapping.yaml") << mapping.c_str() << '\n';
}

}  // namespace trailgate
