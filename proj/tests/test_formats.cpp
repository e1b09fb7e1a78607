#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "trailgate/config.hpp"
#include "trailgate/episode.hpp"
#include "trailgate/episode_log.hpp"
#include "trailgate/image_io.hpp"
#include "trailgate/operator.hpp"
#include "trailgate/preview.hpp"

using namespace tg_test;

namespace {

std::string error_text(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("app config parses every section") {
  const auto cfg = parse_app_config(R"(
theta_scene: 0.9
theta_roi: 0.4
theta_trav: 0.1
hoc_timeout: 5
roi:
  name: atv
  polygon: [[0.2, 0.5], [0.8, 0.5], [0.8, 1], [0.2, 1]]
prefs:
  - {prompt: grass, weight: 1}
  - {prompt: bush, weight: -1}
history:
  persist: /tmp/h.jsonl
  reuse: true
providers:
  masks: {kind: remote, endpoint: "http://localhost:8900", timeout: 3}
  embeddings: {kind: synthetic, seed: 7}
)");
  CHECK(cfg.engine.theta_scene == 0.9);
  CHECK(cfg.engine.theta_roi == 0.4);
  CHECK(cfg.engine.theta_trav == 0.1);
  CHECK(cfg.engine.hoc_timeout_s == 5);
  CHECK(cfg.engine.roi.name == "atv");
  CHECK(cfg.engine.roi.polygon.size() == 4);
  CHECK(cfg.engine.initial_prefs == prefs({{"grass", 1}, {"bush", -1}}));
  CHECK(cfg.engine.history.persist_path == "/tmp/h.jsonl");
  CHECK(cfg.engine.history.reuse_across_episodes);
  CHECK(cfg.masks.kind == ProviderSpec::Kind::kRemote);
  CHECK(cfg.masks.endpoint == "http://localhost:8900");
  CHECK(cfg.masks.timeout_s == 3);
  CHECK(cfg.embeddings.kind == ProviderSpec::Kind::kSynthetic);
  CHECK(cfg.embeddings.seed == 7);

  CHECK(parse_app_config(emit_app_config(cfg)) == cfg);
}

TEST_CASE("app config errors name the key") {
  const std::string roi = "roi: {polygon: [[0,0],[1,0],[1,1]]}\n";
  CHECK(error_text([&] { parse_app_config(roi); }).find("prefs") != std::string::npos);
  CHECK(error_text([&] { parse_app_config("prefs: [{prompt: a, weight: 1}]\n"); }).find("roi") != std::string::npos);
  CHECK(error_text([&] { parse_app_config(roi + "prefs: [{prompt: a, weight: 3}]\n"); }).find("WeightOutOfRange") !=
        std::string::npos);
  CHECK(error_text([&] { parse_app_config(roi + "prefs: [{prompt: a, weight: x}]\n"); }).find("prefs[0].weight") !=
        std::string::npos);
  CHECK(error_text([&] { parse_app_config(roi + "theta_roi: 2\nprefs: [{prompt: a, weight: 1}]\n"); })
            .find("theta_roi") != std::string::npos);
  CHECK(error_text([&] { parse_app_config("roi: [\n"); }).find("YAML") != std::string::npos);
  CHECK(error_text([&] {
          parse_app_config(roi + "prefs: [{prompt: a, weight: 1}]\nproviders: {masks: {kind: magic}}\n");
        }).find("providers.masks.kind") != std::string::npos);
  CHECK(error_text([] { load_app_config("/nonexistent/config.yaml"); }).find("/nonexistent/config.yaml") !=
        std::string::npos);
}

TEST_CASE("bundled configs and prompt files load") {
  for (const auto& entry : std::filesystem::recursive_directory_iterator(kDataDir / "episodes")) {
    if (entry.path().filename().string().rfind("config", 0) == 0) {
      CAPTURE(entry.path());
      CHECK_NOTHROW(load_app_config(entry.path()));
    }
  }
  CHECK_NOTHROW(load_app_config(kDataDir / "configs" / "default.yaml"));
  CHECK(load_prompts_file(kDataDir / "prompts" / "rellis3d.yaml") ==
        prefs({{"grass", 1}, {"bush", -1}, {"dirt", 1}}));
  for (const auto& entry : std::filesystem::directory_iterator(kDataDir / "prompts")) {
    CHECK_FALSE(load_prompts_file(entry.path()).empty());
  }
}

TEST_CASE("png round trips") {
  Image8 rgb{3, 2, 3, {}};
  for (int i = 0; i < 18; ++i) rgb.data.push_back(static_cast<std::uint8_t>(i * 13));
  const auto decoded = decode_png_rgb(encode_png(rgb));
  CHECK(decoded.width == 3);
  CHECK(decoded.height == 2);
  CHECK(decoded.data == rgb.data);

  Image8 gray{2, 2, 1, {0, 3, 19, 255}};
  const auto labels = decode_label_png(encode_png(gray));
  CHECK_FALSE(labels.rgb);
  CHECK(labels.codes == std::vector<std::uint32_t>{0, 3, 19, 255});
  const auto gray_rgb = decode_png_rgb(encode_png(gray));
  CHECK(gray_rgb.data[3] == 3);
  CHECK(gray_rgb.data[5] == 3);

  const auto colors = decode_label_png(encode_png(rgb));
  CHECK(colors.rgb);
  CHECK(colors.codes[0] == ((0u << 16) | (13u << 8) | 26u));

  const Frame f = frame_from_png(encode_png(rgb), 42);
  CHECK(f.id == 42);
  CHECK(f.pixels == rgb.data);
  CHECK(frame_from_png(frame_to_png(f), 42).pixels == f.pixels);

  const std::vector<std::uint8_t> junk = {1, 2, 3, 4};
  CHECK_THROWS_AS(decode_png_rgb(junk), Error);
}

TEST_CASE("base64 and float32 packing") {
  const std::string text = "any carnal pleasure.";
  const std::vector<std::uint8_t> bytes(text.begin(), text.end());
  CHECK(base64_encode(bytes) == "YW55IGNhcm5hbCBwbGVhc3VyZS4=");
  CHECK(base64_decode("YW55IGNhcm5hbCBwbGVhc3VyZS4=") == bytes);
  CHECK(base64_encode(std::vector<std::uint8_t>{}).empty());
  CHECK(base64_decode("TQ==") == std::vector<std::uint8_t>{'M'});
  CHECK_THROWS_AS(base64_decode("T*=="), Error);

  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> b(static_cast<std::size_t>(rng.uniform_int(0, 40)));
    for (auto& x : b) x = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    CHECK(base64_decode(base64_encode(b)) == b);
  }

  const std::vector<double> v = {0.0, 1.0, -0.5, 0.1};
  const auto packed = pack_f32le(v);
  REQUIRE(packed.size() == 16);
  CHECK(packed[4] == 0x00);
  CHECK(packed[7] == 0x3f);
  CHECK(packed[6] == 0x80);
  const auto back = unpack_f32le(packed);
  CHECK(back[2] == -0.5);
  CHECK(back[3] == static_cast<double>(0.1f));
  CHECK_THROWS_AS(unpack_f32le(std::vector<std::uint8_t>(5)), Error);
}

TEST_CASE("episode manifests") {
  const auto ep = open_episode(kDataDir / "episodes" / "two-scene");
  CHECK(ep->name() == "two-scene");
  CHECK(ep->size() == 20);
  const auto f = ep->frame(3);
  CHECK(f.id == 3);
  CHECK(f.width == 64);
  CHECK(f.height == 48);
  CHECK_NOTHROW(f.validate());
  CHECK(ep->frame(3).pixels == f.pixels);

  const auto replay = open_episode(kDataDir / "episodes" / "oracle-replay");
  CHECK(replay->size() == 8);
  CHECK(replay->annotation(0).has_value());
  CHECK(replay->frame(2).id == 2);

  CHECK(error_text([] { open_episode("/no/such/episode"); }).find("/no/such/episode") != std::string::npos);

  const auto dir = fresh_dir("trailgate_bad_manifest");
  write_text(dir / "manifest.yaml", "kind: teleport\n");
  CHECK(error_text([&] { open_episode(dir); }).find("manifest.yaml") != std::string::npos);
  write_text(dir / "manifest.yaml",
             "kind: replay\nname: x\nframes:\n  - {id: 2, image: a.png}\n  - {id: 1, image: b.png}\n");
  CHECK_THROWS_AS(open_episode(dir), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario parsing") {
  const auto s = parse_scenario(R"(
seed: 5
width: 10
height: 8
frames: 6
first_id: 100
embedding_dim: 2
attention_floor: 0.5
labels: [a, b]
label_runs: [[c, 2]]
scene_vectors: {a: [1, 0]}
obstacles:
  - {frames: [101, 102], rect: [0, 0, 0.5, 0.5], velocity: [0.1, 0], growth: 0.01}
)");
  CHECK(s.seed == 5);
  CHECK(s.first_id == 100);
  CHECK(s.labels == std::vector<std::string>{"a", "b", "c", "c"});
  CHECK(s.label_for(101) == "b");
  CHECK(s.label_for(110) == "frame-110");
  REQUIRE(s.obstacles.size() == 1);
  CHECK(s.obstacles[0].covers(101, 0.1, 0.1));
  CHECK_FALSE(s.obstacles[0].covers(100, 0.1, 0.1));
  CHECK(s.obstacles[0].covers(102, 0.6, 0.1));
  CHECK_FALSE(s.obstacles[0].covers(102, 0.05, 0.1));
  CHECK_THROWS_AS(parse_scenario("width: -1\n"), Error);
}

TEST_CASE("replay export reproduces the synthetic episode") {
  const auto source = open_episode(kDataDir / "episodes" / "forced-hoc");
  const auto cfg = load_app_config(kDataDir / "episodes" / "forced-hoc" / "config.yaml");
  auto providers = make_providers(cfg.masks, cfg.embeddings, *source);
  const auto p = prefs({{"grass", 1}, {"bush", -1}});
  const auto dir = fresh_dir("trailgate_export");
  export_replay_episode(*source, *providers.masks, *providers.embeddings, p, dir);

  const auto replay = open_episode(dir);
  REQUIRE(replay->size() == source->size());
  AppConfig replay_cfg = cfg;
  auto rp = make_providers(replay_cfg.masks, replay_cfg.embeddings, *replay);
  const std::vector<std::string> prompts = p.prompts();
  for (std::size_t i = 0; i < source->size(); ++i) {
    const auto a = source->frame(i);
    const auto b = replay->frame(i);
    CHECK(a.id == b.id);
    CHECK(a.pixels == b.pixels);
    const auto ma = providers.masks->get_masks(a, prompts);
    const auto mb = rp.masks->get_masks(b, prompts);
    for (std::size_t k = 0; k < ma.size(); ++k) {
      for (std::size_t px = 0; px < ma[k].size(); ++px) {
        REQUIRE(mb[k][px] == static_cast<double>(static_cast<float>(ma[k][px])));
      }
    }
    CHECK(replay->annotation(i).has_value());
  }
  CHECK(std::filesystem::exists(dir / "mapping.yaml"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("scripted operator lookup order and file format") {
  ScriptedOperator op;
  op.answer_frame(5, {{"a", 1}}).then({{"b", 1}}).otherwise({{"c", 1}}).responder("bot");
  HocRequest req;
  req.frame_id = 5;
  CHECK(op.on_request(req)->prefs == RawPrefs{{"a", 1}});
  req.frame_id = 6;
  const auto second = op.on_request(req);
  CHECK(second->prefs == RawPrefs{{"b", 1}});
  CHECK(second->responder == "bot");
  CHECK(op.on_request(req)->prefs == RawPrefs{{"c", 1}});
  CHECK(op.calls() == 3);

  const auto dir = fresh_dir("trailgate_operator_file");
  write_text(dir / "op.yaml",
             "responder: night-shift\nby_frame:\n  - {frame: 2, prefs: [{prompt: x, weight: 0.5}]}\n"
             "sequence:\n  - [{prompt: y, weight: -1}]\nfallback: [{prompt: z, weight: 0}]\n");
  auto file_op = ScriptedOperator::from_file(dir / "op.yaml");
  req.frame_id = 2;
  const auto r = file_op.on_request(req);
  CHECK(r->prefs == RawPrefs{{"x", 0.5}});
  CHECK(r->responder == "night-shift");
  req.frame_id = 3;
  CHECK(file_op.on_request(req)->prefs == RawPrefs{{"y", -1}});
  CHECK(file_op.on_request(req)->prefs == RawPrefs{{"z", 0}});
  CHECK_NOTHROW(ScriptedOperator::from_file(kDataDir / "operators" / "mud.yaml"));
  CHECK_NOTHROW(ScriptedOperator::from_file(kDataDir / "episodes" / "two-scene" / "operator.yaml"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("episode log records") {
  FrameOutcome o;
  o.frame_id = 7;
  o.scene_similarity = 0.5;
  o.u_roi = 0.75;
  o.u_roi_final = 0.25;
  o.events.push_back({EventKind::kHistoryUpdate, FrameId{3}, 0.97, std::nullopt, false});
  o.binary = BinaryMask(2, 2, {1, 0, 1, 1});
  o.prefs_after = prefs({{"mud", -0.5}, {"grass", 1}});
  const auto rec = outcome_record(o);
  CHECK(rec.at("frame_id") == 7);
  CHECK(rec.at("s_t") == 0.5);
  CHECK(rec.at("u_roi") == 0.75);
  CHECK(rec.at("u_roi_final") == 0.25);
  CHECK(rec.at("event") == "HISTORY_UPDATE");
  CHECK(rec.at("events")[0].at("matched_frame") == 3);
  CHECK(rec.at("traversable_px") == 3);
  CHECK(rec.at("fail_safe") == false);
  CHECK(rec.at("prefs")[0].at("prompt") == "mud");
  CHECK(rec.at("prefs")[0].at("weight") == -0.5);

  const auto dir = fresh_dir("trailgate_log");
  {
    EpisodeLog log(dir / "log.jsonl");
    log.append(o);
    log.append(nlohmann::json{{"x", 1}});
  }
  const auto lines = read_jsonl(dir / "log.jsonl");
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == rec);
  std::filesystem::remove_all(dir);
}

TEST_CASE("preview rendering") {
  const PooledMap pooled(2, 1, {-1.0, 1.0});
  const auto img = pooled_image(pooled);
  CHECK(img.channels == 1);
  CHECK(img.data == std::vector<std::uint8_t>{0, 255});
  CHECK(binary_image(BinaryMask(2, 1, {0, 1})).data == std::vector<std::uint8_t>{0, 255});
  CHECK(uncertainty_image(UncertaintyMap(1, 1, 1.0)).data == std::vector<std::uint8_t>{255});

  Image8 wide{640, 480, 1, std::vector<std::uint8_t>(640 * 480, 9)};
  const auto small = downscale(wide, 320);
  CHECK(small.width == 320);
  CHECK(small.height == 240);
  CHECK(small.data.size() == 320u * 240u);
  const auto same = downscale(small, 320);
  CHECK(same.width == 320);
  CHECK(frame_image(blank_frame(0, 4, 3)).channels == 3);
}
