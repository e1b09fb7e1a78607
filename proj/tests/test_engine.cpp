#include <doctest.h>

#include <thread>

#include "support.hpp"

using namespace tg_test;

namespace {

std::vector<double> unit(double x, double y) { return {x, y}; }

struct Rig {
  ScriptedMasks masks;
  ScriptedEmbeddings embeddings;
  ScriptedOperator op;
  Engine engine;

  Rig(EngineConfig config, ScriptedMasks m, ScriptedEmbeddings e, ScriptedOperator o = {})
      : masks(std::move(m)), embeddings(std::move(e)), op(std::move(o)), engine(std::move(config), masks, embeddings, op) {}

  std::vector<FrameOutcome> run(FrameId frames) {
    std::vector<FrameOutcome> out;
    engine.init_episode(blank_frame(0));
    for (FrameId id = 0; id < frames; ++id) out.push_back(engine.step(blank_frame(id)));
    return out;
  }
};

}  // namespace

TEST_CASE("both gates closed gives NO_CALL and unchanged prefs") {
  Rig rig(engine_config({{"grass", 1}}), constant_masks(0.9), ScriptedEmbeddings({{0, unit(1, 0)}}));
  const auto out = rig.run(3);
  for (const auto& o : out) {
    CHECK(o.event() == EventKind::kNoCall);
    CHECK(o.events.empty());
    CHECK(o.scene_similarity == doctest::Approx(1.0));
    CHECK(o.u_roi == doctest::Approx(0.1));
    CHECK(o.prefs_after == prefs({{"grass", 1}}));
  }
  CHECK(rig.op.calls() == 0);
}

TEST_CASE("revisited scene resolves from history without the operator") {
  const double c = std::sqrt(1.0 - 0.04);
  ScriptedOperator op;
  op.answer_frame(1, {{"mud", -0.5}}).answer_frame(2, {{"gravel", 0.8}});
  Rig rig(engine_config({{"grass", 1}}), constant_masks(0.9),
          ScriptedEmbeddings({{0, unit(0, 1)}, {1, unit(1, 0)}, {2, unit(0.2, c)}, {3, unit(1, 0)}}), std::move(op));
  const auto out = rig.run(4);

  CHECK(out[1].event() == EventKind::kHocSceneChange);
  CHECK(out[2].event() == EventKind::kHocSceneChange);
  REQUIRE(out[3].event() == EventKind::kHistoryUpdate);
  CHECK(out[3].scene_similarity == doctest::Approx(0.2));
  CHECK(out[3].events[0].matched_frame == FrameId{1});
  CHECK(*out[3].events[0].match_similarity == doctest::Approx(1.0));
  CHECK(rig.op.calls() == 2);
  CHECK(rig.engine.memory().history().size() == 2);
  CHECK(rig.engine.memory().reference() == Embedding{unit(1, 0)});
  // The matched entry's prefs win over the gravel update that came later.
  CHECK(out[3].prefs_after.entries() ==
        std::vector<PromptWeight>{{"mud", -0.5}, {"grass", 1}, {"gravel", 0.8}});
}

TEST_CASE("zero attention in the ROI triggers an unknown object call on frame 0") {
  ScriptedOperator op;
  op.otherwise({});
  Rig rig(engine_config({{"grass", 1}}), constant_masks(0.0), ScriptedEmbeddings({{0, unit(1, 0)}}), std::move(op));
  const auto out = rig.run(1);
  REQUIRE(out[0].event() == EventKind::kHocUnknownObject);
  CHECK(out[0].u_roi == 1.0);
  CHECK(out[0].u_roi_final == 1.0);
  CHECK(rig.op.reasons() == std::vector<HocReason>{HocReason::kUnknownObject});
  CHECK(rig.engine.memory().history().size() == 1);
}

TEST_CASE("init rejects empty prefs") {
  CHECK_THROWS_AS(engine_config({}), Error);
  EngineConfig c = engine_config({{"grass", 1}});
  c.initial_prefs = TraversalPrefs{};
  auto m = constant_masks(1);
  ScriptedEmbeddings e({{0, unit(1, 0)}});
  ScriptedOperator op;
  CHECK_THROWS_AS(Engine(c, m, e, op), Error);
}

TEST_CASE("step rules: ordering and initialization") {
  Rig rig(engine_config({{"grass", 1}}), constant_masks(0.9), ScriptedEmbeddings({{0, unit(1, 0)}}));
  CHECK_THROWS_AS(rig.engine.step(blank_frame(0)), Error);
  rig.engine.init_episode(blank_frame(5));
  rig.engine.step(blank_frame(5));
  CHECK_THROWS_AS(rig.engine.step(blank_frame(5)), Error);
  CHECK_THROWS_AS(rig.engine.step(blank_frame(4)), Error);
  CHECK_NOTHROW(rig.engine.step(blank_frame(9)));
}

TEST_CASE("operator answer is merged and recorded") {
  ScriptedOperator op;
  op.answer_frame(1, {{"mud", -0.5}});
  Rig rig(engine_config({{"grass", 1}}), constant_masks(0.9), ScriptedEmbeddings({{0, unit(1, 0)}, {1, unit(0, 1)}}),
          std::move(op));
  const auto out = rig.run(2);
  CHECK(out[1].event() == EventKind::kHocSceneChange);
  CHECK(out[1].prefs_after.entries() == std::vector<PromptWeight>{{"mud", -0.5}, {"grass", 1}});
  const auto memory = rig.engine.memory();
  REQUIRE(memory.history().size() == 1);
  CHECK(memory.history()[0].frame_id == 1);
  CHECK(memory.history()[0].prefs == out[1].prefs_after);
  CHECK(memory.reference() == Embedding{unit(0, 1)});
}

TEST_CASE("empty operator answer keeps prefs but still updates memory") {
  ScriptedOperator op;
  op.otherwise({});
  Rig rig(engine_config({{"grass", 1}}), constant_masks(0.9), ScriptedEmbeddings({{0, unit(1, 0)}, {1, unit(0, 1)}}),
          std::move(op));
  const auto out = rig.run(3);
  CHECK(out[1].event() == EventKind::kHocSceneChange);
  CHECK(out[1].prefs_after == prefs({{"grass", 1}}));
  CHECK(rig.engine.memory().history().size() == 1);
  CHECK(rig.engine.memory().reference() == Embedding{unit(0, 1)});
  CHECK(out[2].event() == EventKind::kNoCall);
}

TEST_CASE("masks are recomputed once after a prefs change") {
  // "mud" explains everything, so the unknown-object gate stays closed only
  // if the frame is re-pooled with the updated prompts.
  ScriptedMasks masks([](FrameId, const std::string& p, int, int) { return p == "mud" ? 1.0 : 0.0; });
  ScriptedOperator op;
  op.answer_frame(1, {{"mud", -0.5}});
  Rig rig(engine_config({{"grass", 1}}), std::move(masks), ScriptedEmbeddings({{0, unit(1, 0)}, {1, unit(0, 1)}}),
          std::move(op));
  rig.engine.init_episode(blank_frame(0));
  rig.op.otherwise({});
  const auto f0 = rig.engine.step(blank_frame(0));
  CHECK(f0.event() == EventKind::kHocUnknownObject);
  const auto f1 = rig.engine.step(blank_frame(1));
  CHECK(f1.events.size() == 1);
  CHECK(f1.event() == EventKind::kHocSceneChange);
  CHECK(f1.u_roi == 0.0);
  for (double v : f1.pooled.values()) CHECK(v == -0.5);
}

TEST_CASE("scene call followed by unknown object in one frame") {
  ScriptedOperator op;
  op.otherwise({{"mud", -0.5}});
  Rig rig(engine_config({{"grass", 1}}), constant_masks(0.0), ScriptedEmbeddings({{0, unit(1, 0)}, {1, unit(0, 1)}}),
          std::move(op));
  rig.engine.init_episode(blank_frame(0));
  const auto f1 = rig.engine.step(blank_frame(1));
  REQUIRE(f1.events.size() == 2);
  CHECK(f1.events[0].kind == EventKind::kHocSceneChange);
  CHECK(f1.events[1].kind == EventKind::kHocUnknownObject);
  CHECK(f1.u_roi == 1.0);
}

TEST_CASE("resolve_hoc without a pending call") {
  Rig rig(engine_config({{"grass", 1}}), constant_masks(0.9), ScriptedEmbeddings({{0, unit(1, 0)}}));
  rig.engine.init_episode(blank_frame(0));
  try {
    rig.engine.resolve_hoc({0, {{"mud", -0.5}}, "x", std::nullopt});
    FAIL("expected NoPendingRequest");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kNoPendingRequest);
  }
}

TEST_CASE("asynchronous resolve unblocks step; double resolve is rejected") {
  SilentOperator op;
  auto masks = constant_masks(0.9);
  ScriptedEmbeddings emb({{0, unit(1, 0)}, {1, unit(0, 1)}});
  Engine engine(engine_config({{"grass", 1}}), masks, emb, op);
  engine.init_episode(blank_frame(0));
  engine.step(blank_frame(0));

  std::thread responder([&] {
    while (!engine.pending()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    const auto req = *engine.pending();
    CHECK(req.reason == HocReason::kSceneChange);
    CHECK(req.frame_id == 1);
    try {
      engine.resolve_hoc({req.request_id, {{"water", 2.0}}, "human", std::nullopt});
      FAIL("expected WeightOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kWeightOutOfRange);
    }
    CHECK(engine.pending());
    const auto res = engine.resolve_hoc({req.request_id, {{"mud", -0.5}}, "human", std::nullopt});
    CHECK(res.prefs_after.entries() == std::vector<PromptWeight>{{"mud", -0.5}, {"grass", 1}});
    CHECK_THROWS_AS(engine.resolve_hoc({req.request_id, {}, "human", std::nullopt}), Error);
  });
  const auto out = engine.step(blank_frame(1));
  responder.join();
  CHECK(out.event() == EventKind::kHocSceneChange);
  CHECK_FALSE(out.fail_safe);
  CHECK(out.prefs_after.contains("mud"));
  REQUIRE(op.resolved.size() == 1);
  CHECK(op.resolved[0].responder == "human");
}

TEST_CASE("operator timeout gives a fail-safe frame and keeps the request pending") {
  SilentOperator op;
  auto masks = constant_masks(0.9);
  ScriptedEmbeddings emb({{0, unit(1, 0)}, {1, unit(0, 1)}});
  EngineConfig config = engine_config({{"grass", 1}});
  config.hoc_timeout_s = 0.05;
  Engine engine(config, masks, emb, op);
  engine.init_episode(blank_frame(0));

  const auto f1 = engine.step(blank_frame(1));
  CHECK(f1.fail_safe);
  CHECK(f1.events.at(0).timed_out);
  for (auto v : f1.binary.values()) CHECK(v == 0);
  REQUIRE(engine.pending());
  const auto id = engine.pending()->request_id;

  const auto f2 = engine.step(blank_frame(2));
  CHECK(f2.fail_safe);
  CHECK(f2.event() == EventKind::kAwaitingOperator);
  CHECK(f2.events[0].request_id == id);
  CHECK(op.requests.size() == 1);

  engine.resolve_hoc({id, {}, "late", std::nullopt});
  const auto f3 = engine.step(blank_frame(3));
  CHECK_FALSE(f3.fail_safe);
  CHECK(f3.event() == EventKind::kNoCall);
  for (auto v : f3.binary.values()) CHECK(v == 1);
}

TEST_CASE("staged thresholds apply at the next frame") {
  ScriptedOperator op;
  Rig rig(engine_config({{"grass", 1}}), constant_masks(0.9), ScriptedEmbeddings({{0, unit(1, 0)}}), std::move(op));
  rig.engine.init_episode(blank_frame(0));
  CHECK(rig.engine.step(blank_frame(0)).event() == EventKind::kNoCall);
  rig.engine.stage_thresholds(std::nullopt, 0.05);
  CHECK(rig.engine.config().theta_roi == 0.5);
  CHECK(rig.engine.step(blank_frame(1)).event() == EventKind::kHocUnknownObject);
  CHECK(rig.engine.config().theta_roi == 0.05);
  CHECK_THROWS_AS(rig.engine.stage_thresholds(std::nullopt, 1.5), Error);
  CHECK_THROWS_AS(rig.engine.stage_thresholds(std::numeric_limits<double>::infinity(), std::nullopt), Error);
}

namespace {

/// Random scripted episode: random embeddings from a small palette, random
/// smooth masks, random operator answers.
struct RandomEpisode {
  std::map<FrameId, std::vector<double>> embeddings;
  std::uint64_t mask_seed;
  FrameId frames;
  RawPrefs initial;

  ScriptedMasks masks() const {
    const auto seed = mask_seed;
    return ScriptedMasks([seed](FrameId f, const std::string& p, int x, int y) {
      const auto h = fnv1a64(p, seed ^ (f * 0x9e3779b97f4a7c15ULL) ^ static_cast<std::uint64_t>(x * 31 + y));
      return static_cast<double>(h % 9) / 8.0;
    });
  }
};

RandomEpisode random_episode(Rng& rng) {
  RandomEpisode ep;
  ep.frames = static_cast<FrameId>(rng.uniform_int(2, 12));
  ep.mask_seed = static_cast<std::uint64_t>(rng.uniform_int(0, 1 << 30));
  std::vector<std::vector<double>> palette;
  for (int i = rng.uniform_int(1, 4); i > 0; --i) palette.push_back({rng.uniform(0.1, 1), rng.uniform(-1, 1)});
  for (FrameId f = 0; f < ep.frames; ++f) ep.embeddings[f] = palette[rng.uniform_int(0, int(palette.size()) - 1)];
  for (const auto& pw : random_prefs(rng, 4)) ep.initial.emplace_back(pw.prompt, pw.weight);
  return ep;
}

ScriptedOperator random_operator(Rng& rng) {
  ScriptedOperator op;
  for (int i = rng.uniform_int(0, 5); i > 0; --i) {
    RawPrefs raw;
    for (const auto& pw : random_prefs(rng, 3, 0)) raw.emplace_back(pw.prompt, pw.weight);
    op.then(raw);
  }
  return op;
}

}  // namespace

TEST_CASE("property: gate soundness, saturation, determinism and growing prompts") {
  Rng rng(1234);
  for (int trial = 0; trial < 60; ++trial) {
    const auto ep = random_episode(rng);
    const auto op = random_operator(rng);
    const RoiSpec roi = rng.coin() ? full_roi() : bottom_half_roi();

    {
      Rig rig(engine_config(ep.initial, -1.5, 1.0, roi), ep.masks(), ScriptedEmbeddings(ep.embeddings), op);
      for (const auto& o : rig.run(ep.frames)) CHECK(o.events.empty());
      CHECK(rig.op.calls() == 0);
    }
    {
      Rig rig(engine_config(ep.initial, 1.5, 1.0, roi), ep.masks(), ScriptedEmbeddings(ep.embeddings), op);
      for (const auto& o : rig.run(ep.frames)) {
        REQUIRE_FALSE(o.events.empty());
        CHECK(o.events[0].kind == EventKind::kHocSceneChange);
      }
    }
    const double theta_scene = rng.uniform(-0.5, 1.0);
    const double theta_roi = rng.grid_unit();
    Rig a(engine_config(ep.initial, theta_scene, theta_roi, roi), ep.masks(), ScriptedEmbeddings(ep.embeddings), op);
    Rig b(engine_config(ep.initial, theta_scene, theta_roi, roi), ep.masks(), ScriptedEmbeddings(ep.embeddings), op);
    const auto ra = a.run(ep.frames);
    const auto rb = b.run(ep.frames);
    REQUIRE(ra.size() == rb.size());
    std::set<std::string> seen;
    for (const auto& pw : validate_prefs(ep.initial)) seen.insert(pw.prompt);
    for (std::size_t i = 0; i < ra.size(); ++i) {
      CHECK(ra[i].events == rb[i].events);
      CHECK(ra[i].pooled == rb[i].pooled);
      CHECK(ra[i].binary == rb[i].binary);
      CHECK(ra[i].prefs_after == rb[i].prefs_after);
      CHECK(ra[i].u_roi == rb[i].u_roi);

      const auto prompts = ra[i].prefs_after.prompts();
      const std::set<std::string> now(prompts.begin(), prompts.end());
      CHECK(std::includes(now.begin(), now.end(), seen.begin(), seen.end()));
      seen = now;

      if (ra[i].has(EventKind::kHistoryUpdate) || ra[i].has(EventKind::kHocSceneChange)) {
        CHECK(ra[i].scene_similarity < theta_scene);
      }
      if (ra[i].has(EventKind::kHocUnknownObject)) CHECK(ra[i].u_roi > theta_roi);
    }
    CHECK(a.engine.memory().history().size() == a.op.calls());
  }
}

TEST_CASE("property: alternating scenes need at most two operator calls") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const double angle = rng.uniform(0.5, 3.0);
    const std::vector<double> a = {1, 0}, b = {std::cos(angle), std::sin(angle)};
    const double theta = rng.uniform(std::cos(angle) + 1e-6, 1.0);
    std::map<FrameId, std::vector<double>> emb;
    const FrameId frames = static_cast<FrameId>(rng.uniform_int(4, 30));
    const int run = rng.uniform_int(1, 4);
    for (FrameId f = 0; f < frames; ++f) emb[f] = (f / run) % 2 == 0 ? a : b;
    Rig rig(engine_config({{"grass", 1}}, theta, 1.0), constant_masks(0.9), ScriptedEmbeddings(emb));
    const auto out = rig.run(frames);
    CHECK(rig.op.calls() <= 2);
    int calls = 0;
    for (const auto& o : out) {
      if (o.has(EventKind::kHocSceneChange)) ++calls;
      if (calls == 2) {
        CHECK_FALSE(o.has(EventKind::kHocUnknownObject));
      }
    }
    CHECK(calls == static_cast<int>(rig.op.calls()));
  }
}
