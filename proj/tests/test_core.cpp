#include <doctest.h>

#include "support.hpp"

using namespace tg_test;

TEST_CASE("validate_prefs accepts a three-prompt rover set") {
  const auto p = validate_prefs({{"grass", 1}, {"bush", -1}, {"dirt", 1}});
  CHECK(p.size() == 3);
  CHECK(p.prompts() == std::vector<std::string>{"grass", "bush", "dirt"});
  CHECK(p.weights() == std::vector<double>{1, -1, 1});
}

TEST_CASE("validate_prefs errors") {
  auto code_of = [](const RawPrefs& raw, PrefsArity arity = PrefsArity::kAtLeastOne) {
    try {
      validate_prefs(raw, arity);
    } catch (const Error& e) {
      return e.code();
    }
    FAIL("no error");
    return Errc::kIoError;
  };
  CHECK(code_of({{"grass", 1}, {"grass", -1}}) == Errc::kDuplicatePrompt);
  CHECK(code_of({{"water", -1.5}}) == Errc::kWeightOutOfRange);
  CHECK(code_of({{"water", 1.0000001}}) == Errc::kWeightOutOfRange);
  CHECK(code_of({{"water", std::nan("")}}) == Errc::kWeightOutOfRange);
  CHECK(code_of({{"   ", 0.5}}) == Errc::kEmptyPrompt);
  CHECK(code_of({}) == Errc::kEmptyPrefs);
  CHECK(validate_prefs(RawPrefs{}, PrefsArity::kAllowEmpty).empty());
}

TEST_CASE("prompts are trimmed and compared case-sensitively") {
  const auto p = validate_prefs({{"  grass ", 1}, {"Grass", 0}});
  CHECK(p.prompts() == std::vector<std::string>{"grass", "Grass"});
  CHECK_THROWS_AS(validate_prefs({{"grass", 1}, {" grass", 0}}), Error);
  CHECK(validate_prefs({{"rock", 0}}).weight_of("rock") == 0.0);
}

TEST_CASE("property: surviving prefs satisfy every invariant") {
  Rng rng(101);
  int accepted = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    RawPrefs raw;
    const int k = rng.uniform_int(0, 6);
    for (int i = 0; i < k; ++i) {
      const std::string prompt = rng.coin(0.1) ? " " : std::string(1, static_cast<char>('a' + rng.uniform_int(0, 5)));
      raw.emplace_back(prompt, rng.uniform(-1.3, 1.3));
    }
    try {
      const auto p = validate_prefs(raw);
      ++accepted;
      std::set<std::string> seen;
      for (const auto& pw : p) {
        CHECK(!pw.prompt.empty());
        CHECK(pw.weight >= -1.0);
        CHECK(pw.weight <= 1.0);
        CHECK(seen.insert(pw.prompt).second);
      }
      CHECK(p.size() >= 1);
    } catch (const Error&) {
    }
  }
  CHECK(accepted > 100);
}

TEST_CASE("rasterize_roi examples") {
  CHECK(count_set(rasterize_roi(full_roi(), 4, 4)) == 16);

  const auto bottom = rasterize_roi(bottom_half_roi(), 4, 4);
  CHECK(count_set(bottom) == 8);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) CHECK(bottom.at(x, y) == (y >= 2 ? 1 : 0));
  }

  const RoiSpec sliver{"sliver", {{0.1, 0.1}, {0.12, 0.1}, {0.12, 0.12}}};
  CHECK_THROWS_AS(rasterize_roi(sliver, 4, 4), Error);
  try {
    rasterize_roi(sliver, 4, 4);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDegenerateRoi);
  }
}

TEST_CASE("rasterize_roi clamps vertices outside the unit square") {
  const RoiSpec outside{"outside", {{1.2, 0.0}, {1.5, 0.0}, {1.5, 1.0}, {1.2, 1.0}}};
  try {
    rasterize_roi(outside, 8, 8);
    FAIL("expected DegenerateRoi");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDegenerateRoi);
  }
}

TEST_CASE("validate_roi rejects malformed polygons") {
  CHECK_THROWS_AS(validate_roi({"two", {{0, 0}, {1, 1}}}), Error);
  CHECK_THROWS_AS(validate_roi({"bowtie", {{0, 0}, {1, 1}, {1, 0}, {0, 1}}}), Error);
  CHECK_THROWS_AS(validate_roi({"range", {{0, 0}, {1.5, 0}, {1, 1}}}), Error);
  CHECK_NOTHROW(validate_roi(bottom_half_roi()));
}

namespace {

std::vector<Point2> random_convex(Rng& rng) {
  // Points on an ellipse at sorted angles form a convex polygon.
  const int n = rng.uniform_int(3, 8);
  const double cx = rng.uniform(0.3, 0.7), cy = rng.uniform(0.3, 0.7);
  const double rx = rng.uniform(0.15, 0.3), ry = rng.uniform(0.15, 0.3);
  std::vector<double> angles;
  for (int i = 0; i < n; ++i) angles.push_back(rng.uniform(0.0, 2 * M_PI));
  std::sort(angles.begin(), angles.end());
  std::vector<Point2> poly;
  for (double a : angles) poly.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
  return poly;
}

}  // namespace

TEST_CASE("property: rasterization agrees with a winding-number oracle") {
  Rng rng(7);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const RoiSpec roi{"r", random_convex(rng)};
    const int w = rng.uniform_int(4, 40), h = rng.uniform_int(4, 40);
    BinaryMask mask;
    try {
      mask = rasterize_roi(roi, w, h);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kDegenerateRoi);
      continue;
    }
    ++checked;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        CHECK(mask.at(x, y) == (oracle_inside(roi.polygon, (x + 0.5) / w, (y + 0.5) / h) ? 1 : 0));
      }
    }
  }
  CHECK(checked > 200);
}

TEST_CASE("property: rasterization is deterministic and scale-consistent on rectangles") {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const double x0 = rng.uniform(0, 0.8), y0 = rng.uniform(0, 0.8);
    const double x1 = rng.uniform(x0 + 0.1, 1.0), y1 = rng.uniform(y0 + 0.1, 1.0);
    const RoiSpec roi{"rect", {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
    const int w = rng.uniform_int(10, 50), h = rng.uniform_int(10, 50);
    const auto a = rasterize_roi(roi, w, h);
    CHECK(a == rasterize_roi(roi, w, h));
    const auto b = rasterize_roi(roi, 2 * w, 2 * h);
    CHECK(count_set(b) >= 2 * count_set(a));
  }
}

TEST_CASE("EngineConfig::validate ranges") {
  auto cfg = engine_config({{"grass", 1}});
  CHECK_NOTHROW(cfg.validate());
  cfg.theta_roi = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.theta_roi = 0.5;
  cfg.theta_trav = -2;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.theta_trav = 0;
  cfg.hoc_timeout_s = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.hoc_timeout_s = 1;
  cfg.initial_prefs = {};
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("Frame::validate checks the buffer size") {
  auto f = blank_frame(0, 4, 3);
  CHECK_NOTHROW(f.validate());
  f.pixels.pop_back();
  CHECK_THROWS_AS(f.validate(), Error);
  Frame empty{0, 0, 0, {}, std::nullopt};
  CHECK_THROWS_AS(empty.validate(), Error);
}
