#pragma once

// Shared generators, reference implementations and test doubles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "trailgate/core.hpp"
#include "trailgate/engine.hpp"
#include "trailgate/mask_ops.hpp"
#include "trailgate/scene_memory.hpp"

namespace tg_test {

using namespace trailgate;

inline const std::filesystem::path kDataDir = TRAILGATE_DATA_DIR;
inline const std::filesystem::path kGoldenDir = TRAILGATE_GOLDEN_DIR;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(gen_); }

  /// Values drawn from a small grid so ties actually happen.
  double grid_weight() {
    static constexpr double kLevels[] = {-1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0};
    return kLevels[uniform_int(0, 6)];
  }
  double grid_unit() { return uniform_int(0, 8) / 8.0; }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline AttentionMap random_map(Rng& rng, int w, int h, bool coarse) {
  AttentionMap m(w, h);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = coarse ? rng.grid_unit() : rng.uniform(0.0, 1.0);
  return m;
}

inline std::vector<AttentionMap> random_maps(Rng& rng, int k, int w, int h) {
  const bool coarse = rng.coin();
  std::vector<AttentionMap> out;
  for (int n = 0; n < k; ++n) out.push_back(random_map(rng, w, h, coarse));
  return out;
}

inline std::vector<double> random_weights(Rng& rng, int k) {
  const bool coarse = rng.coin();
  std::vector<double> w;
  for (int n = 0; n < k; ++n) w.push_back(coarse ? rng.grid_weight() : rng.uniform(-1.0, 1.0));
  return w;
}

/// Random valid preferences drawn from a small prompt vocabulary so that
/// independently generated sets overlap.
inline TraversalPrefs random_prefs(Rng& rng, int max_k, int min_k = 1) {
  static const std::vector<std::string> kVocab = {"grass", "bush", "dirt", "mud",  "water", "gravel",
                                                  "rock",  "tree", "sand", "path", "log",   "snow"};
  std::vector<std::string> pool = kVocab;
  std::shuffle(pool.begin(), pool.end(), rng.engine());
  const int k = rng.uniform_int(min_k, max_k);
  RawPrefs raw;
  for (int i = 0; i < k; ++i) raw.emplace_back(pool[i], rng.grid_weight());
  return validate_prefs(raw, PrefsArity::kAllowEmpty);
}

inline TraversalPrefs prefs(const RawPrefs& raw) { return validate_prefs(raw, PrefsArity::kAllowEmpty); }

/// Copies a grid's values; safe to call on temporaries in a range-for.
template <typename G>
std::vector<typename G::value_type> values_of(const G& grid) {
  return {grid.values().begin(), grid.values().end()};
}

// --- reference implementations -------------------------------------------

/// Per-pixel loop: form every weighted response, keep the
/// first one of largest magnitude.
inline std::vector<double> oracle_pool(const std::vector<AttentionMap>& masks, const std::vector<double>& w) {
  const std::size_t pixels = masks.front().size();
  std::vector<double> out(pixels);
  for (std::size_t p = 0; p < pixels; ++p) {
    std::vector<double> mu;
    for (std::size_t n = 0; n < masks.size(); ++n) mu.push_back(w[n] * masks[n][p]);
    const auto best = std::max_element(mu.begin(), mu.end(),
                                       [](double a, double b) { return std::fabs(a) < std::fabs(b); });
    out[p] = *best;
  }
  return out;
}

inline std::vector<double> oracle_uncertainty(const std::vector<AttentionMap>& masks) {
  std::vector<double> out(masks.front().size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    double hi = -1.0;
    for (const auto& m : masks) hi = std::max(hi, m[p]);
    out[p] = 1.0 - hi;
  }
  return out;
}

/// Winding-number point-in-polygon test (the library uses crossing parity).
inline bool oracle_inside(const std::vector<Point2>& poly, double x, double y) {
  int winding = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % poly.size()];
    const double cross = (b.x - a.x) * (y - a.y) - (x - a.x) * (b.y - a.y);
    if (a.y <= y) {
      if (b.y > y && cross > 0) ++winding;
    } else {
      if (b.y <= y && cross < 0) --winding;
    }
  }
  return winding != 0;
}

struct OracleIou {
  double trav = 0.0;
  double non_trav = 0.0;
  double mean = 0.0;
};

/// 2 x 2 confusion matrix indexed [gt][pred], then per-class IoU =
/// diagonal / (row + column - diagonal).
inline OracleIou oracle_miou(const std::vector<int>& pred, const std::vector<int>& gt, const std::vector<int>& ignore) {
  long long cm[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (ignore[i]) continue;
    ++cm[gt[i]][pred[i]];
  }
  double iou[2];
  for (int c = 0; c < 2; ++c) {
    const long long inter = cm[c][c];
    const long long uni = cm[c][0] + cm[c][1] + cm[0][c] + cm[1][c] - inter;
    iou[c] = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  return {iou[1], iou[0], (iou[0] + iou[1]) / 2.0};
}

/// Set semantics of the merge: a map from prompt to weight where the update
/// wins.
inline std::map<std::string, double> oracle_merge(const TraversalPrefs& base, const TraversalPrefs& update) {
  std::map<std::string, double> out;
  for (const auto& pw : base) out[pw.prompt] = pw.weight;
  for (const auto& pw : update) out[pw.prompt] = pw.weight;
  return out;
}

inline std::map<std::string, double> as_map(const TraversalPrefs& p) {
  std::map<std::string, double> out;
  for (const auto& pw : p) out[pw.prompt] = pw.weight;
  return out;
}

// --- test doubles ----------------------------------------------------------

inline Frame blank_frame(FrameId id, int w = 8, int h = 6) {
  Frame f{id, w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3, 0), std::nullopt};
  return f;
}

/// Mask provider whose output is a function supplied by the test.
class ScriptedMasks final : public MaskProvider {
 public:
  using Fn = std::function<double(FrameId, const std::string& prompt, int x, int y)>;
  explicit ScriptedMasks(Fn fn) : fn_(std::move(fn)) {}

  std::vector<AttentionMap> get_masks(const Frame& frame, std::span<const std::string> prompts) override {
    ++calls;
    std::vector<AttentionMap> out;
    for (const auto& p : prompts) {
      AttentionMap m(frame.width, frame.height);
      for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) m.at(x, y) = fn_(frame.id, p, x, y);
      }
      out.push_back(std::move(m));
    }
    return out;
  }

  int calls = 0;

 private:
  Fn fn_;
};

inline ScriptedMasks constant_masks(double v) {
  return ScriptedMasks([v](FrameId, const std::string&, int, int) { return v; });
}

/// Embedding provider with a fixed vector per frame id; unlisted frames reuse
/// the most recent listed vector at or before them.
class ScriptedEmbeddings final : public EmbeddingProvider {
 public:
  explicit ScriptedEmbeddings(std::map<FrameId, std::vector<double>> by_frame) : by_frame_(std::move(by_frame)) {}

  Embedding get_embedding(const Frame& frame) override {
    ++calls;
    auto it = by_frame_.upper_bound(frame.id);
    if (it != by_frame_.begin()) --it;
    return Embedding{it->second};
  }

  int calls = 0;

 private:
  std::map<FrameId, std::vector<double>> by_frame_;
};

/// Operator that records requests and answers nothing, leaving the request
/// pending for another thread to resolve.
class SilentOperator final : public Operator {
 public:
  std::optional<HocResponse> on_request(const HocRequest& request) override {
    std::lock_guard lock(mu);
    requests.push_back(request.request_id);
    return std::nullopt;
  }
  void on_resolved(const HocResolution& r) override {
    std::lock_guard lock(mu);
    resolved.push_back(r);
  }

  std::mutex mu;
  std::vector<std::uint64_t> requests;
  std::vector<HocResolution> resolved;
};

inline RoiSpec full_roi() { return {"full", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}}; }
inline RoiSpec bottom_half_roi() { return {"bottom", {{0, 0.5}, {1, 0.5}, {1, 1}, {0, 1}}}; }

inline EngineConfig engine_config(RawPrefs initial, double theta_scene = 0.925, double theta_roi = 0.5,
                                  RoiSpec roi = bottom_half_roi()) {
  EngineConfig c;
  c.theta_scene = theta_scene;
  c.theta_roi = theta_roi;
  c.roi = std::move(roi);
  c.initial_prefs = validate_prefs(initial);
  return c;
}

}  // namespace tg_test
