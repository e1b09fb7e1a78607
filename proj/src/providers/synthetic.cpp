#include "trailgate/providers/synthetic.hpp"

#include <cmath>

namespace trailgate {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept { return splitmix64(a ^ splitmix64(b)); }

double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double smoothstep(double t) noexcept { return t * t * (3.0 - 2.0 * t); }

}  // namespace

bool Obstacle::covers(FrameId frame, double x, double y) const noexcept {
  if (frame < first_frame || frame > last_frame) return false;
  const double dt = static_cast<double>(frame - first_frame);
  const double g = growth * dt;
  const double left = x0 + vx * dt - g;
  const double right = x1 + vx * dt + g;
  const double top = y0 + vy * dt - g;
  const double bottom = y1 + vy * dt + g;
  return x >= left && x < right && y >= top && y < bottom;
}

std::string SyntheticScenario::label_for(FrameId id) const {
  if (id >= first_id && id - first_id < labels.size()) return labels[id - first_id];
  return "frame-" + std::to_string(id);
}

bool SyntheticScenario::in_obstacle(FrameId id, double x, double y) const noexcept {
  for (const auto& o : obstacles) {
    if (o.covers(id, x, y)) return true;
  }
  return false;
}

void SyntheticScenario::validate() const {
  if (width < 1 || height < 1) throw Error(Errc::kConfigError, "scenario dimensions must be positive");
  if (embedding_dim < 1) throw Error(Errc::kConfigError, "embedding_dim must be at least 1");
  if (!(attention_floor >= 0.0 && attention_floor <= 1.0)) {
    throw Error(Errc::kConfigError, "attention_floor must lie in [0, 1]");
  }
  if (noise_cells < 1) throw Error(Errc::kConfigError, "noise_cells must be at least 1");
  for (const auto& [label, v] : scene_vectors) {
    if (v.size() != embedding_dim) {
      throw Error(Errc::kConfigError, "scene vector '" + label + "' has dimension " + std::to_string(v.size()));
    }
    double n = 0.0;
    for (double c : v) n += c * c;
    if (!(n > 0.0)) throw Error(Errc::kConfigError, "scene vector '" + label + "' is zero");
  }
}

SyntheticMaskProvider::SyntheticMaskProvider(SyntheticScenario scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
}

AttentionMap SyntheticMaskProvider::mask_for(const Frame& frame, std::string_view prompt) const {
  const int cells = scenario_.noise_cells;
  const std::uint64_t key = mix(mix(scenario_.seed, frame.id), fnv1a64(prompt));
  std::vector<double> lattice(static_cast<std::size_t>(cells + 1) * (cells + 1));
  for (std::size_t i = 0; i < lattice.size(); ++i) lattice[i] = unit_interval(mix(key, i));

  const double floor = scenario_.attention_floor;
  AttentionMap map(frame.width, frame.height, 0.0);
  for (int y = 0; y < frame.height; ++y) {
    const double ny = (y + 0.5) / frame.height;
    const double gy = ny * cells;
    const int cy = std::min(static_cast<int>(gy), cells - 1);
    const double ty = smoothstep(gy - cy);
    for (int x = 0; x < frame.width; ++x) {
      const double nx = (x + 0.5) / frame.width;
      if (scenario_.in_obstacle(frame.id, nx, ny)) continue;
      const double gx = nx * cells;
      const int cx = std::min(static_cast<int>(gx), cells - 1);
      const double tx = smoothstep(gx - cx);
      auto at = [&](int i, int j) { return lattice[static_cast<std::size_t>(j) * (cells + 1) + i]; };
      const double top = at(cx, cy) * (1.0 - tx) + at(cx + 1, cy) * tx;
      const double bottom = at(cx, cy + 1) * (1.0 - tx) + at(cx + 1, cy + 1) * tx;
      const double noise = top * (1.0 - ty) + bottom * ty;
      map.at(x, y) = std::clamp(floor + (1.0 - floor) * noise, 0.0, 1.0);
    }
  }
  return map;
}

std::vector<AttentionMap> SyntheticMaskProvider::get_masks(const Frame& frame, std::span<const std::string> prompts) {
  std::vector<AttentionMap> out;
  out.reserve(prompts.size());
  for (const auto& p : prompts) out.push_back(mask_for(frame, p));
  return out;
}

SyntheticEmbeddingProvider::SyntheticEmbeddingProvider(SyntheticScenario scenario)
    : scenario_(std::move(scenario)) {
  scenario_.validate();
}

Embedding SyntheticEmbeddingProvider::embedding_for_label(const std::string& label) const {
  std::vector<double> v;
  if (auto it = scenario_.scene_vectors.find(label); it != scenario_.scene_vectors.end()) {
    v = it->second;
  } else {
    const std::uint64_t key = mix(scenario_.seed, fnv1a64(label));
    v.resize(scenario_.embedding_dim);
    double n = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = 2.0 * unit_interval(mix(key, i)) - 1.0;
      n += v[i] * v[i];
    }
    if (!(n > 0.0)) v[0] = 1.0;
  }
  double n = 0.0;
  for (double c : v) n += c * c;
  n = std::sqrt(n);
  for (double& c : v) c /= n;
  return Embedding{std::move(v)};
}

Embedding SyntheticEmbeddingProvider::get_embedding(const Frame& frame) {
  return embedding_for_label(scenario_.label_for(frame.id));
}

Frame render_synthetic_frame(const SyntheticScenario& scenario, std::size_t index) {
  const FrameId id = scenario.first_id + index;
  const std::uint64_t tint = fnv1a64(scenario.label_for(id));
  const int r0 = static_cast<int>(tint & 0x7f);
  const int g0 = static_cast<int>((tint >> 8) & 0x7f);
  const int b0 = static_cast<int>((tint >> 16) & 0x7f);
  Frame f{id, scenario.width, scenario.height, {}, static_cast<double>(index) / 10.0};
  f.pixels.resize(static_cast<std::size_t>(f.width) * f.height * 3);
  for (int y = 0; y < f.height; ++y) {
    const double ny = (y + 0.5) / f.height;
    for (int x = 0; x < f.width; ++x) {
      const double nx = (x + 0.5) / f.width;
      auto* px = &f.pixels[(static_cast<std::size_t>(y) * f.width + x) * 3];
      if (scenario.in_obstacle(id, nx, ny)) {
        px[0] = px[1] = px[2] = 20;
        continue;
      }
      px[0] = static_cast<std::uint8_t>(r0 + 100 * ny);
      px[1] = static_cast<std::uint8_t>(g0 + 100 * (1.0 - ny));
      px[2] = static_cast<std::uint8_t>(b0 + 100 * nx);
    }
  }
  return f;
}

}  // namespace trailgate
