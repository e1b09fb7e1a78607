#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "trailgate/types.hpp"

namespace trailgate {

/// dot(a, b) / (|a| |b|), clamped to [-1, 1].
/// Throws kDimensionMismatch or kZeroVector.
double cosine_similarity(const Embedding& a, const Embedding& b);

// merge_prefs(base, update) is declared in types.hpp: every entry of update,
// in update's order, followed by the entries of base whose prompt the update
// does not mention, in base's order.

struct HistoryEntry {
  Embedding embedding;
  TraversalPrefs prefs;
  FrameId frame_id = 0;
  double created_at = 0.0;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct HistoryMatch {
  HistoryEntry entry;
  double similarity = 0.0;
};

/// Reference scene embedding plus the append-only record of operator calls.
/// Owned by one engine; all embeddings share the dimension of the first one
/// seen.
class SceneMemory {
 public:
  SceneMemory() = default;

  const std::optional<Embedding>& reference() const noexcept { return reference_; }
  const std::vector<HistoryEntry>& history() const noexcept { return history_; }
  std::optional<std::size_t> dimension() const noexcept { return dim_; }

  void set_reference(const Embedding& e);

  /// e* <- e_t and H <- H + {(e_t, prefs)}.
  void record_hoc(const Embedding& e_t, const TraversalPrefs& prefs, FrameId frame_id, double created_at);

  /// Most similar history entry, returned only when its similarity reaches
  /// theta_scene. Earliest entry wins ties.
  std::optional<HistoryMatch> find_match(const Embedding& e_t, double theta_scene) const;

  /// Loads entries written by save_history(); reference is left unset.
  static SceneMemory load_history(const std::filesystem::path& path);
  void save_history(const std::filesystem::path& path) const;

 private:
  void check_dim(const Embedding& e);

  std::optional<Embedding> reference_;
  std::vector<HistoryEntry> history_;
  std::optional<std::size_t> dim_;
};

}  // namespace trailgate
