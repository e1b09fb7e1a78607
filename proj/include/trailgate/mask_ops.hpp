#pragma once

#include <span>

#include "trailgate/types.hpp"

namespace trailgate {

/// Combines per-prompt attention maps into one signed traversability map.
/// Each mask is scaled by its prompt weight; per pixel, the weighted value
/// with the largest magnitude wins. Ties go to the lowest prompt index.
/// Throws kEmptyInput for k = 0 and kDimensionMismatch when the mask count
/// differs from prefs or the masks disagree on shape.
PooledMap weighted_max_pool(std::span<const AttentionMap> masks, const TraversalPrefs& prefs);

/// Same pooling with bare weights; used where preferences are not at hand.
PooledMap weighted_max_pool(std::span<const AttentionMap> masks, std::span<const double> weights);

/// 1 - max_n masks[n] per pixel.
UncertaintyMap uncertainty_map(std::span<const AttentionMap> masks);

/// Mean of unc over the set pixels of roi_mask.
double roi_uncertainty_score(const UncertaintyMap& unc, const BinaryMask& roi_mask);

/// Strict threshold: pixel is traversable iff pooled > theta_trav.
BinaryMask binarize(const PooledMap& pooled, double theta_trav);

}  // namespace trailgate
