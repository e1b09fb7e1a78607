#include "trailgate/mask_ops.hpp"

#include <cmath>
#include <string>

namespace trailgate {

namespace {

void check_stack(std::span<const AttentionMap> masks) {
  if (masks.empty()) {
    throw Error(Errc::kEmptyInput, "no attention maps supplied");
  }
  for (const auto& m : masks) {
    if (!m.same_shape(masks.front())) {
      throw Error(Errc::kDimensionMismatch, "attention maps differ in shape");
    }
  }
}

}  // namespace

PooledMap weighted_max_pool(std::span<const AttentionMap> masks, std::span<const double> weights) {
  check_stack(masks);
  if (weights.size() != masks.size()) {
    throw Error(Errc::kDimensionMismatch, std::to_string(masks.size()) + " masks for " +
                                              std::to_string(weights.size()) + " weights");
  }
  const auto& first = masks.front();
  PooledMap pooled(first.width(), first.height(), 0.0);
  const std::size_t k = masks.size();
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    double best = weights[0] * masks[0][i];
    for (std::size_t n = 1; n < k; ++n) {
      const double mu = weights[n] * masks[n][i];
      if (std::abs(mu) > std::abs(best)) best = mu;
    }
    pooled[i] = best;
  }
  return pooled;
}

PooledMap weighted_max_pool(std::span<const AttentionMap> masks, const TraversalPrefs& prefs) {
  const auto weights = prefs.weights();
  return weighted_max_pool(masks, std::span<const double>(weights));
}

UncertaintyMap uncertainty_map(std::span<const AttentionMap> masks) {
  check_stack(masks);
  const auto& first = masks.front();
  UncertaintyMap unc(first.width(), first.height(), 0.0);
  for (std::size_t i = 0; i < unc.size(); ++i) {
    double peak = masks[0][i];
    for (std::size_t n = 1; n < masks.size(); ++n) peak = std::max(peak, masks[n][i]);
    unc[i] = 1.0 - peak;
  }
  return unc;
}

double roi_uncertainty_score(const UncertaintyMap& unc, const BinaryMask& roi_mask) {
  if (!unc.same_shape(roi_mask)) {
    throw Error(Errc::kDimensionMismatch, "uncertainty map and ROI mask differ in shape");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < unc.size(); ++i) {
    if (roi_mask[i] != 0) {
      sum += unc[i];
      ++count;
    }
  }
  if (count == 0) {
    throw Error(Errc::kEmptyRoi, "ROI mask has no set pixel");
  }
  return sum / static_cast<double>(count);
}

BinaryMask binarize(const PooledMap& pooled, double theta_trav) {
  BinaryMask out(pooled.width(), pooled.height(), std::uint8_t{0});
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    out[i] = pooled[i] > theta_trav ? 1 : 0;
  }
  return out;
}

}  // namespace trailgate
