#pragma once

#include "trailgate/types.hpp"

namespace trailgate {

/// Builds preferences from raw operator input. Prompts are trimmed of
/// surrounding whitespace and compared by exact, case-sensitive identity.
/// Errors: kEmptyPrompt, kWeightOutOfRange, kDuplicatePrompt, and kEmptyPrefs
/// when arity is kAtLeastOne and no entry is given.
TraversalPrefs validate_prefs(const RawPrefs& raw, PrefsArity arity = PrefsArity::kAtLeastOne);

/// Checks the RoiSpec invariants: at least three vertices, coordinates in
/// [0, 1] and no self-intersection. Throws kInvalidRoi.
void validate_roi(const RoiSpec& roi);

/// Pixel (x, y) is set iff its center ((x+0.5)/width, (y+0.5)/height) lies
/// inside the polygon under the even-odd rule. Vertices are clamped to the
/// unit square first. Throws kDegenerateRoi when no pixel is set.
BinaryMask rasterize_roi(const RoiSpec& roi, int width, int height);

std::size_t count_set(const BinaryMask& mask) noexcept;

}  // namespace trailgate
