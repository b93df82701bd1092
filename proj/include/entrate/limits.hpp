#pragma once

namespace entrate {

/// Deepest supported observation-tree level. 2^30 leaves is the practical
/// time/memory wall on a workstation.
inline constexpr int max_depth = 30;

/// Longest string accepted by the exponential brute-force oracle.
inline constexpr int max_brute_force_len = 14;

}  // namespace entrate
