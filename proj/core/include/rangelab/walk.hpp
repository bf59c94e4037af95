#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace rangelab {

/// Move code: 0 is a step towards the root, j >= 1 is a step to child j.
using Move = std::uint32_t;
inline constexpr Move kDown = 0;

/// Trajectory of the walk on the infinite ordered tree, started at the root.
struct Walk {
    std::vector<Move> moves;
    /// Target height of a HeightStabilized run; the walk is cut at its last
    /// visit at or below this height when decoded.
    std::optional<std::int64_t> stabilized_height;
    /// Upper bound on the probability that the conditioned walk would have
    /// returned to or below `stabilized_height` after the run stopped.
    double truncation_bound = 0.0;

    std::size_t steps() const noexcept { return moves.size(); }

    /// |W_n| for n = 0..steps(). Throws MalformedWalk on a step below the root.
    std::vector<std::int64_t> heights() const;

    /// Index of the last n with |W_n| <= level within the recorded moves.
    std::size_t last_time_at_or_below(std::int64_t level) const;
};

}  // namespace rangelab
