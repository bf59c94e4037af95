#include "rangelab/walk.hpp"

#include "rangelab/errors.hpp"

#include <string>

namespace rangelab {

std::vector<std::int64_t> Walk::heights() const {
    std::vector<std::int64_t> h;
    h.reserve(moves.size() + 1);
    std::int64_t cur = 0;
    h.push_back(cur);
    for (std::size_t i = 0; i < moves.size(); ++i) {
        cur += moves[i] == kDown ? -1 : 1;
        if (cur < 0) {
            throw MalformedWalk("walk steps below the root at move " + std::to_string(i));
        }
        h.push_back(cur);
    }
    return h;
}

std::size_t Walk::last_time_at_or_below(std::int64_t level) const {
    const auto h = heights();
    std::size_t last = 0;
    for (std::size_t n = 0; n < h.size(); ++n) {
        if (h[n] <= level) last = n;
    }
    return last;
}

}  // namespace rangelab
