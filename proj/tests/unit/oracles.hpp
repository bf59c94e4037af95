#pragma once

// Brute-force reference implementations used only by the tests. They work on
// explicit nested structures or O(n^2) scans, independent of the library code.

#include "rangelab/trees.hpp"
#include "rangelab/walk.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace oracle {

struct Node {
    std::vector<Node> kids;
};

inline Node nest(const std::vector<std::uint32_t>& counts) {
    std::size_t pos = 0;
    std::function<Node()> build = [&]() {
        Node n;
        const auto k = counts.at(pos++);
        for (std::uint32_t i = 0; i < k; ++i) n.kids.push_back(build());
        return n;
    };
    return build();
}

inline std::vector<std::uint32_t> flatten(const Node& root) {
    std::vector<std::uint32_t> out;
    std::function<void(const Node&)> go = [&](const Node& n) {
        out.push_back(static_cast<std::uint32_t>(n.kids.size()));
        for (const auto& k : n.kids) go(k);
    };
    go(root);
    return out;
}

inline std::vector<std::int64_t> depths(const std::vector<std::uint32_t>& counts) {
    std::vector<std::int64_t> out;
    std::function<void(const Node&, std::int64_t)> go = [&](const Node& n, std::int64_t d) {
        out.push_back(d);
        for (const auto& k : n.kids) go(k, d + 1);
    };
    go(nest(counts), 0);
    return out;
}

// Depth recorded at every unit step of the clockwise tour.
inline std::vector<std::int64_t> contour(const std::vector<std::uint32_t>& counts) {
    std::vector<std::int64_t> out;
    std::function<void(const Node&, std::int64_t)> go = [&](const Node& n, std::int64_t d) {
        out.push_back(d);
        for (const auto& k : n.kids) {
            go(k, d + 1);
            out.push_back(d);
        }
    };
    go(nest(counts), 0);
    return out;
}

inline std::vector<std::uint32_t> mirrored(const std::vector<std::uint32_t>& counts) {
    std::function<void(Node&)> flip = [&](Node& n) {
        std::reverse(n.kids.begin(), n.kids.end());
        for (auto& k : n.kids) flip(k);
    };
    auto root = nest(counts);
    flip(root);
    return flatten(root);
}

// H_n = #{j < n : V_j = min_{j <= k <= n} V_k}
inline std::vector<std::int64_t> height_from_walk(const std::vector<std::int64_t>& v) {
    std::vector<std::int64_t> h;
    for (std::size_t n = 0; n + 1 < v.size(); ++n) {
        std::int64_t c = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto m = *std::min_element(v.begin() + static_cast<std::ptrdiff_t>(j),
                                             v.begin() + static_cast<std::ptrdiff_t>(n) + 1);
            c += v[j] == m;
        }
        h.push_back(c);
    }
    return h;
}

// Visited words, lexicographically sorted (std::set order on vectors), then
// relabelled by counting distinct one-letter extensions of each word.
inline std::vector<std::uint32_t> range_tree(const std::vector<rangelab::Move>& moves) {
    std::set<std::vector<std::uint32_t>> seen{{}};
    std::vector<std::uint32_t> cur;
    for (auto m : moves) {
        if (m == rangelab::kDown) {
            cur.pop_back();
        } else {
            cur.push_back(m);
        }
        seen.insert(cur);
    }
    std::vector<std::uint32_t> counts;
    for (const auto& w : seen) {
        std::uint32_t k = 0;
        for (const auto& x : seen) {
            if (x.size() == w.size() + 1 && std::equal(w.begin(), w.end(), x.begin())) ++k;
        }
        counts.push_back(k);
    }
    return counts;
}

inline std::uint64_t catalan(unsigned n) {
    std::uint64_t c = 1;
    for (unsigned k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
    return c;
}

}  // namespace oracle
