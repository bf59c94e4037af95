#include "rangelab/trees.hpp"

#include "rangelab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

namespace rangelab {

OrderedTree OrderedTree::from_children_counts(std::vector<std::uint32_t> counts) {
    if (counts.empty()) throw InvalidTree("empty children-count sequence");
    std::int64_t v = 0;
    for (std::size_t n = 0; n < counts.size(); ++n) {
        v += static_cast<std::int64_t>(counts[n]) - 1;
        const bool last = n + 1 == counts.size();
        if (!last && v < 0) {
            throw InvalidTree("Lukasiewicz path hits -1 at index " + std::to_string(n + 1) +
                              " before the end of the sequence");
        }
        if (last && v != -1) {
            throw InvalidTree("Lukasiewicz path ends at " + std::to_string(v) + " instead of -1");
        }
    }
    return OrderedTree(std::move(counts));
}

OrderedTree OrderedTree::parse(std::string_view text) {
    std::vector<std::uint32_t> counts;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r')) ++i;
        if (i == text.size()) break;
        std::uint32_t k = 0;
        auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), k);
        if (ec != std::errc{}) throw InvalidTree("cannot parse children count near offset " + std::to_string(i));
        i = static_cast<std::size_t>(ptr - text.data());
        counts.push_back(k);
    }
    return from_children_counts(std::move(counts));
}

std::vector<std::size_t> OrderedTree::parents() const {
    std::vector<std::size_t> parent(counts_.size(), kNoVertex);
    // stack of (vertex, children still to be seen)
    std::vector<std::pair<std::size_t, std::uint32_t>> stack;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        while (!stack.empty() && stack.back().second == 0) stack.pop_back();
        if (!stack.empty()) {
            parent[i] = stack.back().first;
            --stack.back().second;
        }
        stack.emplace_back(i, counts_[i]);
    }
    return parent;
}

std::vector<std::size_t> OrderedTree::subtree_sizes() const {
    const auto parent = parents();
    std::vector<std::size_t> sz(counts_.size(), 1);
    for (std::size_t i = counts_.size(); i-- > 1;) sz[parent[i]] += sz[i];
    return sz;
}

ChildTable OrderedTree::child_table() const {
    ChildTable ct;
    ct.first.resize(counts_.size() + 1, 0);
    for (std::size_t v = 0; v < counts_.size(); ++v) ct.first[v + 1] = ct.first[v] + counts_[v];
    ct.items.resize(ct.first.back());
    std::vector<std::size_t> fill(ct.first.begin(), ct.first.end() - 1);
    const auto parent = parents();
    for (std::size_t i = 1; i < counts_.size(); ++i) ct.items[fill[parent[i]]++] = i;
    return ct;
}

std::vector<std::int64_t> OrderedTree::depths() const {
    const auto parent = parents();
    std::vector<std::int64_t> d(counts_.size(), 0);
    for (std::size_t i = 1; i < counts_.size(); ++i) d[i] = d[parent[i]] + 1;
    return d;
}

std::int64_t OrderedTree::height() const {
    const auto d = depths();
    return *std::max_element(d.begin(), d.end());
}

std::vector<Word> OrderedTree::words() const {
    const auto parent = parents();
    std::vector<Word> w(counts_.size());
    std::vector<std::uint32_t> next_slot(counts_.size(), 1);
    for (std::size_t i = 1; i < counts_.size(); ++i) {
        w[i] = w[parent[i]];
        w[i].push_back(next_slot[parent[i]]++);
    }
    return w;
}

std::string OrderedTree::serialize() const {
    std::string out;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        if (i) out.push_back(' ');
        out += std::to_string(counts_[i]);
    }
    return out;
}

std::vector<OrderedTree> enumerate_trees(std::size_t n) {
    std::vector<OrderedTree> out;
    if (n == 0) return out;
    std::vector<std::uint32_t> counts(n, 0);
    // depth-first over positions; v is the Lukasiewicz value before position i
    auto rec = [&](auto&& self, std::size_t i, std::int64_t v) -> void {
        if (i == n) {
            if (v == -1) out.push_back(OrderedTree::from_children_counts(counts));
            return;
        }
        const auto remaining = static_cast<std::int64_t>(n - i);
        // sum of counts over positions i..n-1 must equal remaining - v - 1
        const std::int64_t budget = remaining - v - 1;
        for (std::int64_t k = 0; k <= budget; ++k) {
            const std::int64_t next = v + k - 1;
            if (i + 1 < n && next < 0) continue;
            counts[i] = static_cast<std::uint32_t>(k);
            self(self, i + 1, next);
        }
    };
    rec(rec, 0, 0);
    return out;
}

OrderedTree truncate_at_height(const OrderedTree& t, std::int64_t n) {
    const auto d = t.depths();
    std::vector<std::uint32_t> counts;
    counts.reserve(t.size());
    for (std::size_t v = 0; v < t.size(); ++v) {
        if (d[v] < n) counts.push_back(t.children(v));
        else if (d[v] == n) counts.push_back(0);
    }
    return OrderedTree::from_children_counts(std::move(counts));
}

OrderedTree subtree_at(const OrderedTree& t, std::size_t v) {
    if (v >= t.size()) throw OutOfRange("vertex index out of range");
    const auto sz = t.subtree_sizes();
    const auto& c = t.children_counts();
    return OrderedTree::from_children_counts(
        std::vector<std::uint32_t>(c.begin() + static_cast<std::ptrdiff_t>(v),
                                   c.begin() + static_cast<std::ptrdiff_t>(v + sz[v])));
}

// ---------------------------------------------------------------------------

std::string_view to_string(PathKind kind) noexcept {
    switch (kind) {
        case PathKind::height: return "height";
        case PathKind::contour: return "contour";
        case PathKind::lukasiewicz: return "lukasiewicz";
    }
    return "unknown";
}

void PathSeq::validate() const {
    for (std::size_t i = 1; i < values.size(); ++i) {
        const auto step = values[i] - values[i - 1];
        if (kind == PathKind::contour && (step != 1 && step != -1)) {
            throw MalformedPath("contour step " + std::to_string(step) + " at index " + std::to_string(i));
        }
        if (kind == PathKind::lukasiewicz && step < -1) {
            throw MalformedPath("Lukasiewicz jump below -1 at index " + std::to_string(i));
        }
    }
    if (kind != PathKind::lukasiewicz) {
        for (auto x : values) {
            if (x < 0) throw MalformedPath(std::string(to_string(kind)) + " path takes a negative value");
        }
    }
}

std::string PathSeq::to_csv() const {
    std::string out(to_string(kind));
    out.push_back('\n');
    for (auto x : values) {
        out += std::to_string(x);
        out.push_back('\n');
    }
    return out;
}

PathSeq height_process(const OrderedTree& t) {
    return {PathKind::height, t.depths()};
}

PathSeq height_process(const Forest& f) {
    PathSeq h{PathKind::height, {}};
    for (const auto& t : f) {
        const auto d = t.depths();
        h.values.insert(h.values.end(), d.begin(), d.end());
    }
    return h;
}

PathSeq lukasiewicz_path(const OrderedTree& t) {
    return lukasiewicz_path(Forest{t});
}

PathSeq lukasiewicz_path(const Forest& f) {
    PathSeq v{PathKind::lukasiewicz, {0}};
    std::int64_t cur = 0;
    for (const auto& t : f) {
        for (auto k : t.children_counts()) {
            cur += static_cast<std::int64_t>(k) - 1;
            v.values.push_back(cur);
        }
    }
    return v;
}

PathSeq height_from_lukasiewicz(const PathSeq& v) {
    if (v.kind != PathKind::lukasiewicz) throw MalformedPath("expected a Lukasiewicz path");
    if (v.values.empty() || v.values.front() != 0) throw MalformedPath("Lukasiewicz path must start at 0");
    v.validate();
    const auto& x = v.values;
    PathSeq h{PathKind::height, {}};
    h.values.reserve(x.size() - 1);
    // indices j < n with V_j = min over [j, n]; their V values are nondecreasing
    std::vector<std::size_t> records;
    for (std::size_t n = 0; n + 1 < x.size(); ++n) {
        if (n > 0) {
            records.push_back(n - 1);
            while (!records.empty() && x[records.back()] > x[n]) records.pop_back();
        }
        h.values.push_back(static_cast<std::int64_t>(records.size()));
    }
    return h;
}

PathSeq contour_from_height(const PathSeq& h, std::size_t size) {
    if (size == 0 || h.values.size() < size) throw MalformedPath("height process shorter than tree size");
    const auto& H = h.values;
    const auto n_last = static_cast<std::int64_t>(size) - 1;
    std::vector<std::int64_t> b(size + 1);
    for (std::size_t n = 0; n < size; ++n) b[n] = 2 * static_cast<std::int64_t>(n) - H[n];
    b[size] = 2 * n_last;

    PathSeq c{PathKind::contour, std::vector<std::int64_t>(static_cast<std::size_t>(2 * n_last + 1), 0)};
    for (std::size_t n = 0; n + 1 < size; ++n) {
        // descent from u_n, then the final unit climb to u_{n+1}
        for (auto s = b[n]; s < b[n + 1] - 1; ++s) c.values[static_cast<std::size_t>(s)] = H[n] - s + b[n];
        for (auto s = b[n + 1] - 1; s <= b[n + 1]; ++s) {
            c.values[static_cast<std::size_t>(s)] = s - b[n + 1] + H[n + 1];
        }
    }
    for (auto s = b[size - 1]; s <= b[size]; ++s) {
        c.values[static_cast<std::size_t>(s)] = H[size - 1] - s + b[size - 1];
    }
    return c;
}

PathSeq contour_direct(const OrderedTree& t) {
    const auto ct = t.child_table();
    PathSeq c{PathKind::contour, {0}};
    c.values.reserve(2 * t.size() - 1);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto& [v, next] = stack.back();
        const auto kids = ct.of(v);
        if (next < kids.size()) {
            const auto child = kids[next++];
            stack.emplace_back(child, 0);
        } else {
            stack.pop_back();
            if (stack.empty()) break;
        }
        c.values.push_back(static_cast<std::int64_t>(stack.size()) - 1);
    }
    return c;
}

double contour_at(const PathSeq& c, double s) {
    if (s < 0 || c.values.empty()) return 0.0;
    const auto last = static_cast<double>(c.values.size() - 1);
    if (s > last) return 0.0;
    const auto lo = static_cast<std::size_t>(std::floor(s));
    const double frac = s - static_cast<double>(lo);
    if (frac == 0.0 || lo + 1 >= c.values.size()) return static_cast<double>(c.values[lo]);
    return (1.0 - frac) * static_cast<double>(c.values[lo]) + frac * static_cast<double>(c.values[lo + 1]);
}

OrderedTree mirror(const OrderedTree& t, std::vector<std::size_t>& index_map) {
    const auto ct = t.child_table();
    std::vector<std::uint32_t> counts;
    counts.reserve(t.size());
    index_map.assign(t.size(), kNoVertex);
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        index_map[v] = counts.size();
        counts.push_back(t.children(v));
        // pushed first-to-last so the last child is emitted first
        for (auto child : ct.of(v)) stack.push_back(child);
    }
    return OrderedTree::from_children_counts(std::move(counts));
}

OrderedTree mirror(const OrderedTree& t) {
    std::vector<std::size_t> map;
    return mirror(t, map);
}

// ---------------------------------------------------------------------------

void SinTreeSlice::validate() const {
    if (spine.empty() || spine.front() != 0) throw MalformedPath("spine must start at the root");
    const auto parent = tree.parents();
    for (std::size_t k = 1; k < spine.size(); ++k) {
        if (spine[k] >= tree.size() || parent[spine[k]] != spine[k - 1]) {
            throw MalformedPath("spine vertex at height " + std::to_string(k) + " is not a child of the previous one");
        }
    }
}

SinTreeSlice mirror(const SinTreeSlice& s) {
    std::vector<std::size_t> map;
    SinTreeSlice out{mirror(s.tree, map), {}};
    out.spine.reserve(s.spine.size());
    for (auto v : s.spine) out.spine.push_back(map[v]);
    return out;
}

SinTreeSlice truncate_at_spine(const SinTreeSlice& s, std::size_t m) {
    if (m > s.spine_height()) {
        throw OutOfRange("cut height " + std::to_string(m) + " above spine height " + std::to_string(s.spine_height()));
    }
    const auto v = s.spine[m];
    const auto sz = s.tree.subtree_sizes();
    const auto& c = s.tree.children_counts();
    std::vector<std::uint32_t> counts(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(v));
    counts.push_back(0);
    counts.insert(counts.end(), c.begin() + static_cast<std::ptrdiff_t>(v + sz[v]), c.end());
    return {OrderedTree::from_children_counts(std::move(counts)),
            std::vector<std::size_t>(s.spine.begin(), s.spine.begin() + static_cast<std::ptrdiff_t>(m + 1))};
}

std::size_t sigma_n(const PathSeq& h, std::int64_t n) {
    if (h.values.empty()) throw OutOfRange("empty height process");
    const auto top = *std::max_element(h.values.begin(), h.values.end());
    if (top <= n) throw OutOfRange("height " + std::to_string(n) + " is never exceeded");
    std::size_t sigma = 0;
    for (std::size_t k = 0; k < h.values.size(); ++k) {
        if (h.values[k] <= n) sigma = k;
    }
    return sigma;
}

std::size_t contour_last_time_at_or_below(const PathSeq& c, std::int64_t n, std::size_t limit) {
    std::size_t last = 0;
    const auto end = std::min(limit + 1, c.values.size());
    for (std::size_t s = 0; s < end; ++s) {
        if (c.values[s] <= n) last = s;
    }
    return last;
}

namespace {

struct SpineGeometry {
    std::vector<bool> on_spine;
    std::vector<std::uint32_t> l;  // l[k] = 1-based slot of u*_k under u*_{k-1}, k >= 1
    std::vector<std::size_t> bush_roots;
};

SpineGeometry spine_geometry(const SinTreeSlice& s) {
    SpineGeometry g;
    g.on_spine.assign(s.tree.size(), false);
    for (auto v : s.spine) g.on_spine[v] = true;
    const auto ct = s.tree.child_table();
    g.l.assign(s.spine.size(), 0);
    for (std::size_t k = 1; k < s.spine.size(); ++k) {
        const auto kids = ct.of(s.spine[k - 1]);
        const auto it = std::find(kids.begin(), kids.end(), s.spine[k]);
        g.l[k] = static_cast<std::uint32_t>(it - kids.begin()) + 1;
        for (auto j = kids.begin(); j != it; ++j) g.bush_roots.push_back(*j);
    }
    return g;
}

}  // namespace

Forest left_bush_forest(const SinTreeSlice& s) {
    const auto g = spine_geometry(s);
    Forest f;
    f.reserve(g.bush_roots.size());
    for (auto r : g.bush_roots) f.push_back(subtree_at(s.tree, r));
    return f;
}

SpineDecomposition spine_decomposition(const SinTreeSlice& s) {
    s.validate();
    const auto g = spine_geometry(s);
    const auto forest = left_bush_forest(s);
    const auto n_spine = s.spine_height();

    SpineDecomposition d;
    d.L.assign(n_spine + 1, 0);
    for (std::size_t k = 1; k <= n_spine; ++k) d.L[k] = d.L[k - 1] + (static_cast<std::int64_t>(g.l[k]) - 1);

    const auto V = lukasiewicz_path(forest);
    d.forest_height = height_process(forest);
    const auto forest_size = d.forest_height.values.size();
    d.alpha.resize(forest_size);
    d.n_of_p.resize(forest_size);
    std::int64_t running_min = 0;
    std::size_t k = 0;
    for (std::size_t p = 0; p < forest_size; ++p) {
        running_min = std::min(running_min, V.values[p]);
        const auto bush_number = 1 - running_min;
        while (k <= n_spine && d.L[k] < bush_number) ++k;
        d.alpha[p] = static_cast<std::int64_t>(k);
        d.n_of_p[p] = p + k;
    }

    const auto left_end = s.spine.back();  // index of u*_n: last vertex of the left part
    d.p_of_n.resize(left_end + 1);
    std::size_t p = 0;
    for (std::size_t n = 0; n <= left_end; ++n) {
        while (p < forest_size && d.n_of_p[p] < n) ++p;
        d.p_of_n[n] = p;
    }
    return d;
}

std::size_t count_spine_identity_violations(const SinTreeSlice& s, const SpineDecomposition& d) {
    const auto g = spine_geometry(s);
    const auto H = height_process(s.tree).values;
    const auto& Hf = d.forest_height.values;
    const auto left_end = s.spine.back();
    std::size_t bad = 0;

    // (1) n(p) is the index of the p-th non-spine vertex
    std::size_t p = 0;
    for (std::size_t n = 0; n <= left_end; ++n) {
        if (g.on_spine[n]) continue;
        if (p >= d.n_of_p.size() || d.n_of_p[p] != n) ++bad;
        if (p < d.alpha.size() && d.n_of_p[p] != p + static_cast<std::size_t>(d.alpha[p])) ++bad;
        ++p;
    }
    if (p != d.n_of_p.size()) ++bad;

    std::size_t non_spine_before = 0;
    for (std::size_t n = 0; n <= left_end; ++n) {
        const auto pn = d.p_of_n[n];
        // (2) p(n) counts the non-spine vertices before u_n
        if (pn != non_spine_before) ++bad;
        // (3) H_n = n - p(n) + H_{p(n)}(f), with H_{#f}(f) read as 0
        const std::int64_t hf = pn < Hf.size() ? Hf[pn] : 0;
        if (H[n] != static_cast<std::int64_t>(n - pn) + hf) ++bad;
        // (4) alpha(p(n)-1) <= n - p(n) <= alpha(p(n))
        const auto spine_before = static_cast<std::int64_t>(n - pn);
        const std::int64_t lo = pn == 0 ? 0 : d.alpha[pn - 1];
        const std::int64_t hi = pn < d.alpha.size() ? d.alpha[pn] : static_cast<std::int64_t>(s.spine_height()) + 1;
        if (spine_before < lo || spine_before > hi) ++bad;
        if (!g.on_spine[n] && spine_before != hi) ++bad;
        if (!g.on_spine[n]) ++non_spine_before;
    }
    return bad;
}

// ---------------------------------------------------------------------------

OrderedTree range_tree(const Walk& w) {
    return range_tree(w, w.steps());
}

OrderedTree range_tree(const Walk& w, std::size_t steps) {
    if (steps > w.steps()) throw OutOfRange("prefix longer than the walk");
    struct Node {
        std::size_t parent;
        std::vector<std::pair<Move, std::size_t>> kids;
    };
    std::vector<Node> nodes{{kNoVertex, {}}};
    std::size_t cur = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        const auto m = w.moves[i];
        if (m == kDown) {
            if (nodes[cur].parent == kNoVertex) throw MalformedWalk("walk steps below the root");
            cur = nodes[cur].parent;
            continue;
        }
        auto& kids = nodes[cur].kids;
        auto it = std::find_if(kids.begin(), kids.end(), [m](const auto& e) { return e.first == m; });
        if (it != kids.end()) {
            cur = it->second;
        } else {
            const auto id = nodes.size();
            kids.emplace_back(m, id);
            nodes.push_back({cur, {}});
            cur = id;
        }
    }
    std::vector<std::uint32_t> counts;
    counts.reserve(nodes.size());
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        auto& kids = nodes[v].kids;
        std::sort(kids.begin(), kids.end());
        counts.push_back(static_cast<std::uint32_t>(kids.size()));
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(it->second);
    }
    return OrderedTree::from_children_counts(std::move(counts));
}

}  // namespace rangelab
