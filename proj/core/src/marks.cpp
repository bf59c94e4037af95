#include "rangelab/marks.hpp"

#include "rangelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rangelab {

void MarkedTree::validate() const {
    if (marks.size() != tree.size()) {
        throw InvalidTree("marked tree has " + std::to_string(marks.size()) + " marks for " +
                          std::to_string(tree.size()) + " vertices");
    }
    for (auto m : marks) {
        if (m < 1) throw InvalidTree("marks must be positive");
    }
}

std::string MarkedTree::to_csv() const {
    std::ostringstream os;
    os << "children,mark\n";
    for (std::size_t v = 0; v < tree.size(); ++v) os << tree.children(v) << ',' << marks[v] << '\n';
    return os.str();
}

std::size_t ZMap::child(std::size_t node, std::uint32_t letter) {
    for (const auto& [l, id] : nodes_[node].kids) {
        if (l == letter) return id;
    }
    const auto id = nodes_.size();
    nodes_[node].kids.emplace_back(letter, id);
    nodes_.push_back({node, letter, 0, {}});
    return id;
}

std::size_t ZMap::find(const Word& w) const {
    std::size_t cur = 0;
    for (auto letter : w) {
        const auto& kids = nodes_[cur].kids;
        auto it = std::find_if(kids.begin(), kids.end(), [letter](const auto& e) { return e.first == letter; });
        if (it == kids.end()) return kNoVertex;
        cur = it->second;
    }
    return cur;
}

std::uint64_t ZMap::count(const Word& w) const {
    const auto n = find(w);
    return n == kNoVertex ? 0 : nodes_[n].count;
}

std::size_t ZMap::distinct() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.count > 0; }));
}

std::uint64_t ZMap::total() const noexcept {
    std::uint64_t s = 0;
    for (const auto& n : nodes_) s += n.count;
    return s;
}

Word ZMap::word(std::size_t node) const {
    Word w;
    for (auto cur = node; cur != 0; cur = nodes_[cur].parent) w.push_back(nodes_[cur].letter);
    std::reverse(w.begin(), w.end());
    return w;
}

std::vector<std::size_t> ZMap::lex_order() const {
    std::vector<std::size_t> order;
    order.reserve(nodes_.size());
    std::vector<std::size_t> stack{0};
    std::vector<std::pair<std::uint32_t, std::size_t>> kids;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        order.push_back(v);
        kids = nodes_[v].kids;
        std::sort(kids.begin(), kids.end());
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(it->second);
    }
    return order;
}

std::vector<std::size_t> ZMap::lex_ranks() const {
    const auto order = lex_order();
    std::vector<std::size_t> rank(nodes_.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
    return rank;
}

std::vector<std::pair<Word, std::uint64_t>> ZMap::entries() const {
    std::vector<std::pair<Word, std::uint64_t>> out;
    for (auto v : lex_order()) {
        if (nodes_[v].count > 0) out.emplace_back(word(v), nodes_[v].count);
    }
    return out;
}

std::string ZMap::to_csv() const {
    std::ostringstream os;
    os << "word,count\n";
    for (const auto& [w, c] : entries()) {
        for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "." : "") << w[i];
        os << ',' << c << '\n';
    }
    return os.str();
}

OrderedTree ZMap::to_ordered_tree() const {
    std::vector<std::uint32_t> counts;
    counts.reserve(nodes_.size());
    for (auto v : lex_order()) counts.push_back(static_cast<std::uint32_t>(nodes_[v].kids.size()));
    return OrderedTree::from_children_counts(std::move(counts));
}

bool same_words(const ZMap& a, const ZMap& b, bool compare_counts) {
    if (a.node_count() != b.node_count()) return false;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::vector<std::pair<std::uint32_t, std::size_t>> ka, kb;
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        const auto& nx = a.node(x);
        const auto& ny = b.node(y);
        if ((nx.count > 0) != (ny.count > 0)) return false;
        if (compare_counts && nx.count != ny.count) return false;
        if (nx.kids.size() != ny.kids.size()) return false;
        ka = nx.kids;
        kb = ny.kids;
        std::sort(ka.begin(), ka.end());
        std::sort(kb.begin(), kb.end());
        for (std::size_t i = 0; i < ka.size(); ++i) {
            if (ka[i].first != kb[i].first) return false;
            stack.emplace_back(ka[i].second, kb[i].second);
        }
    }
    return true;
}

Track track(const MarkedTree& T) {
    T.validate();
    Track tr;
    const auto parent = T.tree.parents();
    tr.node_of_vertex.assign(T.tree.size(), 0);
    tr.z.add(0);
    // parents precede children in preorder
    for (std::size_t v = 1; v < T.tree.size(); ++v) {
        const auto node = tr.z.child(tr.node_of_vertex[parent[v]], T.marks[v]);
        tr.node_of_vertex[v] = node;
        tr.z.add(node);
    }
    return tr;
}

ZMap track_forest(std::span<const MarkedTree> forest) {
    ZMap z;
    for (const auto& T : forest) {
        T.validate();
        const auto parent = T.tree.parents();
        std::vector<std::size_t> node(T.tree.size(), 0);
        z.add(0);
        for (std::size_t v = 1; v < T.tree.size(); ++v) {
            node[v] = z.child(node[parent[v]], T.marks[v]);
            z.add(node[v]);
        }
    }
    return z;
}

ZMap visited_words(const Walk& w, std::size_t steps) {
    if (steps > w.steps()) throw OutOfRange("prefix longer than the walk");
    ZMap z;
    z.add(0);
    std::size_t cur = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        const auto m = w.moves[i];
        if (m == kDown) {
            if (cur == 0) throw MalformedWalk("walk steps below the root at move " + std::to_string(i));
            cur = z.node(cur).parent;
            continue;
        }
        const auto before = z.node_count();
        cur = z.child(cur, m);
        if (z.node_count() != before) z.add(cur);
    }
    return z;
}

MarkedTree attach_iid_marks(const OrderedTree& t, std::span<const double> weights, Rng& rng) {
    double sum = 0;
    for (auto a : weights) {
        if (!(a >= 0.0)) throw InvalidParams("mark weights must be nonnegative");
        sum += a;
    }
    if (weights.empty() || std::abs(sum - 1.0) > 1e-12) throw InvalidParams("mark weights must sum to 1");
    MarkSampler draw(weights);
    MarkedTree T{t, {}};
    T.marks.reserve(t.size());
    for (std::size_t v = 0; v < t.size(); ++v) T.marks.push_back(draw(rng));
    return T;
}

namespace {

/// Re-emits `t` in preorder, visiting each sibling block in the order set by child_order.
template <class OrderFn>
OrderedTree reorder(const OrderedTree& t, OrderFn&& child_order, std::vector<std::size_t>& index_map) {
    const auto ct = t.child_table();
    std::vector<std::uint32_t> counts;
    counts.reserve(t.size());
    index_map.assign(t.size(), kNoVertex);
    std::vector<std::size_t> stack{0};
    std::vector<std::size_t> kids;
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        index_map[v] = counts.size();
        counts.push_back(t.children(v));
        const auto span = ct.of(v);
        kids.assign(span.begin(), span.end());
        child_order(kids);
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return OrderedTree::from_children_counts(std::move(counts));
}

}  // namespace

MarkedTree shuffle(const MarkedTree& T, Rng& rng, std::vector<std::size_t>& index_map) {
    T.validate();
    auto sort_block = [&](std::vector<std::size_t>& kids) {
        std::shuffle(kids.begin(), kids.end(), rng);
        std::stable_sort(kids.begin(), kids.end(),
                         [&](std::size_t a, std::size_t b) { return T.marks[a] < T.marks[b]; });
    };
    MarkedTree out{reorder(T.tree, sort_block, index_map), std::vector<std::uint32_t>(T.marks.size())};
    for (std::size_t v = 0; v < T.marks.size(); ++v) out.marks[index_map[v]] = T.marks[v];
    return out;
}

MarkedTree shuffle(const MarkedTree& T, Rng& rng) {
    std::vector<std::size_t> map;
    return shuffle(T, rng, map);
}

OrderedTree uniform_shuffle(const OrderedTree& t, Rng& rng) {
    std::vector<std::size_t> map;
    return reorder(t, [&](std::vector<std::size_t>& kids) { std::shuffle(kids.begin(), kids.end(), rng); }, map);
}

bool track_is_monotone(const MarkedTree& T) {
    const auto tr = track(T);
    const auto rank = tr.z.lex_ranks();
    for (std::size_t v = 1; v < T.tree.size(); ++v) {
        if (rank[tr.node_of_vertex[v]] < rank[tr.node_of_vertex[v - 1]]) return false;
    }
    return true;
}

bool track_is_sibling_sorted(const MarkedTree& T) {
    T.validate();
    const auto parent = T.tree.parents();
    // in preorder, the previous sibling of v is the last vertex seen with the same parent
    std::vector<std::size_t> last_child(T.tree.size(), kNoVertex);
    for (std::size_t v = 1; v < T.tree.size(); ++v) {
        auto& prev = last_child[parent[v]];
        if (prev != kNoVertex && T.marks[prev] > T.marks[v]) return false;
        prev = v;
    }
    return true;
}

DecodedWalk decode_walk_to_marked_tree(const Walk& w, MarkSampler& root_marks, Rng& rng) {
    DecodedWalk out;
    out.cut_time = w.stabilized_height ? w.last_time_at_or_below(*w.stabilized_height) : w.steps();
    std::vector<std::uint32_t> counts{0};
    std::vector<std::uint32_t> marks{root_marks(rng)};
    std::vector<std::size_t> path{0};
    for (std::size_t i = 0; i < out.cut_time; ++i) {
        const auto m = w.moves[i];
        if (m == kDown) {
            if (path.size() == 1) throw MalformedWalk("walk steps below the root at move " + std::to_string(i));
            path.pop_back();
            continue;
        }
        // vertices are created in preorder
        ++counts[path.back()];
        path.push_back(counts.size());
        counts.push_back(0);
        marks.push_back(m);
    }
    out.marked = {OrderedTree::from_children_counts(std::move(counts)), std::move(marks)};
    out.spine = std::move(path);
    return out;
}

OrderedTree shrink_to_range_tree(const MarkedTree& T) {
    if (!track_is_sibling_sorted(T)) throw TrackNotMonotone("siblings are not sorted by mark; shuffle first");
    return track(T).z.to_ordered_tree();
}

DistinctRatio distinct_ratio(const ZMap& z) {
    const auto total = z.total();
    if (total == 0) throw InsufficientData("empty multiplicity map");
    return {z.distinct(), total};
}

}  // namespace rangelab
