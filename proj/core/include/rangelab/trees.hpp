#pragma once

#include "rangelab/walk.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rangelab {

/// A vertex of the infinite ordered tree written as its sequence of child
/// positions. std::vector's operator< is the lexicographic order with the
/// shorter prefix first, which is the order used throughout.
using Word = std::vector<std::uint32_t>;

inline constexpr std::size_t kNoVertex = static_cast<std::size_t>(-1);

/// Compressed child lists: children of v are items[first[v] .. first[v+1]).
struct ChildTable {
    std::vector<std::size_t> first;
    std::vector<std::size_t> items;

    std::span<const std::size_t> of(std::size_t v) const noexcept {
        return {items.data() + first[v], first[v + 1] - first[v]};
    }
};

/// Finite rooted ordered tree stored as its children counts in depth-first
/// (lexicographic) order. Vertices are identified by their preorder index.
class OrderedTree {
public:
    /// The single-vertex tree.
    OrderedTree() : counts_{0} {}

    /// Validates the Lukasiewicz condition; throws InvalidTree.
    static OrderedTree from_children_counts(std::vector<std::uint32_t> counts);

    /// Parses the one-line format: space-separated children counts.
    static OrderedTree parse(std::string_view text);

    std::size_t size() const noexcept { return counts_.size(); }
    std::uint32_t children(std::size_t v) const noexcept { return counts_[v]; }
    const std::vector<std::uint32_t>& children_counts() const noexcept { return counts_; }

    /// Parent index of every vertex, kNoVertex for the root.
    std::vector<std::size_t> parents() const;
    std::vector<std::size_t> subtree_sizes() const;
    ChildTable child_table() const;
    /// |u| of every vertex.
    std::vector<std::int64_t> depths() const;
    std::int64_t height() const;
    /// Ulam-Harris word of every vertex, in preorder. Memory is quadratic in
    /// the height, so this is meant for small trees and tests.
    std::vector<Word> words() const;

    std::string serialize() const;

    friend bool operator==(const OrderedTree&, const OrderedTree&) = default;

private:
    explicit OrderedTree(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {}
    std::vector<std::uint32_t> counts_;
};

inline OrderedTree build_tree(std::vector<std::uint32_t> counts) {
    return OrderedTree::from_children_counts(std::move(counts));
}

/// A sequence of finite trees; the fictive common root is implicit.
using Forest = std::vector<OrderedTree>;

/// Every ordered tree with exactly n vertices (Catalan(n-1) of them), in
/// lexicographic order of their children-count sequences.
std::vector<OrderedTree> enumerate_trees(std::size_t n);

/// Vertices of height <= n, i.e. the tree cut at generation n.
OrderedTree truncate_at_height(const OrderedTree& t, std::int64_t n);

/// The subtree rooted at v (theta_v t).
OrderedTree subtree_at(const OrderedTree& t, std::size_t v);

// ---------------------------------------------------------------------------
// Paths

enum class PathKind { height, contour, lukasiewicz };

std::string_view to_string(PathKind kind) noexcept;

/// Integer-valued path. Contours are stored at integer times only; since all
/// slopes are +-1 the samples determine the whole piecewise-linear path.
struct PathSeq {
    PathKind kind = PathKind::height;
    std::vector<std::int64_t> values;

    /// Throws MalformedPath when the invariant of `kind` fails.
    void validate() const;
    /// One CSV column: a header naming the kind, then one value per line.
    std::string to_csv() const;

    friend bool operator==(const PathSeq&, const PathSeq&) = default;
};

PathSeq height_process(const OrderedTree& t);
/// Concatenation of the height processes of the trees.
PathSeq height_process(const Forest& f);

/// V_0 = 0, V_{n+1} = V_n + k_{u_n} - 1; length #t + 1.
PathSeq lukasiewicz_path(const OrderedTree& t);
PathSeq lukasiewicz_path(const Forest& f);

/// H_n = #{0 <= j < n : V_j = min_{j<=k<=n} V_k}, for every n < len(V) - 1.
/// Works for trees and forests alike. Linear time.
PathSeq height_from_lukasiewicz(const PathSeq& v);

/// Contour at integer times 0..2(size-1), obtained from the height process
/// through the b_n = 2n - H_n transform.
PathSeq contour_from_height(const PathSeq& h, std::size_t size);

/// Contour obtained by walking the tree clockwise at unit speed.
PathSeq contour_direct(const OrderedTree& t);

/// Piecewise-linear contour value at real time s; 0 past the end.
double contour_at(const PathSeq& c, double s);

/// Reverses the order of the children of every vertex.
OrderedTree mirror(const OrderedTree& t);
/// Mirror together with the map old preorder index -> new preorder index.
OrderedTree mirror(const OrderedTree& t, std::vector<std::size_t>& index_map);

// ---------------------------------------------------------------------------
// Sin-tree slices

/// Finite slice of a sin-tree: the tree plus the preorder indices of its
/// spine vertices u*_0, ..., u*_n.
struct SinTreeSlice {
    OrderedTree tree;
    std::vector<std::size_t> spine;

    std::size_t spine_height() const noexcept { return spine.size() - 1; }
    /// Spine starts at the root and each entry is a child of the previous.
    void validate() const;
};

SinTreeSlice mirror(const SinTreeSlice& s);

/// [t]_{u*_m}: removes the strict descendants of u*_m. Throws OutOfRange.
SinTreeSlice truncate_at_spine(const SinTreeSlice& s, std::size_t m);

/// sigma_n = sup{k : H_k <= n}. Throws OutOfRange if the path never exceeds n.
std::size_t sigma_n(const PathSeq& h, std::int64_t n);

/// sup{s <= limit : C_s <= n} over integer times.
std::size_t contour_last_time_at_or_below(const PathSeq& c, std::int64_t n, std::size_t limit);

/// Bushes grafted on the left of the spine, in lexicographic order of roots.
Forest left_bush_forest(const SinTreeSlice& s);

/// Decomposition of the left height process along the spine.
struct SpineDecomposition {
    /// L_k = sum_{i<=k} (l_i - 1), k = 0..n.
    std::vector<std::int64_t> L;
    /// Height of the bush root carrying forest vertex p.
    std::vector<std::int64_t> alpha;
    /// Preorder index in the tree of forest vertex p: p + alpha(p).
    std::vector<std::size_t> n_of_p;
    /// Number of non-spine vertices before u_n, for every u_n of the left part.
    std::vector<std::size_t> p_of_n;
    /// Height process of the left bush forest.
    PathSeq forest_height;
};

SpineDecomposition spine_decomposition(const SinTreeSlice& s);

/// Number of violations of the four spine-decomposition identities, checked
/// against direct enumeration on the slice. Zero on a correct decomposition.
std::size_t count_spine_identity_violations(const SinTreeSlice& s, const SpineDecomposition& d);

// ---------------------------------------------------------------------------

/// Ordered tree canonically relabelled from the set of vertices visited by
/// the first `steps` moves of the walk (all of them by default).
OrderedTree range_tree(const Walk& w);
OrderedTree range_tree(const Walk& w, std::size_t steps);

}  // namespace rangelab
