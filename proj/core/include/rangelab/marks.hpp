#pragma once

#include "rangelab/rng.hpp"
#include "rangelab/samplers.hpp"
#include "rangelab/trees.hpp"
#include "rangelab/walk.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rangelab {

/// Ordered tree with one positive mark per vertex (preorder). The root mark
/// is carried along but never read by the track.
struct MarkedTree {
    OrderedTree tree;
    std::vector<std::uint32_t> marks;

    void validate() const;
    /// Two columns: children,mark.
    std::string to_csv() const;

    friend bool operator==(const MarkedTree&, const MarkedTree&) = default;
};

/// Multiplicities Z_v of tracked words, stored as a trie. Node 0 is the empty
/// word; a node exists only if some vertex tracks to it, so the support is
/// prefix-closed by construction.
class ZMap {
public:
    struct Node {
        std::size_t parent = kNoVertex;
        std::uint32_t letter = 0;
        std::uint64_t count = 0;
        std::vector<std::pair<std::uint32_t, std::size_t>> kids;
    };

    ZMap() : nodes_(1) {}

    /// Child of `node` along `letter`, created on demand.
    std::size_t child(std::size_t node, std::uint32_t letter);
    void add(std::size_t node, std::uint64_t n = 1) { nodes_[node].count += n; }

    /// Node of `w`, or kNoVertex.
    std::size_t find(const Word& w) const;
    std::uint64_t count(const Word& w) const;
    std::uint64_t count_at(std::size_t node) const { return nodes_[node].count; }

    std::size_t distinct() const noexcept;
    std::uint64_t total() const noexcept;
    std::size_t node_count() const noexcept { return nodes_.size(); }
    const Node& node(std::size_t i) const { return nodes_[i]; }

    Word word(std::size_t node) const;
    /// (word, count) pairs in lexicographic order of words.
    std::vector<std::pair<Word, std::uint64_t>> entries() const;
    /// Rank of every node in the lexicographic order of words.
    std::vector<std::size_t> lex_ranks() const;
    /// Rows word,count; letters joined by '.', the empty word as "".
    std::string to_csv() const;
    /// The support, canonically relabelled as an ordered tree.
    OrderedTree to_ordered_tree() const;

private:
    std::vector<std::size_t> lex_order() const;
    std::vector<Node> nodes_;
};

/// Same set of words; with `compare_counts`, same multiplicities too.
bool same_words(const ZMap& a, const ZMap& b, bool compare_counts);

struct Track {
    ZMap z;
    /// Trie node of Tr(u) for every vertex u.
    std::vector<std::size_t> node_of_vertex;

    Word word_of(std::size_t v) const { return z.word(node_of_vertex[v]); }
};

Track track(const MarkedTree& T);

/// Multiplicities over a marked forest; every root tracks to the empty word.
ZMap track_forest(std::span<const MarkedTree> forest);

/// Words visited by the first `steps` moves of the walk, each with count 1.
ZMap visited_words(const Walk& w, std::size_t steps);

/// I.i.d. marks with P(mark = i) = a_i, the root included. Accepts any
/// probability vector, including the degenerate (1).
MarkedTree attach_iid_marks(const OrderedTree& t, std::span<const double> weights, Rng& rng);

/// Reorders every sibling block by nondecreasing mark, ties broken uniformly.
MarkedTree shuffle(const MarkedTree& T, Rng& rng);
/// Same, also reporting the map old preorder index -> new preorder index.
MarkedTree shuffle(const MarkedTree& T, Rng& rng, std::vector<std::size_t>& index_map);

/// Uniformly random reordering of every sibling block.
OrderedTree uniform_shuffle(const OrderedTree& t, Rng& rng);

/// u <= v implies Tr(u) <= Tr(v) in the lexicographic order, checked over
/// consecutive preorder vertices. Fails as soon as two siblings share a mark
/// and the earlier one has a descendant.
bool track_is_monotone(const MarkedTree& T);

/// Marks are nondecreasing along every sibling block.
bool track_is_sibling_sorted(const MarkedTree& T);

struct DecodedWalk {
    /// Tree of the walk up to the cut time, with marks = upcrossing directions.
    MarkedTree marked;
    /// Preorder indices of the vertices from the root to the position at the cut.
    std::vector<std::size_t> spine;
    /// Last time the walk sits at or below its stabilized height.
    std::size_t cut_time = 0;

    SinTreeSlice slice() const { return {marked.tree, spine}; }
};

/// Tree whose contour is the walk's height path up to the cut time; every
/// upcrossing creates a vertex marked with its direction. The cut is the
/// stabilized height when present, otherwise the whole walk. The root mark
/// is drawn from `root_marks`.
DecodedWalk decode_walk_to_marked_tree(const Walk& w, MarkSampler& root_marks, Rng& rng);

/// Canonical ordered tree of the track image. Throws TrackNotMonotone unless
/// siblings are sorted by mark.
OrderedTree shrink_to_range_tree(const MarkedTree& T);

struct DistinctRatio {
    std::uint64_t distinct = 0;
    std::uint64_t total = 0;

    double ratio() const noexcept { return total == 0 ? 0.0 : static_cast<double>(distinct) / static_cast<double>(total); }
};

/// (number of tracked words, number of vertices). Throws InsufficientData on
/// an empty map.
DistinctRatio distinct_ratio(const ZMap& z);

}  // namespace rangelab
