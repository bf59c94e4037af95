#include "oracles.hpp"

#include "rangelab/errors.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/samplers.hpp"
#include "rangelab/suites.hpp"
#include "rangelab/trees.hpp"
#include "rangelab/walk.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace rangelab;

namespace {

OrderedTree T(std::vector<std::uint32_t> c) { return OrderedTree::from_children_counts(std::move(c)); }

std::vector<std::int64_t> V(std::initializer_list<std::int64_t> xs) { return xs; }

// Tree with a non-trivial spine used throughout the encoding tests.
const std::vector<std::uint32_t> kSixteen{2, 1, 2, 0, 1, 0, 1, 2, 2, 1, 0, 0, 2, 1, 0, 0};

std::vector<OrderedTree> small_trees(std::size_t max_n) {
    std::vector<OrderedTree> out;
    for (std::size_t n = 1; n <= max_n; ++n) {
        auto ts = enumerate_trees(n);
        out.insert(out.end(), ts.begin(), ts.end());
    }
    return out;
}

}  // namespace

TEST(OrderedTree, BuildExamples) {
    EXPECT_EQ(T({0}).size(), 1u);
    EXPECT_EQ(T({2, 0, 0}).size(), 3u);
    EXPECT_THROW(T({2, 0}), InvalidTree);
    EXPECT_THROW(T({1}), InvalidTree);
    EXPECT_THROW(T({0, 0}), InvalidTree);
    EXPECT_THROW(T({}), InvalidTree);
}

TEST(OrderedTree, ParseSerializeRoundTrip) {
    const auto t = T(kSixteen);
    EXPECT_EQ(OrderedTree::parse(t.serialize()), t);
    EXPECT_THROW(OrderedTree::parse("2 x 0"), InvalidTree);
}

TEST(OrderedTree, EnumerationMatchesCatalanNumbers) {
    for (unsigned n = 1; n <= 9; ++n) {
        const auto ts = enumerate_trees(n);
        EXPECT_EQ(ts.size(), oracle::catalan(n - 1)) << n;
        std::set<std::vector<std::uint32_t>> distinct;
        for (const auto& t : ts) distinct.insert(t.children_counts());
        EXPECT_EQ(distinct.size(), ts.size());
    }
}

TEST(OrderedTree, WordsAndParents) {
    const auto t = T({2, 0, 1, 0});
    const std::vector<Word> expected{{}, {1}, {2}, {2, 1}};
    EXPECT_EQ(t.words(), expected);
    const std::vector<std::size_t> parents{kNoVertex, 0, 0, 2};
    EXPECT_EQ(t.parents(), parents);
    EXPECT_EQ(t.height(), 2);
}

TEST(HeightProcess, Examples) {
    EXPECT_EQ(height_process(T({2, 0, 0})).values, V({0, 1, 1}));
    EXPECT_EQ(height_process(T({1, 1, 0})).values, V({0, 1, 2}));
    EXPECT_EQ(height_process(T({2, 1, 0, 0})).values, V({0, 1, 2, 1}));
}

TEST(HeightProcess, MatchesRecursiveDepths) {
    for (const auto& t : small_trees(7)) {
        EXPECT_EQ(height_process(t).values, oracle::depths(t.children_counts()));
    }
    EXPECT_EQ(height_process(T(kSixteen)).values, oracle::depths(kSixteen));
}

TEST(LukasiewiczPath, Examples) {
    EXPECT_EQ(lukasiewicz_path(T({0})).values, V({0, -1}));
    EXPECT_EQ(lukasiewicz_path(T({2, 0, 0})).values, V({0, 1, 0, -1}));
    EXPECT_EQ(lukasiewicz_path(T({2, 1, 0, 0})).values, V({0, 1, 1, 0, -1}));
}

TEST(HeightFromWalk, Examples) {
    EXPECT_EQ(height_from_lukasiewicz({PathKind::lukasiewicz, V({0, -1})}).values, V({0}));
    EXPECT_EQ(height_from_lukasiewicz({PathKind::lukasiewicz, V({0, 1, 0, -1})}).values, V({0, 1, 1}));
}

TEST(HeightFromWalk, MatchesQuadraticRecordCount) {
    for (const auto& t : small_trees(7)) {
        const auto v = lukasiewicz_path(t);
        EXPECT_EQ(height_from_lukasiewicz(v).values, oracle::height_from_walk(v.values));
    }
    auto rng = make_stream(7, 0);
    const auto p = ModelParams::make(0.05, {0.5, 0.5});
    for (int i = 0; i < 300; ++i) {
        const auto t = sample_gw(p, rng);
        const auto v = lukasiewicz_path(t);
        ASSERT_EQ(height_from_lukasiewicz(v).values, oracle::height_from_walk(v.values));
        ASSERT_EQ(height_from_lukasiewicz(v), height_process(t));
    }
}

TEST(HeightFromWalk, ShiftedVariantIsWrong) {
    const auto t = T({2, 1, 0, 0});
    EXPECT_NE(height_from_lukasiewicz_shifted(lukasiewicz_path(t)), height_process(t));
    EXPECT_EQ(hl_mismatches(small_trees(5), height_from_lukasiewicz_shifted), small_trees(5).size());
    EXPECT_EQ(hl_mismatches(small_trees(5), height_from_lukasiewicz), 0u);
}

TEST(HeightFromWalk, RejectsMalformedInput) {
    EXPECT_THROW(height_from_lukasiewicz({PathKind::lukasiewicz, V({0, 2, -1})}), MalformedPath);
    EXPECT_THROW(height_from_lukasiewicz({PathKind::height, V({0, -1})}), MalformedPath);
}

TEST(Contour, Examples) {
    EXPECT_EQ(contour_direct(T({2, 0, 0})).values, V({0, 1, 0, 1, 0}));
    EXPECT_EQ(contour_direct(T({0})).values, V({0}));
    EXPECT_EQ(contour_direct(T({1, 0})).values, V({0, 1, 0}));
    EXPECT_EQ(contour_from_height(height_process(T({2, 0, 0})), 3).values, V({0, 1, 0, 1, 0}));
    EXPECT_EQ(contour_from_height(height_process(T({0})), 1).values, V({0}));
}

TEST(Contour, BothConstructionsMatchRecursiveTour) {
    for (const auto& t : small_trees(7)) {
        const auto expected = oracle::contour(t.children_counts());
        ASSERT_EQ(contour_direct(t).values, expected);
        ASSERT_EQ(contour_from_height(height_process(t), t.size()).values, expected);
    }
    EXPECT_EQ(hc_mismatches(small_trees(6)), 0u);
}

TEST(Contour, InterpolationBetweenSteps) {
    const auto c = contour_direct(T({2, 0, 0}));
    EXPECT_DOUBLE_EQ(contour_at(c, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(contour_at(c, 2.25), 0.25);
    EXPECT_DOUBLE_EQ(contour_at(c, 10.0), 0.0);
}

TEST(Mirror, Examples) {
    EXPECT_EQ(mirror(T({2, 0, 0})), T({2, 0, 0}));
    EXPECT_EQ(mirror(T({2, 0, 1, 0})), T({2, 1, 0, 0}));
}

TEST(Mirror, MatchesReversedChildren) {
    for (const auto& t : small_trees(7)) {
        ASSERT_EQ(mirror(t).children_counts(), oracle::mirrored(t.children_counts()));
    }
    EXPECT_EQ(mirror_mismatches(small_trees(6)), 0u);
}

TEST(Truncation, AtHeight) {
    EXPECT_EQ(truncate_at_height(T({1, 1, 0}), 1), T({1, 0}));
    EXPECT_EQ(truncate_at_height(T({1, 1, 0}), 0), T({0}));
    EXPECT_EQ(truncate_at_height(T(kSixteen), 100), T(kSixteen));
}

TEST(SinTreeSlice, SixteenVertexSpine) {
    const SinTreeSlice s{T(kSixteen), {0, 6, 7, 12, 15}};
    EXPECT_NO_THROW(s.validate());
    EXPECT_EQ(s.spine_height(), 4u);
    EXPECT_EQ(count_spine_identity_violations(s, spine_decomposition(s)), 0u);
    const auto v = cut_violations(s);
    EXPECT_EQ(v.sigma, 0u);
    EXPECT_EQ(v.left, 0u);
    EXPECT_EQ(v.right, 0u);
    const SinTreeSlice bad{T(kSixteen), {0, 6, 8}};
    EXPECT_THROW(bad.validate(), MalformedPath);
}

TEST(SinTreeSlice, TruncateAtSpine) {
    const SinTreeSlice path{T({1, 1, 1, 0}), {0, 1, 2, 3}};
    EXPECT_EQ(truncate_at_spine(path, 3).tree, path.tree);
    EXPECT_EQ(truncate_at_spine(path, 1).tree, T({1, 0}));

    // set-filter oracle: drop every vertex strictly below u*_3
    auto rng = make_stream(11, 0);
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    for (int i = 0; i < 50; ++i) {
        const auto s = sample_gwi_uniform(p, 5, rng);
        const auto words = s.tree.words();
        const auto& tip = words[s.spine[3]];
        std::size_t keep = 0;
        for (const auto& w : words) {
            const bool below = w.size() > tip.size() && std::equal(tip.begin(), tip.end(), w.begin());
            keep += !below;
        }
        ASSERT_EQ(truncate_at_spine(s, 3).tree.size(), keep);
    }
}

TEST(SinTreeSlice, SigmaExamples) {
    EXPECT_EQ(sigma_n({PathKind::height, V({0, 1, 2, 3})}, 1), 1u);
    EXPECT_EQ(sigma_n({PathKind::height, V({0, 1, 1, 2})}, 1), 2u);
    EXPECT_THROW(sigma_n({PathKind::height, V({0, 1})}, 1), OutOfRange);
}

TEST(SinTreeSlice, PurePathHasEmptyBushForest) {
    const SinTreeSlice path{T({1, 1, 1, 0}), {0, 1, 2, 3}};
    const auto d = spine_decomposition(path);
    for (auto p : d.p_of_n) EXPECT_EQ(p, 0u);
    EXPECT_TRUE(left_bush_forest(path).empty());
}

TEST(SinTreeSlice, SpineIdentitiesOnAllSmallSlices) {
    std::vector<SinTreeSlice> corpus;
    for (const auto& t : small_trees(6)) {
        for (std::size_t v = 1; v < t.size(); ++v) corpus.push_back(slice_to(t, v));
    }
    EXPECT_EQ(spine_mismatches(corpus), 0u);
    const auto cut = cut_mismatches(corpus);
    EXPECT_EQ(cut.sigma, 0u);
    EXPECT_EQ(cut.left, 0u);
    EXPECT_EQ(cut.right, 0u);
}

// A left bush below u*_0 makes the contour come back to height 0 later than
// 2 sigma_0 - 0 = 0.
TEST(SinTreeSlice, ContourSupIdentityFailsWithLeftBush) {
    const SinTreeSlice s{T({2, 0, 1, 0}), {0, 2, 3}};
    EXPECT_EQ(contour_direct(s.tree).values, V({0, 1, 0, 1, 2, 1, 0}));
    EXPECT_EQ(contour_last_time_at_or_below(contour_direct(s.tree), 0, 2), 2u);
    EXPECT_GT(cut_violations(s).contour_sup, 0u);
}

TEST(RangeTree, Examples) {
    Walk w;
    w.moves = {3, 1, kDown, 5};
    EXPECT_EQ(range_tree(w), T({1, 2, 0, 0}));
    Walk one;
    one.moves = {1};
    EXPECT_EQ(range_tree(one), T({1, 0}));
    Walk bad;
    bad.moves = {kDown};
    EXPECT_THROW(range_tree(bad), MalformedWalk);
}

TEST(RangeTree, MatchesSortedWordSetOracle) {
    auto rng = make_stream(5, 0);
    const auto p = ModelParams::make(0.1, {0.3, 0.3, 0.4});
    for (int i = 0; i < 100; ++i) {
        const auto w = sample_walk(p, FixedSteps{200}, rng);
        ASSERT_EQ(range_tree(w).children_counts(), oracle::range_tree(w.moves));
        ASSERT_EQ(range_tree(w, 50).children_counts(),
                  oracle::range_tree({w.moves.begin(), w.moves.begin() + 50}));
    }
}
