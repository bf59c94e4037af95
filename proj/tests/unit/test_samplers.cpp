#include "rangelab/errors.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/samplers.hpp"
#include "rangelab/walk.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace rangelab;

namespace {

// P_n(stay >= 0 for N steps) for the unconditioned walk on heights, by DP.
double survive(std::int64_t n, double eps, std::size_t N) {
    const double u = 0.5 + eps, d = 0.5 - eps;
    const auto H = static_cast<std::size_t>(n) + N + 2;
    std::vector<double> p(H, 1.0), q(H);
    for (std::size_t step = 0; step < N; ++step) {
        q[0] = u * p[1];
        for (std::size_t h = 1; h + 1 < H; ++h) q[h] = u * p[h + 1] + d * p[h - 1];
        q[H - 1] = 1.0;
        std::swap(p, q);
    }
    return p[static_cast<std::size_t>(n)];
}

}  // namespace

TEST(ModelParams, Validation) {
    EXPECT_NO_THROW(ModelParams::make(0.1, {0.5, 0.5}));
    EXPECT_THROW(ModelParams::make(0.0, {0.5, 0.5}), InvalidParams);
    EXPECT_THROW(ModelParams::make(0.5, {0.5, 0.5}), InvalidParams);
    EXPECT_THROW(ModelParams::make(0.1, {0.5, 0.6}), InvalidParams);
    EXPECT_THROW(ModelParams::make(0.1, {1.0}), DegenerateWeights);
    EXPECT_THROW(ModelParams::make(0.1, {}), InvalidParams);
    const auto p = ModelParams::make(0.1, {0.25, 0.75});
    EXPECT_DOUBLE_EQ(p.ratio(), 0.4 / 0.6);
    EXPECT_DOUBLE_EQ(p.a_plus(), 0.75);
}

TEST(ConditionedWalk, UpProbabilityExamples) {
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    EXPECT_DOUBLE_EQ(conditioned_up_probability(0, p), 1.0);
    EXPECT_NEAR(conditioned_up_probability(1, p), 0.76, 1e-12);
    EXPECT_NEAR(conditioned_up_probability(200, p), p.up(), 1e-12);
}

TEST(ConditionedWalk, UpProbabilityMatchesSurvivalDp) {
    for (double eps : {0.05, 0.1, 0.2}) {
        const auto p = ModelParams::make(eps, {0.5, 0.5});
        for (std::int64_t n : {1, 2, 5}) {
            const double ratio = p.up() * survive(n + 1, eps, 10000) / survive(n, eps, 10001);
            EXPECT_NEAR(conditioned_up_probability(n, p), ratio, 1e-10) << eps << " " << n;
        }
    }
}

TEST(SampleWalk, FirstMoveIsUp) {
    const auto p = ModelParams::make(0.1, {0.2, 0.3, 0.5});
    auto rng = make_stream(3, 0);
    std::vector<int> seen(4, 0);
    for (int i = 0; i < 300; ++i) {
        const auto w = sample_walk(p, FixedSteps{1}, rng);
        ASSERT_EQ(w.steps(), 1u);
        ASSERT_NE(w.moves[0], kDown);
        ASSERT_LE(w.moves[0], 3u);
        ++seen[w.moves[0]];
    }
    EXPECT_GT(seen[1], 0);
    EXPECT_GT(seen[3], seen[1]);
}

TEST(SampleWalk, StaysAboveRootAndStabilizes) {
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    auto rng = make_stream(3, 1);
    const auto stop = HeightStabilized::with_tolerance(20, 1e-4, p);
    EXPECT_EQ(stop.margin, static_cast<std::int64_t>(std::ceil(std::log(1e-4) / std::log(p.ratio()))));
    for (int i = 0; i < 50; ++i) {
        const auto w = sample_walk(p, stop, rng);
        const auto h = w.heights();
        ASSERT_GE(*std::min_element(h.begin(), h.end()), 0);
        ASSERT_EQ(h.back(), 20 + stop.margin);
        ASSERT_TRUE(w.stabilized_height.has_value());
        ASSERT_LE(w.truncation_bound, 1e-4);
        const auto cut = w.last_time_at_or_below(20);
        ASSERT_LE(h[cut], 20);
        for (auto k = cut + 1; k < h.size(); ++k) ASSERT_GT(h[k], 20);
    }
}

TEST(SampleGw, MeanSizeMatchesGeometricOffspring) {
    // mu(k) = u d^k has mean d/u, so E#t = 1 / (1 - d/u)
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    auto rng = make_stream(9, 0);
    const int N = 40000;
    double s = 0, s2 = 0, root0 = 0;
    for (int i = 0; i < N; ++i) {
        const auto t = sample_gw(p, rng);
        s += static_cast<double>(t.size());
        s2 += static_cast<double>(t.size() * t.size());
        root0 += t.children(0) == 0;
    }
    const double mean = s / N;
    const double se = std::sqrt((s2 / N - mean * mean) / N);
    EXPECT_NEAR(mean, 3.0, 4 * se);
    EXPECT_NEAR(root0 / N, p.up(), 4 * std::sqrt(0.24 / N));
}

TEST(SampleGw, SizeCap) {
    const auto p = ModelParams::make(0.01, {0.5, 0.5});
    auto rng = make_stream(9, 1);
    bool thrown = false;
    for (int i = 0; i < 2000 && !thrown; ++i) {
        try {
            (void)sample_gw(p, rng, 5);
        } catch (const SizeCapExceeded&) {
            thrown = true;
        }
    }
    EXPECT_TRUE(thrown);
}

TEST(SampleGwi, SpineShapes) {
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    auto rng = make_stream(4, 0);
    for (auto dispatch : {Dispatch::left, Dispatch::uniform, Dispatch::size_biased}) {
        for (int i = 0; i < 200; ++i) {
            const auto s = sample_gwi(p, 4, dispatch, rng);
            ASSERT_NO_THROW(s.validate());
            ASSERT_EQ(s.spine_height(), 4u);
            // the tip has no descendants in the slice
            ASSERT_EQ(s.tree.children(s.spine.back()), 0u);
        }
    }
    // left dispatch: each spine vertex is the last child of its parent
    for (int i = 0; i < 200; ++i) {
        const auto s = sample_gwi_left(p, 3, rng);
        const auto words = s.tree.words();
        for (std::size_t k = 1; k < s.spine.size(); ++k) {
            const auto parent = s.spine[k - 1];
            ASSERT_EQ(words[s.spine[k]].back(), s.tree.children(parent));
        }
    }
}

TEST(SizeBiasedForest, RowLayout) {
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    auto rng = make_stream(4, 1);
    for (int i = 0; i < 100; ++i) {
        const auto f = sample_size_biased_forest(p, 3, 2, rng);
        ASSERT_EQ(f.trees.size(), 3u);
        ASSERT_LT(f.spine_row, 3u);
        ASSERT_EQ(f.trees[f.spine_row], f.slice.tree);
    }
}

TEST(LimitPath, DriftOfDoubledD) {
    auto rng = make_stream(21, 0);
    const double horizon = 20.0;
    double acc = 0;
    const int N = 400;
    for (int i = 0; i < N; ++i) {
        const auto path = sample_limit_D(1e-3, horizon, rng);
        ASSERT_DOUBLE_EQ(path.values.front(), 0.0);
        ASSERT_GE(*std::min_element(path.values.begin(), path.values.end()), 0.0);
        acc += path.at(horizon) / horizon;
    }
    // 2 D_s / s -> 4; the O(1/s) bias at s = 20 is about 0.1
    EXPECT_NEAR(acc / N, 4.0, 0.25);
}

TEST(LimitPath, RejectsBadGrid) {
    auto rng = make_stream(21, 1);
    EXPECT_THROW(sample_limit_D(0.0, 1.0, rng), InvalidParams);
    EXPECT_THROW(sample_limit_D(1e-3, -1.0, rng), InvalidParams);
}

TEST(GwiPopulationPgf, NormalizedAtOne) {
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    auto rng = make_stream(2, 0);
    const auto c = gwi_population_pgf_check(p, 1, 3, 1.0, 2000, rng);
    EXPECT_DOUBLE_EQ(c.empirical, 1.0);
    EXPECT_NEAR(c.analytic, 1.0, 1e-14);
}

TEST(GwiPopulationPgf, AgreesWithinErrorBars) {
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    auto rng = make_stream(2, 1);
    const auto c = gwi_population_pgf_check(p, 2, 3, 0.5, 40000, rng);
    EXPECT_NEAR(c.empirical, c.analytic, 4 * c.std_error);
}
