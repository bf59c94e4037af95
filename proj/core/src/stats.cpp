#include "rangelab/stats.hpp"

#include "rangelab/errors.hpp"
#include "rangelab/marks.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace rangelab {

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    // the alternating series is useless near 0; use the theta-function dual there
    if (lambda < 1.18) {
        const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
        const double pref = std::sqrt(2.0 * std::numbers::pi) / lambda;
        double cdf = 0;
        for (int k = 1; k < 20; k += 2) cdf += std::pow(y, static_cast<double>(k * k));
        return std::clamp(1.0 - pref * cdf, 0.0, 1.0);
    }
    double q = 0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        q += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-300) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

KSResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InsufficientData("KS test needs two nonempty samples");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const auto n1 = static_cast<double>(x.size());
    const auto n2 = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == t) ++i;
        while (j < y.size() && y[j] == t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
    }
    const double lambda = std::sqrt(n1 * n2 / (n1 + n2)) * d;
    return {d, d == 0.0 ? 1.0 : kolmogorov_q(lambda), x.size(), y.size()};
}

ChiSquareResult chi_square_homogeneity(const ShapeCounts& a, const ShapeCounts& b, double min_expected) {
    struct Cell {
        double a = 0, b = 0;
        double pooled() const { return a + b; }
    };
    std::map<std::string, Cell> table;
    for (const auto& [k, v] : a) table[k].a += static_cast<double>(v);
    for (const auto& [k, v] : b) table[k].b += static_cast<double>(v);
    double na = 0, nb = 0;
    std::vector<Cell> cells;
    for (const auto& [k, c] : table) {
        na += c.a;
        nb += c.b;
        cells.push_back(c);
    }
    if (na == 0 || nb == 0) throw InsufficientData("chi-square test needs two nonempty samples");
    const double n = na + nb;
    const double frac_min = std::min(na, nb) / n;
    // stable order so merging is reproducible whatever the map layout
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.pooled() < y.pooled(); });
    std::vector<Cell> merged;
    Cell acc;
    for (const auto& c : cells) {
        acc.a += c.a;
        acc.b += c.b;
        if (acc.pooled() * frac_min >= min_expected) {
            merged.push_back(acc);
            acc = {};
        }
    }
    if (acc.pooled() > 0) {
        if (merged.empty()) throw InsufficientData("too few observations for a chi-square test");
        merged.front().a += acc.a;
        merged.front().b += acc.b;
    }
    if (merged.size() < 2) throw InsufficientData("fewer than two classes after merging");
    ChiSquareResult r;
    for (const auto& c : merged) {
        const double ea = na * c.pooled() / n;
        const double eb = nb * c.pooled() / n;
        r.statistic += (c.a - ea) * (c.a - ea) / ea + (c.b - eb) * (c.b - eb) / eb;
    }
    r.classes = merged.size();
    r.dof = static_cast<double>(merged.size() - 1);
    r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
    return r;
}

std::string shape_class(const OrderedTree& t, std::size_t max_size) {
    const auto cut = truncate_at_height(t, 2);
    return cut.size() <= max_size ? cut.serialize() : std::string("overflow");
}

namespace {

constexpr std::uint64_t kStreamTest = 0x5eed0001;
constexpr std::uint64_t kStreamReference = 0x5eed0002;
constexpr std::uint64_t kStreamControl = 0x5eed0003;
constexpr std::uint64_t kStreamPerturbed = 0x5eed0004;
constexpr std::uint64_t kStreamDispatch = 0x5eed0005;

template <class Draw>
ShapeCounts shape_counts(std::uint64_t master, std::uint64_t n, Draw&& draw) {
    ShapeCounts counts;
    for (std::uint64_t i = 0; i < n; ++i) {
        auto rng = make_stream(master, i);
        ++counts[shape_class(draw(rng))];
    }
    return counts;
}

DecodedWalk decoded_walk(const ModelParams& p, Rng& rng) {
    // spine height 2 is enough for shapes of height <= 2
    const auto stop = HeightStabilized::with_tolerance(2, 1e-9, p);
    const auto w = sample_walk(p, stop, rng);
    MarkSampler roots(p.weights);
    return decode_walk_to_marked_tree(w, roots, rng);
}

template <class Left, class Right, class Alt>
LawCheck run_law_check(const ModelParams& p, double perturbed_epsilon, std::uint64_t n, std::uint64_t seed,
                       Left&& decoded_shape, Right&& reference_shape, Alt&& alternative_shape) {
    const auto perturbed = ModelParams::make(perturbed_epsilon, p.weights);
    const auto s = [&](std::uint64_t tag) { return derive_seed(seed, tag); };
    const auto data = shape_counts(s(kStreamTest), n, [&](Rng& r) { return decoded_shape(p, r); });
    const auto ref = shape_counts(s(kStreamReference), n, [&](Rng& r) { return reference_shape(p, r); });
    const auto twin = shape_counts(s(kStreamControl), n, [&](Rng& r) { return decoded_shape(p, r); });
    const auto other = shape_counts(s(kStreamPerturbed), n, [&](Rng& r) { return reference_shape(perturbed, r); });
    const auto alt = shape_counts(s(kStreamDispatch), n, [&](Rng& r) { return alternative_shape(p, r); });
    return {chi_square_homogeneity(data, ref), chi_square_homogeneity(data, twin), chi_square_homogeneity(data, other),
            chi_square_homogeneity(data, alt)};
}

}  // namespace

LawCheck law_check_lemma31(const ModelParams& p, double perturbed_epsilon, std::uint64_t n_replicates,
                           std::uint64_t seed) {
    return run_law_check(
        p, perturbed_epsilon, n_replicates, seed, [](const ModelParams& q, Rng& r) { return decoded_walk(q, r).marked.tree; },
        [](const ModelParams& q, Rng& r) { return sample_gwi_left(q, 2, r).tree; },
        [](const ModelParams& q, Rng& r) { return sample_gwi_uniform(q, 2, r).tree; });
}

LawCheck law_check_shuffle(const ModelParams& p, double perturbed_epsilon, std::uint64_t n_replicates,
                           std::uint64_t seed) {
    return run_law_check(
        p, perturbed_epsilon, n_replicates, seed, [](const ModelParams& q, Rng& r) { return shuffle(decoded_walk(q, r).marked, r).tree; },
        [](const ModelParams& q, Rng& r) { return sample_gwi_uniform(q, 2, r).tree; },
        [](const ModelParams& q, Rng& r) { return sample_gwi_left(q, 2, r).tree; });
}

ChiSquareResult law_check_mark_shuffle(const ModelParams& p, std::uint64_t n_replicates, std::uint64_t seed) {
    const auto sorted = shape_counts(derive_seed(seed, kStreamTest), n_replicates, [&](Rng& r) {
        return shuffle(attach_iid_marks(sample_gw(p, r), p.weights, r), r).tree;
    });
    const auto uniform = shape_counts(derive_seed(seed, kStreamReference), n_replicates,
                                      [&](Rng& r) { return uniform_shuffle(sample_gw(p, r), r); });
    return chi_square_homogeneity(sorted, uniform);
}

double SizeBiasCheck::sigmas() const {
    const double se = std::sqrt(lhs_se * lhs_se + rhs_se * rhs_se);
    const double diff = std::abs(lhs - rhs);
    if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / se;
}

SizeBiasCheck sizebias_identity_check(const ModelParams& p, std::size_t l, SizeBiasFunctional g, std::size_t k,
                                      std::uint64_t n_samples, Rng& rng) {
    if (l < 1) throw InvalidParams("forest needs at least one tree");
    if (n_samples < 2) throw InsufficientData("need at least two samples");
    const double mean = p.ratio();
    const auto ll = static_cast<double>(l);
    double ls = 0, ls2 = 0, rs = 0, rs2 = 0;
    const std::size_t spine_height = std::max<std::size_t>(k, 1);
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        // left side: sum over the vertices of l GW trees
        Forest phi;
        std::size_t forest_size = 0;
        for (std::size_t j = 0; j < l; ++j) {
            phi.push_back(sample_gw(p, rng));
            forest_size += phi.back().size();
        }
        double lhs = 0;
        for (const auto& t : phi) {
            if (g == SizeBiasFunctional::height_equals) {
                for (auto d : t.depths()) lhs += d == static_cast<std::int64_t>(k);
            } else {
                for (auto sz : t.subtree_sizes()) lhs += forest_size - sz + 1 <= k;
            }
        }
        // right side: one size-biased forest, all spine heights at once
        double rhs = 0;
        if (g == SizeBiasFunctional::height_equals) {
            rhs = ll * std::pow(mean, static_cast<double>(k));
        } else {
            const auto f = sample_size_biased_forest(p, l, spine_height, rng);
            std::size_t others = 0;
            for (std::size_t j = 0; j < l; ++j) {
                if (j != f.spine_row) others += f.trees[j].size();
            }
            const auto sz = f.slice.tree.subtree_sizes();
            for (std::size_t n = 0; n <= spine_height; ++n) {
                const auto cut_size = others + f.slice.tree.size() - sz[f.slice.spine[n]] + 1;
                if (cut_size <= k) rhs += ll * std::pow(mean, static_cast<double>(n));
            }
        }
        ls += lhs;
        ls2 += lhs * lhs;
        rs += rhs;
        rs2 += rhs * rhs;
    }
    const auto N = static_cast<double>(n_samples);
    auto se = [N](double s, double s2) {
        const double m = s / N;
        return std::sqrt(std::max(0.0, (s2 - N * m * m) / (N - 1)) / N);
    };
    return {ls / N, se(ls, ls2), rs / N, se(rs, rs2), n_samples};
}

}  // namespace rangelab
