#pragma once

#include "rangelab/rng.hpp"
#include "rangelab/samplers.hpp"
#include "rangelab/trees.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace rangelab {

struct KSResult {
    double statistic = 0;
    double p_value = 1;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// Q(sqrt(n1 n2 / (n1 + n2)) D). Throws InsufficientData on empty input.
KSResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
    double statistic = 0;
    double dof = 0;
    double p_value = 1;
    /// Classes left after merging.
    std::size_t classes = 0;
};

using ShapeCounts = std::map<std::string, std::uint64_t>;

/// Pearson homogeneity test on two count tables. Classes are visited in
/// increasing order of pooled count and merged until every expected count
/// is at least min_expected. Throws InsufficientData when fewer than two
/// classes survive.
ChiSquareResult chi_square_homogeneity(const ShapeCounts& a, const ShapeCounts& b, double min_expected = 5.0);

/// Class of the height-<=2 truncation: its serialization when it has at most
/// max_size vertices, "overflow" otherwise.
std::string shape_class(const OrderedTree& t, std::size_t max_size = 8);

struct LawCheck {
    ChiSquareResult test;      ///< the identity under test
    ChiSquareResult aa;        ///< same sampler against itself
    ChiSquareResult ab;        ///< reference sampler at a perturbed epsilon, expected to reject
    ChiSquareResult ab_dispatch;  ///< reference sampler with the other dispatch rule, expected to reject
};

/// Decoded walk trees against left-dispatch GWI slices (shapes at height <= 2).
LawCheck law_check_lemma31(const ModelParams& p, double perturbed_epsilon, std::uint64_t n_replicates,
                           std::uint64_t seed);

/// Shuffled decoded walk trees against uniform-dispatch GWI slices.
LawCheck law_check_shuffle(const ModelParams& p, double perturbed_epsilon, std::uint64_t n_replicates,
                           std::uint64_t seed);

/// Shapes of mark-sorted i.i.d.-marked GW trees against uniform sibling
/// shuffles of GW trees.
ChiSquareResult law_check_mark_shuffle(const ModelParams& p, std::uint64_t n_replicates, std::uint64_t seed);

enum class SizeBiasFunctional {
    height_equals,  ///< G([phi]_u, u) = 1{|u| = k}
    cut_size_at_most,  ///< G([phi]_u, u) = 1{#[phi]_u <= k}
};

struct SizeBiasCheck {
    double lhs = 0;
    double lhs_se = 0;
    double rhs = 0;
    double rhs_se = 0;
    std::uint64_t n_samples = 0;

    double sigmas() const;
};

/// Both sides of the size-biased identity: the sum of G([phi]_u, u) over a GW
/// forest, against sum_n l mean^n E[G([phi_b]_{u*_n}, u*_n)].
SizeBiasCheck sizebias_identity_check(const ModelParams& p, std::size_t l, SizeBiasFunctional g, std::size_t k,
                                      std::uint64_t n_samples, Rng& rng);

}  // namespace rangelab
