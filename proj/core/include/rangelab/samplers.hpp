#pragma once

#include "rangelab/rng.hpp"
#include "rangelab/trees.hpp"
#include "rangelab/walk.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace rangelab {

/// Throws InvalidParams (or DegenerateWeights) unless the weights form a
/// finite probability vector with every entry < 1.
void validate_weights(std::span<const double> weights);

std::vector<double> uniform_weights(std::size_t b);

/// Drift parameter and branch weights of the walk.
struct ModelParams {
    double epsilon = 0.1;
    std::vector<double> weights;

    /// Validating constructor.
    static ModelParams make(double epsilon, std::vector<double> weights);

    void validate() const;

    double up() const noexcept { return 0.5 + epsilon; }
    double down() const noexcept { return 0.5 - epsilon; }
    /// d/u: mean of the offspring law, and the probability of ever hitting -1.
    double ratio() const noexcept { return down() / up(); }
    double a_plus() const noexcept;
    std::size_t branches() const noexcept { return weights.size(); }
};

/// Draws a branch index j >= 1 with probability a_j.
class MarkSampler {
public:
    explicit MarkSampler(std::span<const double> weights) : dist_(weights.begin(), weights.end()) {}
    std::uint32_t operator()(Rng& rng) { return static_cast<std::uint32_t>(dist_(rng)) + 1; }

private:
    std::discrete_distribution<std::uint32_t> dist_;
};

/// Probability of an up-step at height n for the walk conditioned never to
/// hit -1, via the harmonic function h(n) = 1 - (d/u)^{n+1}.
double conditioned_up_probability(std::int64_t n, const ModelParams& params);

struct FixedSteps {
    std::size_t steps = 1;
};

/// Run until the height reaches target + margin.
struct HeightStabilized {
    std::int64_t target = 0;
    std::int64_t margin = 0;

    /// Margin ceil(ln(tol) / ln(d/u)): the conditioned walk then returns to
    /// the target level after stopping with probability at most tol.
    static HeightStabilized with_tolerance(std::int64_t target, double tol, const ModelParams& params);
};

using StopPolicy = std::variant<FixedSteps, HeightStabilized>;

inline constexpr std::size_t kDefaultSizeCap = 10'000'000;

Walk sample_walk(const ModelParams& params, const StopPolicy& stop, Rng& rng);

/// GW tree with offspring law mu(k) = u d^k. Throws SizeCapExceeded.
OrderedTree sample_gw(const ModelParams& params, Rng& rng, std::size_t size_cap = kDefaultSizeCap);

/// How the spine child is placed among the children of a spine vertex.
enum class Dispatch {
    left,         ///< k - 1 ~ mu, spine child is the last one
    uniform,      ///< k - 1 ~ mu, spine child slot uniform in 1..k
    size_biased,  ///< P(k) = k mu(k) / mean, slot uniform in 1..k
};

/// [tau]_{u*_n} for a GWI tree with GW(mu) bushes and the given dispatching.
SinTreeSlice sample_gwi(const ModelParams& params, std::size_t n, Dispatch dispatch, Rng& rng,
                        std::size_t size_cap = kDefaultSizeCap);

inline SinTreeSlice sample_gwi_left(const ModelParams& p, std::size_t n, Rng& rng,
                                    std::size_t size_cap = kDefaultSizeCap) {
    return sample_gwi(p, n, Dispatch::left, rng, size_cap);
}

inline SinTreeSlice sample_gwi_uniform(const ModelParams& p, std::size_t n, Rng& rng,
                                       std::size_t size_cap = kDefaultSizeCap) {
    return sample_gwi(p, n, Dispatch::uniform, rng, size_cap);
}

struct SizeBiasedForest {
    /// The l trees; trees[spine_row] is slice.tree.
    Forest trees;
    std::size_t spine_row = 0;
    SinTreeSlice slice;
};

/// l - 1 GW trees plus one size-biased slice of spine height n, placed in a
/// uniformly chosen row.
SizeBiasedForest sample_size_biased_forest(const ModelParams& params, std::size_t l, std::size_t n, Rng& rng,
                                           std::size_t size_cap = kDefaultSizeCap);

/// Euler sample of 2 D_s on a uniform grid, D = B^{(-2)} - 2 I^{(-2)}.
struct LimitPathSample {
    double grid_dt = 1e-4;
    double drift = -2.0;
    std::vector<double> values;

    /// Value at the grid point nearest to s.
    double at(double s) const;
};

LimitPathSample sample_limit_D(double grid_dt, double horizon, Rng& rng);

struct PgfCheck {
    double empirical = 0;
    double std_error = 0;
    double analytic = 0;
    std::uint64_t n_samples = 0;
};

/// E[x^{Z_n}] for a forest made of one uniform-dispatch GWI tree and l GW
/// trees, against f_n(x)^l * prod_{k<n} g(f_k(x)) with g = f.
PgfCheck gwi_population_pgf_check(const ModelParams& params, std::size_t l, std::size_t n, double x,
                                  std::uint64_t n_samples, Rng& rng);

}  // namespace rangelab
