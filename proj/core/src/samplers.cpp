#include "rangelab/samplers.hpp"

#include "rangelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rangelab {

void validate_weights(std::span<const double> weights) {
    if (weights.empty()) throw InvalidParams("weights must not be empty");
    double sum = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double a = weights[i];
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw InvalidParams("weight a_" + std::to_string(i + 1) + " is not a nonnegative number");
        }
        if (a >= 1.0) {
            throw DegenerateWeights("weight a_" + std::to_string(i + 1) + " equals 1; the walk never branches");
        }
        sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw InvalidParams("weights sum to " + std::to_string(sum) + ", expected 1");
    }
}

std::vector<double> uniform_weights(std::size_t b) {
    if (b < 2) throw DegenerateWeights("uniform weights need at least two branches");
    return std::vector<double>(b, 1.0 / static_cast<double>(b));
}

ModelParams ModelParams::make(double epsilon, std::vector<double> weights) {
    ModelParams p{epsilon, std::move(weights)};
    p.validate();
    return p;
}

void ModelParams::validate() const {
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw InvalidParams("epsilon must lie strictly between 0 and 1/2, got " + std::to_string(epsilon));
    }
    validate_weights(weights);
}

double ModelParams::a_plus() const noexcept {
    return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end());
}

double conditioned_up_probability(std::int64_t n, const ModelParams& params) {
    if (n < 0) throw OutOfRange("negative height");
    const double log_q = std::log(params.ratio());
    const double h_next = -std::expm1(static_cast<double>(n + 2) * log_q);
    const double h_here = -std::expm1(static_cast<double>(n + 1) * log_q);
    return std::min(1.0, params.up() * h_next / h_here);
}

HeightStabilized HeightStabilized::with_tolerance(std::int64_t target, double tol, const ModelParams& params) {
    if (!(tol > 0.0 && tol < 1.0)) throw InvalidParams("tolerance must lie in (0, 1)");
    const auto margin = static_cast<std::int64_t>(std::ceil(std::log(tol) / std::log(params.ratio())));
    return {target, std::max<std::int64_t>(margin, 1)};
}

namespace {

/// Up-step probabilities by height; past the table the conditioning is
/// below double resolution and the probability is u.
class UpTable {
public:
    explicit UpTable(const ModelParams& params) : u_(params.up()) {
        const auto n_max = static_cast<std::int64_t>(std::ceil(std::log(1e-18) / std::log(params.ratio())));
        table_.reserve(static_cast<std::size_t>(n_max) + 1);
        for (std::int64_t n = 0; n <= n_max; ++n) table_.push_back(conditioned_up_probability(n, params));
    }
    double operator()(std::int64_t n) const noexcept {
        return static_cast<std::size_t>(n) < table_.size() ? table_[static_cast<std::size_t>(n)] : u_;
    }

private:
    double u_;
    std::vector<double> table_;
};

void append_gw(std::vector<std::uint32_t>& counts, std::geometric_distribution<std::uint32_t>& offspring, Rng& rng,
               std::size_t size_cap) {
    std::uint64_t pending = 1;
    while (pending > 0) {
        const auto k = offspring(rng);
        counts.push_back(k);
        pending += k;
        --pending;
        if (counts.size() > size_cap) {
            throw SizeCapExceeded("tree exceeds the size cap of " + std::to_string(size_cap) + " vertices");
        }
    }
}

}  // namespace

Walk sample_walk(const ModelParams& params, const StopPolicy& stop, Rng& rng) {
    params.validate();
    const UpTable up(params);
    MarkSampler marks(params.weights);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Walk w;
    std::int64_t h = 0;
    auto step = [&] {
        if (unif(rng) < up(h)) {
            w.moves.push_back(marks(rng));
            ++h;
        } else {
            w.moves.push_back(kDown);
            --h;
        }
    };
    if (const auto* fixed = std::get_if<FixedSteps>(&stop)) {
        w.moves.reserve(fixed->steps);
        for (std::size_t i = 0; i < fixed->steps; ++i) step();
    } else {
        const auto& hs = std::get<HeightStabilized>(stop);
        const auto goal = hs.target + hs.margin;
        w.moves.reserve(static_cast<std::size_t>(std::max<double>(16.0, 1.5 * static_cast<double>(goal) /
                                                                           (2.0 * params.epsilon))));
        while (h < goal) step();
        w.stabilized_height = hs.target;
        w.truncation_bound = std::pow(params.ratio(), static_cast<double>(hs.margin));
    }
    return w;
}

OrderedTree sample_gw(const ModelParams& params, Rng& rng, std::size_t size_cap) {
    std::geometric_distribution<std::uint32_t> offspring(params.up());
    std::vector<std::uint32_t> counts;
    append_gw(counts, offspring, rng, size_cap);
    return OrderedTree::from_children_counts(std::move(counts));
}

SinTreeSlice sample_gwi(const ModelParams& params, std::size_t n, Dispatch dispatch, Rng& rng, std::size_t size_cap) {
    if (n < 1) throw OutOfRange("spine height must be at least 1");
    std::geometric_distribution<std::uint32_t> offspring(params.up());
    struct Level {
        std::uint32_t k;
        std::uint32_t slot;  // 1-based position of the spine child
    };
    std::vector<Level> levels(n);
    for (auto& lv : levels) {
        switch (dispatch) {
            case Dispatch::left:
                lv.k = offspring(rng) + 1;
                lv.slot = lv.k;
                break;
            case Dispatch::uniform:
                lv.k = offspring(rng) + 1;
                lv.slot = std::uniform_int_distribution<std::uint32_t>(1, lv.k)(rng);
                break;
            case Dispatch::size_biased:
                lv.k = offspring(rng) + offspring(rng) + 1;
                lv.slot = std::uniform_int_distribution<std::uint32_t>(1, lv.k)(rng);
                break;
        }
    }
    SinTreeSlice s;
    std::vector<std::uint32_t> counts;
    s.spine.reserve(n + 1);
    for (const auto& lv : levels) {
        s.spine.push_back(counts.size());
        counts.push_back(lv.k);
        for (std::uint32_t i = 1; i < lv.slot; ++i) append_gw(counts, offspring, rng, size_cap);
    }
    s.spine.push_back(counts.size());
    counts.push_back(0);
    // right bushes close the spine subtrees from the top down
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
        for (std::uint32_t i = it->slot; i < it->k; ++i) append_gw(counts, offspring, rng, size_cap);
    }
    s.tree = OrderedTree::from_children_counts(std::move(counts));
    return s;
}

SizeBiasedForest sample_size_biased_forest(const ModelParams& params, std::size_t l, std::size_t n, Rng& rng,
                                           std::size_t size_cap) {
    if (l < 1) throw OutOfRange("forest needs at least one tree");
    SizeBiasedForest f;
    f.spine_row = std::uniform_int_distribution<std::size_t>(0, l - 1)(rng);
    f.trees.reserve(l);
    for (std::size_t i = 0; i < l; ++i) {
        if (i == f.spine_row) {
            f.slice = sample_gwi(params, n, Dispatch::size_biased, rng, size_cap);
            f.trees.push_back(f.slice.tree);
        } else {
            f.trees.push_back(sample_gw(params, rng, size_cap));
        }
    }
    return f;
}

double LimitPathSample::at(double s) const {
    if (values.empty()) return 0.0;
    const auto i = static_cast<std::size_t>(std::llround(s / grid_dt));
    return values[std::min(i, values.size() - 1)];
}

LimitPathSample sample_limit_D(double grid_dt, double horizon, Rng& rng) {
    if (!(grid_dt > 0.0) || horizon < 0.0) throw InvalidParams("grid step must be positive and horizon nonnegative");
    LimitPathSample p;
    p.grid_dt = grid_dt;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / grid_dt - 1e-9));
    p.values.reserve(steps + 1);
    p.values.push_back(0.0);
    std::normal_distribution<double> gauss(p.drift * grid_dt, std::sqrt(grid_dt));
    double b = 0.0;
    double inf = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        b += gauss(rng);
        inf = std::min(inf, b);
        p.values.push_back(2.0 * (b - 2.0 * inf));
    }
    return p;
}

PgfCheck gwi_population_pgf_check(const ModelParams& params, std::size_t l, std::size_t n, double x,
                                  std::uint64_t n_samples, Rng& rng) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidParams("x must lie in [0, 1]");
    auto f = [&](double y) { return params.up() / (1.0 - params.down() * y); };
    // f_k(x) for k = 0..n
    std::vector<double> fk{x};
    for (std::size_t k = 1; k <= n; ++k) fk.push_back(f(fk.back()));
    PgfCheck out;
    out.analytic = std::pow(fk[n], static_cast<double>(l));
    for (std::size_t k = 0; k < n; ++k) out.analytic *= f(fk[k]);

    double sum = 0, sum_sq = 0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        // Z_n counts generation n of the whole forest, minus the spine vertex
        std::int64_t at_level = 0;
        auto count_level = [&](const OrderedTree& t) {
            for (auto d : t.depths()) at_level += d == static_cast<std::int64_t>(n);
        };
        if (n == 0) {
            at_level = 1;
        } else {
            count_level(sample_gwi_uniform(params, n, rng).tree);
        }
        for (std::size_t j = 0; j < l; ++j) count_level(sample_gw(params, rng));
        const auto z = at_level - 1;
        const double val = std::pow(x, static_cast<double>(z));
        sum += val;
        sum_sq += val * val;
    }
    const auto N = static_cast<double>(n_samples);
    out.n_samples = n_samples;
    out.empirical = sum / N;
    out.std_error = std::sqrt(std::max(0.0, sum_sq / N - out.empirical * out.empirical) / N);
    return out;
}

}  // namespace rangelab
