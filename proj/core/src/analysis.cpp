#include "rangelab/analysis.hpp"

#include "rangelab/marks.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rangelab {

namespace {

struct Moments {
    double sum = 0;
    double sum_sq = 0;
    std::uint64_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
    double std_error() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

bool all_equal(std::span<const double> w) {
    return std::all_of(w.begin(), w.end(), [&](double a) { return a == w.front(); });
}

}  // namespace

GammaEstimate inv_gamma_mc(std::span<const double> weights, std::uint64_t n_samples, double tol, Rng& rng) {
    validate_weights(weights);
    if (!(tol > 0.0)) throw InvalidParams("tolerance must be positive");
    if (n_samples == 0) throw InsufficientData("need at least one sample");
    MarkSampler draw(weights);
    double a_plus = *std::max_element(weights.begin(), weights.end());
    const double tail_factor = a_plus / (1.0 - a_plus);
    Moments m;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        double s = 1.0;
        double prod = 1.0;
        // remaining terms are at most prod * a_+ / (1 - a_+)
        while (prod * tail_factor >= tol * s) {
            prod *= weights[draw(rng) - 1];
            s += prod;
        }
        m.add(1.0 / s);
    }
    return {m.mean(), m.std_error(), tol, n_samples};
}

GammaEstimate inv_gamma_eps_uniform(std::size_t b, double epsilon) {
    const auto p = ModelParams::make(epsilon, uniform_weights(b));
    const double q = p.ratio();
    const double x = q / static_cast<double>(b);
    double value = 0;
    double s = 0;        // 1 + x + ... + x^n
    double term = 1;     // x^n
    double mass = 1;     // q^n
    std::int64_t n = 0;
    while (mass > 1e-17) {
        s += term;
        value += (1.0 - q) * mass / s;
        term *= x;
        mass *= q;
        ++n;
    }
    return {value, 0.0, mass, 0};
}

GammaEstimate inv_gamma_eps(std::span<const double> weights, double epsilon, std::uint64_t n_samples, Rng& rng) {
    validate_weights(weights);
    if (all_equal(weights)) return inv_gamma_eps_uniform(weights.size(), epsilon);
    if (n_samples == 0) throw InsufficientData("need at least one sample");
    const auto p = ModelParams::make(epsilon, {weights.begin(), weights.end()});
    const double q = p.ratio();
    MarkSampler draw(weights);
    constexpr double kMassCut = 1e-14;
    Moments m;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        // E over G of 1/S_G for this X sequence
        double value = 0, s = 0, term = 1, mass = 1;
        while (mass > kMassCut) {
            s += term;
            value += (1.0 - q) * mass / s;
            term *= q * weights[draw(rng) - 1];
            mass *= q;
        }
        m.add(value);
    }
    return {m.mean(), m.std_error(), kMassCut, n_samples};
}

GammaEstimate distinct_ratio_estimate(const ModelParams& p, std::uint64_t n_trees, Rng& rng) {
    if (n_trees < 2) throw InsufficientData("need at least two trees");
    double sd = 0, st = 0, sdd = 0, stt = 0, sdt = 0;
    for (std::uint64_t i = 0; i < n_trees; ++i) {
        const auto r = distinct_ratio(track(attach_iid_marks(sample_gw(p, rng), p.weights, rng)).z);
        const auto d = static_cast<double>(r.distinct);
        const auto t = static_cast<double>(r.total);
        sd += d;
        st += t;
        sdd += d * d;
        stt += t * t;
        sdt += d * t;
    }
    const auto N = static_cast<double>(n_trees);
    const double md = sd / N, mt = st / N, ratio = md / mt;
    // variance of d - ratio * t, rescaled by the mean size
    const double var = (sdd - 2 * ratio * sdt + ratio * ratio * stt) / N - (md - ratio * mt) * (md - ratio * mt);
    return {ratio, std::sqrt(std::max(0.0, var) / (N - 1)) / mt, 0.0, n_trees};
}

// ---------------------------------------------------------------------------

double f_eval(const ModelParams& p, double x) {
    return p.up() / (1.0 - p.down() * x);
}

double f_i(const ModelParams& p, std::uint32_t i, double x) {
    if (i < 1 || i > p.weights.size()) throw OutOfRange("letter outside the weight support");
    const double a = p.weights[i - 1];
    return f_eval(p, 1.0 - a + a * x);
}

double f_v_compose(const ModelParams& p, const Word& v, double x) {
    for (auto it = v.rbegin(); it != v.rend(); ++it) x = f_i(p, *it, x);
    return x;
}

GenFunParams<double> gen_fun_params(const ModelParams& p, const Word& v) {
    return GenFunParams<double>::of(v, p.up() / p.down(), p.weights);
}

double f_v_closed(const ModelParams& p, const Word& v, double x) {
    if (v.empty()) throw EmptyWord("the closed form needs a nonempty word");
    return gen_fun_params(p, v).eval(x);
}

double f_n_closed(const ModelParams& p, std::int64_t n, double x) {
    if (n < 0) throw OutOfRange("negative iterate");
    // the rational form divided through by (u/d)^n, which keeps it finite
    const double r = p.up() / p.down();
    const double q = p.ratio();
    const double qn = std::pow(q, static_cast<double>(n));
    return r * (qn - 1.0 - x * (qn - q)) / (qn - r - x * (qn - 1.0));
}

double f_n_iterate(const ModelParams& p, std::int64_t n, double x) {
    for (std::int64_t k = 0; k < n; ++k) x = f_eval(p, x);
    return x;
}

double f_n_power(double epsilon, double delta) {
    const auto p = ModelParams::make(epsilon, {0.5, 0.5});
    const auto n = static_cast<std::int64_t>(std::floor(delta / epsilon));
    const auto k = std::floor(1.0 / epsilon);
    const double r = p.up() / p.down();
    const double qn = std::pow(p.ratio(), static_cast<double>(n));
    // 1 - f_n(0) = q^n (r - 1) / (r - q^n)
    const double tail = qn * (r - 1.0) / (r - qn);
    return std::exp(k * std::log1p(-tail));
}

double f_n_power_limit(double delta) {
    return std::exp(-4.0 / std::expm1(4.0 * delta));
}

std::vector<ConditionalPgfClass> conditional_z_pgf_check(const ModelParams& p, const Word& v, const Word& w, double x,
                                                         std::size_t l, std::uint64_t n_samples, Rng& rng,
                                                         std::uint64_t min_count) {
    p.validate();
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidParams("x must lie in [0, 1]");
    if (l < 1) throw InvalidParams("forest needs at least one tree");
    Word vw = v;
    vw.insert(vw.end(), w.begin(), w.end());
    const double fw = f_v_compose(p, w, x);
    std::map<std::uint64_t, Moments> classes;
    std::vector<MarkedTree> forest(l);
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        for (auto& T : forest) T = attach_iid_marks(sample_gw(p, rng), p.weights, rng);
        const auto z = track_forest(forest);
        classes[z.count(v)].add(std::pow(x, static_cast<double>(z.count(vw))));
    }
    std::vector<ConditionalPgfClass> out;
    for (const auto& [zv, m] : classes) {
        if (m.n < min_count) continue;
        out.push_back({zv, m.n, m.mean(), m.std_error(), std::pow(fw, static_cast<double>(zv))});
    }
    return out;
}

// ---------------------------------------------------------------------------

bool in_event_A(const OrderedTree& t) {
    if (t.size() < 3 || t.children(0) != 2 || t.children(1) != 0) return false;
    return t.children(2) > 0;
}

EventFrequency event_A_frequency(const ModelParams& p, std::uint64_t n_samples, double tol, Rng& rng) {
    if (n_samples == 0) throw InsufficientData("need at least one sample");
    const auto stop = HeightStabilized::with_tolerance(1, tol, p);
    Moments left, right;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        const auto w = sample_walk(p, stop, rng);
        // every vertex of height <= 2 is entered by time (last visit at height <= 1) + 1
        const auto t = truncate_at_height(range_tree(w, w.last_time_at_or_below(1) + 1), 2);
        left.add(in_event_A(t) ? 1.0 : 0.0);
        right.add(in_event_A(mirror(t)) ? 1.0 : 0.0);
    }
    EventFrequency f;
    f.p_left = left.mean();
    f.p_right = right.mean();
    f.se_left = left.std_error();
    f.se_right = right.std_error();
    f.truncation_bound = std::pow(p.ratio(), static_cast<double>(stop.margin));
    f.n_samples = n_samples;
    return f;
}

// ---------------------------------------------------------------------------

double escape_probability(const ModelParams& p) {
    p.validate();
    return p.ratio();
}

double escape_probability_dp(const ModelParams& p, std::size_t horizon) {
    p.validate();
    const double u = p.up(), d = p.down();
    // hit[n]: probability of reaching -1 within k steps from n; heights above
    // the remaining horizon cannot reach -1 and stay at 0
    std::vector<double> hit(horizon + 2, 0.0), next(horizon + 2, 0.0);
    for (std::size_t k = 1; k <= horizon; ++k) {
        const std::size_t top = horizon - k + 1;
        for (std::size_t n = 0; n <= top; ++n) {
            const double below = n == 0 ? 1.0 : hit[n - 1];
            next[n] = u * hit[n + 1] + d * below;
        }
        std::swap(hit, next);
    }
    return hit[0];
}

std::vector<double> conditioned_up_probability_dp(const ModelParams& p, std::size_t horizon, std::size_t max_height) {
    p.validate();
    if (horizon < 1) throw InvalidParams("horizon must be at least 1");
    const double u = p.up(), d = p.down();
    const std::size_t width = max_height + horizon + 2;
    // survive[n]: probability of staying >= 0 for k steps from n (1 when n >= k)
    std::vector<double> survive(width, 1.0), next(width, 1.0), previous;
    for (std::size_t k = 1; k <= horizon; ++k) {
        for (std::size_t n = 0; n + 1 < width; ++n) {
            const double below = n == 0 ? 0.0 : survive[n - 1];
            next[n] = u * survive[n + 1] + d * below;
        }
        if (k == horizon) previous = survive;
        std::swap(survive, next);
    }
    std::vector<double> up(max_height + 1);
    for (std::size_t n = 0; n <= max_height; ++n) up[n] = u * previous[n + 1] / survive[n];
    return up;
}

}  // namespace rangelab
