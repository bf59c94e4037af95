#pragma once

#include "rangelab/errors.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/samplers.hpp"
#include "rangelab/trees.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace rangelab {

struct GammaEstimate {
    double value = 0;
    double std_error = 0;
    double truncation_bound = 0;
    std::uint64_t n_samples = 0;
};

/// Monte Carlo estimate of 1/gamma = E[1 / (1 + X1 + X1 X2 + ...)], X = a_J with
/// J drawn from the weights. Each series stops once the geometric tail bound
/// falls below tol times the partial sum.
GammaEstimate inv_gamma_mc(std::span<const double> weights, std::uint64_t n_samples, double tol, Rng& rng);

/// 1/gamma_eps = E[1 / (1 + X1 q + ... + X1...XG q^G)], q = d/u, P(G = n) = (1-q) q^n.
/// Uniform weights are summed exactly; otherwise G is integrated out per
/// sampled X sequence.
GammaEstimate inv_gamma_eps(std::span<const double> weights, double epsilon, std::uint64_t n_samples, Rng& rng);

/// Exact series for uniform weights on b letters.
GammaEstimate inv_gamma_eps_uniform(std::size_t b, double epsilon);

/// Empirical 1/gamma_eps: distinct tracked words over vertices, summed over
/// i.i.d.-marked GW trees (ratio of sums, delta-method standard error).
GammaEstimate distinct_ratio_estimate(const ModelParams& p, std::uint64_t n_trees, Rng& rng);

// ---------------------------------------------------------------------------
// Generating functions

/// f(x) = u / (1 - d x), the pgf of mu(k) = u d^k.
double f_eval(const ModelParams& p, double x);
/// f_i(x) = f(1 - a_i + a_i x), i >= 1.
double f_i(const ModelParams& p, std::uint32_t i, double x);
/// f_v = f_{m1} o ... o f_{mn}, applied right to left; f_empty = Id.
double f_v_compose(const ModelParams& p, const Word& v, double x);

/// A(v), B(v) with 1 - f_v(x) = (1-x) / (A (1-x) + B). Appending letter m
/// gives A <- A + B and B <- B (u/d) / a_m. Real may be an exact rational.
template <class Real>
struct GenFunParams {
    Word v;
    Real A{0};
    Real B{1};

    void append(std::uint32_t m, const Real& u_over_d, const std::vector<Real>& weights) {
        if (m < 1 || m > weights.size()) throw OutOfRange("letter outside the weight support");
        A = A + B;
        B = B * u_over_d / weights[m - 1];
        v.push_back(m);
    }

    static GenFunParams of(const Word& word, const Real& u_over_d, const std::vector<Real>& weights) {
        GenFunParams g;
        for (auto m : word) g.append(m, u_over_d, weights);
        return g;
    }

    Real eval(const Real& x) const {
        const Real xc = Real(1) - x;
        return Real(1) - xc / (A * xc + B);
    }
};

/// Direct sums A(v) = sum_{k<n} (u/d)^k / (a_{m1}...a_{mk}), B(v) = (u/d)^n / a_v.
template <class Real>
std::pair<Real, Real> gen_fun_direct(const Word& v, const Real& u_over_d, const std::vector<Real>& weights) {
    Real A{0};
    Real term{1};
    for (auto m : v) {
        A = A + term;
        term = term * u_over_d / weights[m - 1];
    }
    return {A, term};
}

GenFunParams<double> gen_fun_params(const ModelParams& p, const Word& v);

/// Closed form of f_v; throws EmptyWord on the empty word.
double f_v_closed(const ModelParams& p, const Word& v, double x);

/// n-fold iterate of f, in closed form.
double f_n_closed(const ModelParams& p, std::int64_t n, double x);
double f_n_iterate(const ModelParams& p, std::int64_t n, double x);

/// (f_{floor(delta/eps)}(0))^{floor(1/eps)}.
double f_n_power(double epsilon, double delta);
/// exp(-4 / (e^{4 delta} - 1)).
double f_n_power_limit(double delta);

struct ConditionalPgfClass {
    std::uint64_t z = 0;
    std::uint64_t count = 0;
    double empirical = 0;
    double std_error = 0;
    double analytic = 0;
};

/// E[x^{Z_vw} | Z_v = z] over marked GW forests with l trees, per class z
/// with at least min_count samples, against f_w(x)^z.
std::vector<ConditionalPgfClass> conditional_z_pgf_check(const ModelParams& p, const Word& v, const Word& w, double x,
                                                         std::size_t l, std::uint64_t n_samples, Rng& rng,
                                                         std::uint64_t min_count = 100);

// ---------------------------------------------------------------------------
// Example event A = {k_root = 2, k_1 = 0, k_2 > 0}

template <class Real>
std::pair<Real, Real> example_event_probabilities(const Real& a, const Real& epsilon) {
    const Real half = Real(1) / Real(2);
    const Real u = half + epsilon;
    const Real d = half - epsilon;
    const Real num = d * u * u * a * (Real(1) - a);
    auto p = [&](const Real& w) { return num / ((u + d * w) * (u + d * d * w)); };
    return {p(a), p(Real(1) - a)};
}

bool in_event_A(const OrderedTree& t);

struct EventFrequency {
    double p_left = 0;
    double p_right = 0;
    double se_left = 0;
    double se_right = 0;
    double truncation_bound = 0;
    std::uint64_t n_samples = 0;
};

/// Frequencies of A for the range tree and its mirror, from walks stabilized
/// above height 1 with the given tolerance.
EventFrequency event_A_frequency(const ModelParams& p, std::uint64_t n_samples, double tol, Rng& rng);

// ---------------------------------------------------------------------------
// Escape and survival

/// P(T_{-1} < infinity) = d/u for the unconditioned walk from 0.
double escape_probability(const ModelParams& p);
/// P(T_{-1} <= horizon) by dynamic programming.
double escape_probability_dp(const ModelParams& p, std::size_t horizon);

/// Up-step probability at heights 0..max_height of the walk conditioned to
/// stay nonnegative for `horizon` more steps, by dynamic programming.
std::vector<double> conditioned_up_probability_dp(const ModelParams& p, std::size_t horizon, std::size_t max_height);

}  // namespace rangelab
