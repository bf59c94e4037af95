#pragma once

#include "rangelab/results.hpp"
#include "rangelab/samplers.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rangelab {

/// Runs body(i) for i in [0, n), split into `shards` contiguous blocks
/// processed by `workers` threads (0: hardware concurrency). The first
/// exception thrown by any block is rethrown.
void parallel_shards(std::uint64_t n, std::size_t shards, std::size_t workers,
                     const std::function<void(std::uint64_t)>& body);

struct EnsembleConfig {
    ModelParams params;
    /// Height cutoff in limit units; trees are cut at floor(x_cut / epsilon).
    double x_cut = 12.0;
    std::uint64_t n_replicates = 4000;
    std::uint64_t seed = 1;
    std::size_t shards = 8;
    std::size_t workers = 0;
    std::vector<double> observation_times{0.2, 0.5};
    /// Return probability allowed after the walk stops.
    double tol = 1e-4;
    /// Store the range tree serialization in each record.
    bool store_trees = false;

    std::int64_t x_eps() const;
    void validate() const;
};

/// Names of the per-replicate exact identities, in bit order.
const std::vector<std::string>& identity_names();

struct ReplicateRecord {
    std::uint64_t replicate = 0;
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    std::size_t cut_time = 0;
    std::size_t size_tau = 0;
    std::size_t size_tilde = 0;
    std::uint64_t distinct = 0;
    std::uint64_t total = 0;
    /// Bit k set when identity_names()[k] fails on this replicate.
    std::uint32_t failed_identities = 0;
    /// One value per observation time; epsilon-rescaled.
    std::vector<double> tau_contour_left, tau_contour_right, tau_height_left, tau_height_right;
    std::vector<double> tilde_contour_left, tilde_contour_right;
    std::string tau_serialized;

    std::string to_json(const EnsembleConfig& cfg) const;
};

/// One replicate: conditioned walk stabilized above x_eps, its range tree cut
/// at the last visit at or below x_eps, the decoded and shuffled tree, the
/// exact identities between them, and their rescaled marginals.
ReplicateRecord simulate_replicate(const EnsembleConfig& cfg, std::uint64_t index);

struct Ensemble {
    EnsembleConfig cfg;
    std::vector<ReplicateRecord> records;

    std::string to_jsonl() const;
};

Ensemble simulate_ensemble(const EnsembleConfig& cfg);

/// Samples of 2 D at each s and at gamma s, one path per replicate.
struct LimitMarginals {
    std::vector<double> times;
    double gamma = 1.0;
    double grid_dt = 1e-4;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> at_s;
    std::vector<std::vector<double>> at_gamma_s;
    /// Fraction of paths whose maximum on [0, max(gamma, 1) max s] exceeds x_cut.
    double mass_above_cut = 0;
};

LimitMarginals sample_limit_marginals(const EnsembleConfig& cfg, double gamma, double grid_dt,
                                      std::uint64_t n_paths);

/// marginals.csv: s,value,source,series.
std::string marginals_csv(const Ensemble& e, const LimitMarginals& lim);

/// KS rows of the contour and height marginals of the range tree against
/// 2 D_{gamma s}, both sides, plus the negative control against 2 D_s.
std::vector<TestRow> theorem1_marginal_test(const Ensemble& e, const LimitMarginals& lim);

/// KS rows of the unshrunk shuffled tree against 2 D_s, and the shrinking
/// contrast between the two trees.
std::vector<TestRow> lemma34_marginal_test(const Ensemble& e, const LimitMarginals& lim);

/// One exact row per identity (failing replicate count), plus the cut check
/// on the limit law.
std::vector<TestRow> ensemble_identity_rows(const Ensemble& e, const LimitMarginals& lim);

std::string params_label(const EnsembleConfig& cfg);

}  // namespace rangelab
