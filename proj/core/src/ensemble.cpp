#include "rangelab/ensemble.hpp"

#include "rangelab/errors.hpp"
#include "rangelab/marks.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace rangelab {

void parallel_shards(std::uint64_t n, std::size_t shards, std::size_t workers,
                     const std::function<void(std::uint64_t)>& body) {
    shards = std::max<std::size_t>(1, shards);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, shards);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (std::size_t s = next++; s < shards; s = next++) {
            const auto lo = n * s / shards;
            const auto hi = n * (s + 1) / shards;
            try {
                for (auto i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < workers; ++k) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::int64_t EnsembleConfig::x_eps() const {
    return static_cast<std::int64_t>(std::floor(x_cut / params.epsilon + 1e-9));
}

void EnsembleConfig::validate() const {
    params.validate();
    if (!(x_cut > 0.0) || x_eps() < 1) throw InvalidParams("x_cut must give a cut height of at least 1");
    if (n_replicates < 1) throw InvalidParams("need at least one replicate");
    if (shards < 1) throw InvalidParams("shards must be positive");
    if (observation_times.empty()) throw InvalidParams("need at least one observation time");
    for (auto s : observation_times) {
        if (!(s > 0.0)) throw InvalidParams("observation times must be positive");
    }
    if (!(tol > 0.0 && tol < 1.0)) throw InvalidParams("tol must lie in (0, 1)");
}

const std::vector<std::string>& identity_names() {
    static const std::vector<std::string> names{
        "track_image_equals_visited_set",  // Tr of the decoded tree = {W_n}
        "shuffle_preserves_track",         // same multiset of tracked words
        "shuffled_track_monotone",         // u <= v => Tr(u) <= Tr(v), lexicographic
        "shuffled_siblings_sorted",        // marks nondecreasing along sibling blocks
        "shrink_equals_range_tree",        // canonical tree of the image = range tree
        "cut_coincides_below_x",           // cut and full range trees agree up to x_eps
        "z_total_equals_size",             // sum_v Z_v = size of the shuffled tree
        "shrinking_only_merges",           // size of shuffled >= size of range tree
    };
    return names;
}

namespace {

bool monotone_in_preorder(const Track& tr) {
    const auto rank = tr.z.lex_ranks();
    for (std::size_t v = 1; v < tr.node_of_vertex.size(); ++v) {
        if (rank[tr.node_of_vertex[v]] < rank[tr.node_of_vertex[v - 1]]) return false;
    }
    return true;
}

std::size_t height_index(double s, double eps) {
    return static_cast<std::size_t>(std::floor(s / (2.0 * eps * eps) + 1e-9));
}

struct Marginals {
    std::vector<double> contour, height;
};

Marginals rescaled_marginals(const OrderedTree& t, const EnsembleConfig& cfg) {
    const double eps = cfg.params.epsilon;
    const auto h = height_process(t);
    const auto c = contour_from_height(h, t.size());
    Marginals m;
    for (auto s : cfg.observation_times) {
        m.contour.push_back(eps * contour_at(c, s / (eps * eps)));
        const auto k = height_index(s, eps);
        m.height.push_back(k < h.values.size() ? eps * static_cast<double>(h.values[k]) : 0.0);
    }
    return m;
}

}  // namespace

ReplicateRecord simulate_replicate(const EnsembleConfig& cfg, std::uint64_t index) {
    const auto& p = cfg.params;
    ReplicateRecord r;
    r.replicate = index;
    r.seed = derive_seed(cfg.seed, index);
    Rng rng(r.seed);

    const auto x = cfg.x_eps();
    const auto w = sample_walk(p, HeightStabilized::with_tolerance(x, cfg.tol, p), rng);
    r.steps = w.steps();
    r.cut_time = w.last_time_at_or_below(x);
    const auto tau = range_tree(w, r.cut_time);

    MarkSampler roots(p.weights);
    const auto decoded = decode_walk_to_marked_tree(w, roots, rng);
    const auto tilde = shuffle(decoded.marked, rng);
    const auto tr_bar = track(decoded.marked);
    const auto tr_tilde = track(tilde);

    std::vector<bool> ok(identity_names().size(), true);
    ok[0] = same_words(tr_bar.z, visited_words(w, r.cut_time), false);
    ok[1] = same_words(tr_bar.z, tr_tilde.z, true);
    ok[2] = monotone_in_preorder(tr_tilde);
    ok[3] = track_is_sibling_sorted(tilde);
    ok[4] = ok[3] && tr_tilde.z.to_ordered_tree() == tau;
    ok[5] = truncate_at_height(range_tree(w), x) == truncate_at_height(tau, x);
    ok[6] = tr_tilde.z.total() == tilde.tree.size();
    ok[7] = tilde.tree.size() >= tau.size();
    for (std::size_t k = 0; k < ok.size(); ++k) {
        if (!ok[k]) r.failed_identities |= 1u << k;
    }

    r.size_tau = tau.size();
    r.size_tilde = tilde.tree.size();
    const auto dr = distinct_ratio(tr_tilde.z);
    r.distinct = dr.distinct;
    r.total = dr.total;

    const auto left = rescaled_marginals(tau, cfg);
    const auto right = rescaled_marginals(mirror(tau), cfg);
    r.tau_contour_left = left.contour;
    r.tau_height_left = left.height;
    r.tau_contour_right = right.contour;
    r.tau_height_right = right.height;
    r.tilde_contour_left = rescaled_marginals(tilde.tree, cfg).contour;
    r.tilde_contour_right = rescaled_marginals(mirror(tilde.tree), cfg).contour;
    if (cfg.store_trees) r.tau_serialized = tau.serialize();
    return r;
}

std::string params_label(const EnsembleConfig& cfg) {
    std::ostringstream os;
    os << "epsilon=" << format_double(cfg.params.epsilon) << ";weights=";
    for (std::size_t i = 0; i < cfg.params.weights.size(); ++i) {
        os << (i ? "/" : "") << format_double(cfg.params.weights[i]);
    }
    os << ";x=" << format_double(cfg.x_cut) << ";n=" << cfg.n_replicates << ";tol=" << format_double(cfg.tol);
    return os.str();
}

std::string ReplicateRecord::to_json(const EnsembleConfig& cfg) const {
    nlohmann::ordered_json j;
    j["replicate"] = replicate;
    j["seed"] = seed;
    j["params"] = {{"epsilon", cfg.params.epsilon}, {"weights", cfg.params.weights}, {"x_cut", cfg.x_cut},
                   {"x_eps", cfg.x_eps()}, {"tol", cfg.tol}};
    j["steps"] = steps;
    j["cut_time"] = cut_time;
    j["size_tau"] = size_tau;
    j["size_tau_tilde"] = size_tilde;
    j["distinct"] = distinct;
    j["total"] = total;
    nlohmann::ordered_json failed = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < identity_names().size(); ++k) {
        if (failed_identities & (1u << k)) failed.push_back(identity_names()[k]);
    }
    j["failed_identities"] = failed;
    j["times"] = cfg.observation_times;
    j["tau_contour_left"] = tau_contour_left;
    j["tau_contour_right"] = tau_contour_right;
    j["tau_height_left"] = tau_height_left;
    j["tau_height_right"] = tau_height_right;
    j["tau_tilde_contour_left"] = tilde_contour_left;
    j["tau_tilde_contour_right"] = tilde_contour_right;
    if (!tau_serialized.empty()) j["tau"] = tau_serialized;
    return j.dump();
}

std::string Ensemble::to_jsonl() const {
    std::string out;
    for (const auto& r : records) {
        out += r.to_json(cfg);
        out += '\n';
    }
    return out;
}

Ensemble simulate_ensemble(const EnsembleConfig& cfg) {
    cfg.validate();
    Ensemble e{cfg, std::vector<ReplicateRecord>(cfg.n_replicates)};
    parallel_shards(cfg.n_replicates, cfg.shards, cfg.workers,
                    [&](std::uint64_t i) { e.records[i] = simulate_replicate(cfg, i); });
    return e;
}

LimitMarginals sample_limit_marginals(const EnsembleConfig& cfg, double gamma, double grid_dt,
                                      std::uint64_t n_paths) {
    cfg.validate();
    if (!(gamma > 0.0)) throw InvalidParams("gamma must be positive");
    LimitMarginals lim;
    lim.times = cfg.observation_times;
    lim.gamma = gamma;
    lim.grid_dt = grid_dt;
    lim.seed = derive_seed(cfg.seed, 0x11317ULL);
    const auto k = lim.times.size();
    lim.at_s.assign(k, std::vector<double>(n_paths));
    lim.at_gamma_s.assign(k, std::vector<double>(n_paths));
    std::vector<char> above(n_paths, 0);
    const double horizon = std::max(gamma, 1.0) * *std::max_element(lim.times.begin(), lim.times.end());
    parallel_shards(n_paths, cfg.shards, cfg.workers, [&](std::uint64_t i) {
        auto rng = make_stream(lim.seed, i);
        const auto path = sample_limit_D(grid_dt, horizon, rng);
        for (std::size_t j = 0; j < k; ++j) {
            lim.at_s[j][i] = path.at(lim.times[j]);
            lim.at_gamma_s[j][i] = path.at(gamma * lim.times[j]);
        }
        above[i] = *std::max_element(path.values.begin(), path.values.end()) > cfg.x_cut;
    });
    lim.mass_above_cut =
        static_cast<double>(std::count(above.begin(), above.end(), 1)) / static_cast<double>(n_paths);
    return lim;
}

std::string marginals_csv(const Ensemble& e, const LimitMarginals& lim) {
    std::ostringstream os;
    os << "s,value,source,series\n";
    const auto& times = e.cfg.observation_times;
    auto emit = [&](std::size_t j, const char* source, const char* series, auto&& get) {
        for (const auto& r : e.records) {
            os << format_double(times[j]) << ',' << format_double(get(r)[j]) << ',' << source << ',' << series << '\n';
        }
    };
    for (std::size_t j = 0; j < times.size(); ++j) {
        emit(j, "tau", "contour_left", [](const ReplicateRecord& r) -> auto& { return r.tau_contour_left; });
        emit(j, "tau", "contour_right", [](const ReplicateRecord& r) -> auto& { return r.tau_contour_right; });
        emit(j, "tau", "height_left", [](const ReplicateRecord& r) -> auto& { return r.tau_height_left; });
        emit(j, "tau", "height_right", [](const ReplicateRecord& r) -> auto& { return r.tau_height_right; });
        emit(j, "tau_tilde", "contour_left", [](const ReplicateRecord& r) -> auto& { return r.tilde_contour_left; });
        emit(j, "tau_tilde", "contour_right",
             [](const ReplicateRecord& r) -> auto& { return r.tilde_contour_right; });
        for (auto v : lim.at_s[j]) os << format_double(times[j]) << ',' << format_double(v) << ",limit,D\n";
        for (auto v : lim.at_gamma_s[j]) {
            os << format_double(times[j]) << ',' << format_double(v) << ",limit_gamma,D\n";
        }
    }
    return os.str();
}

namespace {

std::vector<double> column(const Ensemble& e, std::size_t j, std::vector<double> ReplicateRecord::*field) {
    std::vector<double> out;
    out.reserve(e.records.size());
    for (const auto& r : e.records) out.push_back((r.*field)[j]);
    return out;
}

TestRow ks_row(const std::string& name, std::span<const double> a, std::span<const double> b, Criterion c,
               double threshold, const Ensemble& e, double s) {
    const auto ks = ks_two_sample(a, b);
    std::ostringstream detail;
    detail << "s=" << format_double(s) << ";n1=" << ks.n1 << ";n2=" << ks.n2;
    return make_row(name, TestKind::statistical, ks.statistic, ks.p_value, c, threshold, e.cfg.seed,
                    params_label(e.cfg), detail.str());
}

std::string suffix(double s) {
    return "_s" + format_double(s);
}

}  // namespace

std::vector<TestRow> theorem1_marginal_test(const Ensemble& e, const LimitMarginals& lim) {
    if (e.records.size() < 2) throw InsufficientData("marginal test needs replicates");
    std::vector<TestRow> rows;
    for (std::size_t j = 0; j < lim.times.size(); ++j) {
        const double s = lim.times[j];
        const auto& target = lim.at_gamma_s[j];
        const auto cl = column(e, j, &ReplicateRecord::tau_contour_left);
        rows.push_back(ks_row("limit_contour_left" + suffix(s), cl, target, Criterion::p_above, 1e-3, e, s));
        rows.push_back(ks_row("limit_height_left" + suffix(s), column(e, j, &ReplicateRecord::tau_height_left),
                              target, Criterion::p_above, 1e-3, e, s));
        rows.push_back(ks_row("limit_contour_right" + suffix(s),
                              column(e, j, &ReplicateRecord::tau_contour_right), target, Criterion::p_above, 1e-3,
                              e, s));
        rows.push_back(ks_row("limit_height_right" + suffix(s), column(e, j, &ReplicateRecord::tau_height_right),
                              target, Criterion::p_above, 1e-3, e, s));
        rows.push_back(ks_row("limit_negative_control_no_time_change" + suffix(s), cl, lim.at_s[j],
                              Criterion::p_below, 1e-3, e, s));
    }
    return rows;
}

std::vector<TestRow> lemma34_marginal_test(const Ensemble& e, const LimitMarginals& lim) {
    if (e.records.size() < 2) throw InsufficientData("marginal test needs replicates");
    std::vector<TestRow> rows;
    for (std::size_t j = 0; j < lim.times.size(); ++j) {
        const double s = lim.times[j];
        const auto tl = column(e, j, &ReplicateRecord::tilde_contour_left);
        rows.push_back(ks_row("limit_unshrunk_contour_left" + suffix(s), tl, lim.at_s[j], Criterion::p_above, 1e-3, e,
                              s));
        rows.push_back(ks_row("limit_unshrunk_contour_right" + suffix(s),
                              column(e, j, &ReplicateRecord::tilde_contour_right), lim.at_s[j], Criterion::p_above,
                              1e-3, e, s));
        rows.push_back(ks_row("limit_shrinking_changes_law" + suffix(s),
                              column(e, j, &ReplicateRecord::tau_contour_left), tl, Criterion::p_below, 1e-3, e, s));
    }
    return rows;
}

std::vector<TestRow> ensemble_identity_rows(const Ensemble& e, const LimitMarginals& lim) {
    std::vector<TestRow> rows;
    const auto& names = identity_names();
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto bad = std::count_if(e.records.begin(), e.records.end(),
                                       [k](const ReplicateRecord& r) { return r.failed_identities & (1u << k); });
        rows.push_back(make_row("replicate_" + names[k], TestKind::exact, static_cast<double>(bad), 1.0,
                                Criterion::stat_at_most, 0.0, e.cfg.seed, params_label(e.cfg),
                                "failing replicates out of " + std::to_string(e.records.size())));
    }
    rows.push_back(make_row("limit_mass_above_cut", TestKind::statistical, lim.mass_above_cut, 1.0,
                            Criterion::stat_below, 0.005, lim.seed, params_label(e.cfg),
                            "fraction of limit paths exceeding x_cut before the last observation"));
    return rows;
}

}  // namespace rangelab
