#include "rangelab/suites.hpp"

#include "rangelab/analysis.hpp"
#include "rangelab/ensemble.hpp"
#include "rangelab/errors.hpp"
#include "rangelab/marks.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/samplers.hpp"
#include "rangelab/stats.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rangelab {

Fault parse_fault(std::string_view name) {
    if (name.empty() || name == "none") return Fault::none;
    if (name == "height-off-by-one") return Fault::height_from_walk;
    throw InvalidParams("unknown fault '" + std::string(name) + "' (expected none or height-off-by-one)");
}

std::string to_string(Fault f) {
    return f == Fault::none ? "none" : "height-off-by-one";
}

void VerifyConfig::validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidParams("scale must be positive");
    if (shards < 1) throw InvalidParams("shards must be positive");
}

PathSeq height_from_lukasiewicz_shifted(const PathSeq& v) {
    if (v.kind != PathKind::lukasiewicz) throw MalformedPath("expected a Lukasiewicz path");
    const auto& x = v.values;
    PathSeq h{PathKind::height, {}};
    std::vector<std::size_t> records;
    for (std::size_t n = 0; n + 1 < x.size(); ++n) {
        while (!records.empty() && x[records.back()] > x[n]) records.pop_back();
        records.push_back(n);
        h.values.push_back(static_cast<std::int64_t>(records.size()));
    }
    return h;
}

SinTreeSlice slice_to(const OrderedTree& t, std::size_t v) {
    const auto parent = t.parents();
    SinTreeSlice s{t, {}};
    for (auto cur = v; cur != kNoVertex; cur = parent[cur]) s.spine.push_back(cur);
    std::reverse(s.spine.begin(), s.spine.end());
    return s;
}

std::size_t hl_mismatches(const std::vector<OrderedTree>& corpus, const HeightFromWalk& h_of_v) {
    std::size_t bad = 0;
    for (const auto& t : corpus) bad += h_of_v(lukasiewicz_path(t)) != height_process(t);
    return bad;
}

std::size_t hc_mismatches(const std::vector<OrderedTree>& corpus) {
    std::size_t bad = 0;
    for (const auto& t : corpus) bad += contour_from_height(height_process(t), t.size()) != contour_direct(t);
    return bad;
}

std::size_t mirror_mismatches(const std::vector<OrderedTree>& corpus) {
    std::size_t bad = 0;
    for (const auto& t : corpus) {
        std::vector<std::size_t> map;
        const auto m = mirror(t, map);
        bool ok = mirror(m) == t && m.size() == t.size();
        const auto d = t.depths();
        const auto dm = m.depths();
        for (std::size_t v = 0; ok && v < t.size(); ++v) ok = d[v] == dm[map[v]];
        // clockwise tour of the mirror is the anticlockwise tour of t
        auto c = contour_direct(t).values;
        std::reverse(c.begin(), c.end());
        ok = ok && contour_direct(m).values == c;
        bad += !ok;
    }
    return bad;
}

std::size_t spine_mismatches(const std::vector<SinTreeSlice>& corpus) {
    std::size_t bad = 0;
    for (const auto& s : corpus) bad += count_spine_identity_violations(s, spine_decomposition(s)) != 0;
    return bad;
}

CutViolations cut_violations(const SinTreeSlice& s) {
    CutViolations out;
    const auto N = s.spine_height();
    if (N == 0) return out;
    const auto ms = mirror(s);
    const auto c = contour_direct(s.tree).values;
    const auto cm = contour_direct(ms.tree).values;
    const auto h = height_process(s.tree);
    const auto hm = height_process(ms.tree);
    // the slice agrees with the sin-tree up to u*_N
    const PathSeq hp{PathKind::height, {h.values.begin(), h.values.begin() + static_cast<std::ptrdiff_t>(s.spine[N]) + 1}};
    const PathSeq hmp{PathKind::height,
                      {hm.values.begin(), hm.values.begin() + static_cast<std::ptrdiff_t>(ms.spine[N]) + 1}};
    const PathSeq cp{PathKind::contour, c};
    const PathSeq cmp{PathKind::contour, cm};
    const auto nn = static_cast<std::int64_t>(N);
    const auto lim = static_cast<std::size_t>(2 * static_cast<std::int64_t>(s.spine[N]) - nn);
    const auto lim_m = static_cast<std::size_t>(2 * static_cast<std::int64_t>(ms.spine[N]) - nn);
    for (std::int64_t n = 0; n < nn; ++n) {
        const auto k = static_cast<std::size_t>(n);
        // sigma_n counts the vertices before u*_n
        const auto sig = s.spine[k];
        const auto sigm = ms.spine[k];
        out.sigma += sigma_n(hp, n) != sig;
        out.sigma += sigma_n(hmp, n) != sigm;
        const auto end = static_cast<std::size_t>(2 * static_cast<std::int64_t>(sig) - n);
        const auto end_m = static_cast<std::size_t>(2 * static_cast<std::int64_t>(sigm) - n);
        out.contour_sup += contour_last_time_at_or_below(cp, n, lim) != end;
        out.contour_sup += contour_last_time_at_or_below(cmp, n, lim_m) != end_m;
        const auto cut = truncate_at_spine(s, k);
        const auto cc = contour_direct(cut.tree).values;
        const auto last = 2 * (cut.tree.size() - 1);
        for (std::size_t t = 0; t <= end; ++t) out.left += c[t] != cc[t];
        for (std::size_t t = 0; t <= end_m; ++t) out.right += cm[t] != cc[last - t];
    }
    return out;
}

CutViolations cut_mismatches(const std::vector<SinTreeSlice>& corpus) {
    CutViolations total;
    for (const auto& s : corpus) {
        const auto v = cut_violations(s);
        total.sigma += v.sigma != 0;
        total.contour_sup += v.contour_sup != 0;
        total.left += v.left != 0;
        total.right += v.right != 0;
    }
    return total;
}

namespace {

std::uint64_t name_tag(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : name) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t scaled(const VerifyConfig& cfg, double n, std::uint64_t floor = 200) {
    return std::max<std::uint64_t>(floor, static_cast<std::uint64_t>(std::llround(n * cfg.scale)));
}

std::string fmt(double x) {
    return format_double(x);
}

TestRow exact_count(std::string name, std::size_t bad, std::uint64_t seed, std::string params, std::string detail) {
    return make_row(std::move(name), TestKind::exact, static_cast<double>(bad), 1.0, Criterion::stat_at_most, 0.0, seed,
                    std::move(params), std::move(detail));
}

TestRow sigma_row(std::string name, double sigmas, std::uint64_t seed, std::string params, std::string detail) {
    return make_row(std::move(name), TestKind::statistical, sigmas, std::numeric_limits<double>::quiet_NaN(),
                    Criterion::stat_at_most, 3.0, seed, std::move(params), std::move(detail));
}

double sigmas_of(double a, double b, double se) {
    const double diff = std::abs(a - b);
    if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / se;
}

// ---------------------------------------------------------------------------
// encodings

struct EncodingCorpus {
    std::vector<OrderedTree> trees;
    std::vector<SinTreeSlice> slices;
    std::size_t exhaustive = 0;
    std::size_t random = 0;
};

EncodingCorpus encoding_corpus(const VerifyConfig& cfg, std::uint64_t seed) {
    EncodingCorpus c;
    for (std::size_t n = 1; n <= 7; ++n) {
        for (auto& t : enumerate_trees(n)) c.trees.push_back(std::move(t));
    }
    c.exhaustive = c.trees.size();
    for (std::size_t i = 0; i < c.exhaustive; ++i) {
        for (std::size_t v = 1; v < c.trees[i].size(); ++v) c.slices.push_back(slice_to(c.trees[i], v));
    }
    const auto p = ModelParams::make(0.05, {0.5, 0.5});
    auto rng = make_stream(seed, 0);
    c.random = scaled(cfg, 1e4);
    for (std::uint64_t i = 0; i < c.random; ++i) {
        auto t = sample_gw(p, rng);
        if (t.height() > 0) {
            const auto d = t.depths();
            const auto deepest = static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
            c.slices.push_back(slice_to(t, deepest));
        }
        c.trees.push_back(std::move(t));
    }
    const auto n_gwi = scaled(cfg, 1e3);
    for (std::uint64_t i = 0; i < n_gwi; ++i) {
        c.slices.push_back(sample_gwi(p, 6, i % 2 ? Dispatch::uniform : Dispatch::left, rng));
    }
    return c;
}

std::vector<TestRow> suite_encoding(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("encoding"));
    const auto c = encoding_corpus(cfg, seed);
    const HeightFromWalk h_of_v = cfg.fault == Fault::height_from_walk
                                      ? HeightFromWalk(height_from_lukasiewicz_shifted)
                                      : HeightFromWalk([](const PathSeq& v) { return height_from_lukasiewicz(v); });
    std::ostringstream ps;
    ps << "trees<=7=" << c.exhaustive << ";gw=" << c.random << ";epsilon=0.05;slices=" << c.slices.size();
    const auto params = ps.str();
    auto per = [&](std::size_t bad, std::size_t n) { return std::to_string(bad) + " of " + std::to_string(n) + " fail"; };
    std::vector<TestRow> rows;
    const auto hl = hl_mismatches(c.trees, h_of_v);
    rows.push_back(exact_count("encoding_hl", hl, seed, params, per(hl, c.trees.size())));
    const auto hc = hc_mismatches(c.trees);
    rows.push_back(exact_count("encoding_hc", hc, seed, params, per(hc, c.trees.size())));
    const auto mir = mirror_mismatches(c.trees);
    rows.push_back(exact_count("encoding_mirror", mir, seed, params, per(mir, c.trees.size())));
    const auto spd = spine_mismatches(c.slices);
    rows.push_back(exact_count("encoding_spine_decomposition", spd, seed, params, per(spd, c.slices.size())));
    const auto cut = cut_mismatches(c.slices);
    rows.push_back(exact_count("encoding_cut_sigma", cut.sigma, seed, params, per(cut.sigma, c.slices.size())));
    rows.push_back(exact_count("encoding_cut_contour_sup", cut.contour_sup, seed, params,
                               per(cut.contour_sup, c.slices.size())));
    rows.push_back(exact_count("encoding_cut_left", cut.left, seed, params, per(cut.left, c.slices.size())));
    rows.push_back(exact_count("encoding_cut_right", cut.right, seed, params, per(cut.right, c.slices.size())));
    return rows;
}

std::vector<TestRow> suite_forest(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("forest"));
    auto rng = make_stream(seed, 0);
    const auto p = ModelParams::make(0.05, {0.5, 0.5});
    const auto n = scaled(cfg, 1e3);
    std::uniform_int_distribution<std::size_t> count(1, 5);
    std::size_t bad = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        Forest f(count(rng));
        for (auto& t : f) t = sample_gw(p, rng);
        std::vector<std::int64_t> joined;
        for (const auto& t : f) {
            const auto h = height_process(t).values;
            joined.insert(joined.end(), h.begin(), h.end());
        }
        const auto h = height_process(f);
        bool ok = h.values == joined;
        if (cfg.fault == Fault::height_from_walk) {
            ok = ok && height_from_lukasiewicz_shifted(lukasiewicz_path(f)) == h;
        } else {
            ok = ok && height_from_lukasiewicz(lukasiewicz_path(f)) == h;
        }
        bad += !ok;
    }
    return {exact_count("forest_concatenation", bad, seed, "forests=" + std::to_string(n) + ";trees=1..5",
                        std::to_string(bad) + " of " + std::to_string(n) + " fail")};
}

// ---------------------------------------------------------------------------
// generating functions

std::vector<TestRow> suite_genfun_closed(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("genfun_closed"));
    auto rng = make_stream(seed, 0);
    const std::vector<std::vector<double>> weight_sets{{0.5, 0.5}, {0.2, 0.3, 0.5}};
    const auto n_words = scaled(cfg, 1e3, 50);
    double worst = 0;
    for (const auto& w : weight_sets) {
        const auto p = ModelParams::make(0.1, w);
        std::uniform_int_distribution<std::size_t> len(1, 30);
        std::uniform_int_distribution<std::uint32_t> letter(1, static_cast<std::uint32_t>(w.size()));
        for (std::uint64_t i = 0; i < n_words; ++i) {
            Word v(len(rng));
            for (auto& m : v) m = letter(rng);
            for (int k = 0; k <= 10; ++k) {
                const double x = k / 10.0;
                worst = std::max(worst, std::abs(f_v_compose(p, v, x) - f_v_closed(p, v, x)));
            }
        }
    }
    return {make_row("genfun_closed_form", TestKind::exact, worst, 1.0, Criterion::stat_below, 1e-12, seed,
                     "epsilon=0.1;weights=0.5/0.5|0.2/0.3/0.5;words=" + std::to_string(n_words) + ";len<=30;x=0:0.1:1",
                     "max abs difference")};
}

std::vector<TestRow> suite_genfun_conditional(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("genfun_conditional"));
    auto rng = make_stream(seed, 0);
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    const auto n = scaled(cfg, 1e5, 2000);
    const auto classes = conditional_z_pgf_check(p, {1}, {1}, 0.5, 1, n, rng);
    double worst = 0;
    std::size_t seen = 0;
    std::ostringstream detail;
    for (const auto& c : classes) {
        if (c.z != 1 && c.z != 2) continue;
        ++seen;
        const double sig = sigmas_of(c.empirical, c.analytic, c.std_error);
        worst = std::max(worst, sig);
        detail << "z=" << c.z << ":" << fmt(c.empirical) << " vs " << fmt(c.analytic) << " (" << fmt(sig) << " sd) ";
    }
    if (seen < 2) worst = std::numeric_limits<double>::infinity();
    return {sigma_row("genfun_conditional_pgf", worst, seed,
                      "epsilon=0.1;weights=0.5/0.5;v=1;w=1;x=0.5;l=1;n=" + std::to_string(n), detail.str())};
}

std::vector<TestRow> suite_gwi_pgf(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("gwi_pgf"));
    auto rng = make_stream(seed, 0);
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    const auto n = scaled(cfg, 1e5, 2000);
    const auto r = gwi_population_pgf_check(p, 2, 3, 0.5, n, rng);
    return {sigma_row("gwi_population_pgf", sigmas_of(r.empirical, r.analytic, r.std_error), seed,
                      "epsilon=0.1;l=2;generation=3;x=0.5;n=" + std::to_string(n),
                      fmt(r.empirical) + " vs " + fmt(r.analytic))};
}

std::vector<TestRow> suite_fn(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, 0);
    double worst = 0;
    for (double eps : {0.05, 0.1, 0.2}) {
        const auto p = ModelParams::make(eps, {0.5, 0.5});
        for (std::int64_t n = 0; n <= 200; n += 7) {
            for (int k = 0; k <= 10; ++k) {
                const double x = k / 10.0;
                worst = std::max(worst, std::abs(f_n_closed(p, n, x) - f_n_iterate(p, n, x)));
            }
        }
    }
    const double power = f_n_power(1e-4, 0.5);
    const double limit = f_n_power_limit(0.5);
    return {make_row("fn_closed_vs_iterate", TestKind::exact, worst, 1.0, Criterion::stat_below, 1e-12, seed,
                     "epsilon=0.05/0.1/0.2;n=0:7:200;x=0:0.1:1", "max abs difference"),
            make_row("fn_power_limit", TestKind::exact, std::abs(power - limit), 1.0, Criterion::stat_below, 1e-2, seed,
                     "epsilon=1e-4;delta=0.5", fmt(power) + " vs " + fmt(limit))};
}

// ---------------------------------------------------------------------------
// walks

std::vector<TestRow> suite_escape(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, 0);
    double worst_escape = 0, worst_up = 0;
    std::ostringstream d1;
    for (double eps : {0.05, 0.1, 0.2}) {
        const auto p = ModelParams::make(eps, {0.5, 0.5});
        // the survival tail decays like (2 sqrt(ud))^horizon
        const auto horizon = static_cast<std::size_t>(std::ceil(45.0 / -std::log(2 * std::sqrt(p.up() * p.down()))));
        const double dp = escape_probability_dp(p, horizon);
        worst_escape = std::max(worst_escape, std::abs(dp - escape_probability(p)));
        d1 << "eps=" << fmt(eps) << ":" << fmt(dp) << " ";
        const auto up = conditioned_up_probability_dp(p, horizon, 50);
        for (std::int64_t n = 0; n <= 50; ++n) {
            worst_up = std::max(worst_up, std::abs(up[static_cast<std::size_t>(n)] - conditioned_up_probability(n, p)));
        }
    }
    return {make_row("escape_probability_dp", TestKind::exact, worst_escape, 1.0, Criterion::stat_below, 1e-8, seed,
                     "epsilon=0.05/0.1/0.2", d1.str()),
            make_row("conditioned_transition_dp", TestKind::exact, worst_up, 1.0, Criterion::stat_below, 1e-10, seed,
                     "epsilon=0.05/0.1/0.2;heights=0..50", "max abs difference")};
}

std::vector<TestRow> suite_track(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("track"));
    const auto& names = identity_names();
    std::vector<std::size_t> failures(names.size(), 0);
    std::uint64_t total = 0;
    for (double eps : {0.1, 0.05}) {
        EnsembleConfig ec;
        ec.params = ModelParams::make(eps, {0.5, 0.5});
        ec.n_replicates = scaled(cfg, 1e3, 50);
        ec.seed = derive_seed(seed, static_cast<std::uint64_t>(std::llround(eps * 1000)));
        ec.shards = cfg.shards;
        ec.workers = cfg.workers;
        const auto e = simulate_ensemble(ec);
        total += e.records.size();
        for (const auto& r : e.records) {
            for (std::size_t k = 0; k < names.size(); ++k) failures[k] += (r.failed_identities >> k) & 1u;
        }
    }
    std::vector<TestRow> rows;
    for (std::size_t k = 0; k < names.size(); ++k) {
        rows.push_back(exact_count("track_" + names[k], failures[k], seed,
                                   "epsilon=0.1/0.05;weights=0.5/0.5;x=12;walks=" + std::to_string(total),
                                   std::to_string(failures[k]) + " of " + std::to_string(total) + " replicates fail"));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// laws

std::vector<TestRow> law_rows(const std::string& base, const LawCheck& c, std::uint64_t seed,
                              const std::string& params) {
    auto row = [&](const std::string& suffix, const ChiSquareResult& r, Criterion crit) {
        return make_row(base + suffix, TestKind::statistical, r.statistic, r.p_value, crit, 0.01, seed, params,
                        "dof=" + fmt(r.dof) + ";classes=" + std::to_string(r.classes));
    };
    return {row("", c.test, Criterion::p_above), row("_aa", c.aa, Criterion::p_above),
            row("_ab_epsilon", c.ab, Criterion::p_below), row("_ab_dispatch", c.ab_dispatch, Criterion::p_below)};
}

std::vector<TestRow> suite_law_decoded(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("law_decoded"));
    const auto n = scaled(cfg, 1e4);
    const auto c = law_check_lemma31(ModelParams::make(0.1, {0.5, 0.5}), 0.12, n, seed);
    return law_rows("law_decoded", c, seed, "epsilon=0.1;perturbed=0.12;weights=0.5/0.5;n=" + std::to_string(n));
}

std::vector<TestRow> suite_law_shuffle(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("law_shuffle"));
    const auto n = scaled(cfg, 1e4);
    const auto c = law_check_shuffle(ModelParams::make(0.1, {0.5, 0.5}), 0.12, n, seed);
    return law_rows("law_shuffle", c, seed, "epsilon=0.1;perturbed=0.12;weights=0.5/0.5;n=" + std::to_string(n));
}

std::vector<TestRow> suite_law_marks(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("law_mark_shuffle"));
    const auto n = scaled(cfg, 1e4);
    const auto r = law_check_mark_shuffle(ModelParams::make(0.1, {0.3, 0.7}), n, seed);
    return {make_row("law_mark_shuffle", TestKind::statistical, r.statistic, r.p_value, Criterion::p_above, 0.01, seed,
                     "epsilon=0.1;weights=0.3/0.7;n=" + std::to_string(n),
                     "dof=" + fmt(r.dof) + ";classes=" + std::to_string(r.classes))};
}

// ---------------------------------------------------------------------------
// size-biased trees

std::vector<TestRow> suite_sizebias(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("sizebias"));
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    const auto n = scaled(cfg, 1e5, 2000);
    const std::size_t l = 2;
    struct Item {
        std::string name;
        SizeBiasFunctional g;
        std::size_t k;
    };
    const std::vector<Item> items{{"sizebias_height0", SizeBiasFunctional::height_equals, 0},
                                  {"sizebias_height1", SizeBiasFunctional::height_equals, 1},
                                  {"sizebias_height3", SizeBiasFunctional::height_equals, 3},
                                  {"sizebias_cut_size5", SizeBiasFunctional::cut_size_at_most, 5}};
    std::vector<TestRow> rows;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto rng = make_stream(seed, i);
        const auto r = sizebias_identity_check(p, l, items[i].g, items[i].k, n, rng);
        const auto params = "epsilon=0.1;l=2;k=" + std::to_string(items[i].k) + ";n=" + std::to_string(n);
        const auto detail = fmt(r.lhs) + "+-" + fmt(r.lhs_se) + " vs " + fmt(r.rhs) + "+-" + fmt(r.rhs_se);
        if (items[i].k == 0 && items[i].g == SizeBiasFunctional::height_equals) {
            // the root term: both sides equal l on every sample
            rows.push_back(make_row(items[i].name, TestKind::exact, std::abs(r.lhs - r.rhs), 1.0,
                                    Criterion::stat_at_most, 0.0, seed, params, detail));
        } else {
            rows.push_back(sigma_row(items[i].name, r.sigmas(), seed, params, detail));
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// gamma

std::vector<TestRow> suite_gamma(const VerifyConfig& cfg) {
    const auto seed = derive_seed(cfg.seed, name_tag("gamma"));
    std::vector<TestRow> rows;
    const auto n_mc = scaled(cfg, 1e4);
    for (std::size_t b : {2u, 5u}) {
        auto rng = make_stream(seed, b);
        const auto g = inv_gamma_mc(uniform_weights(b), n_mc, 1e-9, rng);
        const double target = 1.0 - 1.0 / static_cast<double>(b);
        const double allowance = std::max(3 * g.std_error, g.truncation_bound);
        rows.push_back(make_row("gamma_mc_b" + std::to_string(b), TestKind::statistical,
                                std::abs(g.value - target) / allowance, std::numeric_limits<double>::quiet_NaN(),
                                Criterion::stat_at_most, 1.0, seed,
                                "b=" + std::to_string(b) + ";tol=1e-9;n=" + std::to_string(n_mc),
                                fmt(g.value) + " vs " + fmt(target) + ";allowance=" + fmt(allowance)));
    }
    const std::vector<double> grid{0.1, 0.05, 0.02, 0.01};
    std::vector<double> gaps;
    std::ostringstream series;
    for (double eps : grid) {
        const auto g = inv_gamma_eps_uniform(2, eps);
        gaps.push_back(std::abs(g.value - 0.5));
        series << "eps=" << fmt(eps) << ":" << fmt(g.value) << " ";
    }
    std::size_t non_decreasing = 0;
    for (std::size_t i = 1; i < gaps.size(); ++i) non_decreasing += !(gaps[i] < gaps[i - 1]);
    rows.push_back(exact_count("gamma_eps_gap_decreasing", non_decreasing, seed, "b=2;epsilon=0.1/0.05/0.02/0.01",
                               series.str()));
    rows.push_back(make_row("gamma_eps_gap_at_0.01", TestKind::exact, gaps.back(), 1.0, Criterion::stat_below, 0.05,
                            seed, "b=2;epsilon=0.01", "|1/gamma_eps - 1/2|"));
    const auto n_trees = scaled(cfg, 1e5, 2000);
    auto rng = make_stream(seed, 100);
    const auto p = ModelParams::make(0.1, {0.5, 0.5});
    const auto emp = distinct_ratio_estimate(p, n_trees, rng);
    const auto exact = inv_gamma_eps_uniform(2, 0.1);
    rows.push_back(sigma_row("gamma_eps_vs_distinct_ratio", sigmas_of(emp.value, exact.value, emp.std_error), seed,
                             "b=2;epsilon=0.1;trees=" + std::to_string(n_trees),
                             fmt(emp.value) + "+-" + fmt(emp.std_error) + " vs " + fmt(exact.value)));
    return rows;
}

// ---------------------------------------------------------------------------
// the asymmetry example

std::vector<TestRow> suite_event(const VerifyConfig& cfg) {
    using boost::multiprecision::cpp_rational;
    const auto seed = derive_seed(cfg.seed, name_tag("event_A"));
    std::vector<TestRow> rows;
    const auto exact = example_event_probabilities<cpp_rational>(cpp_rational(3, 10), cpp_rational(1, 10));
    const bool rational_ok = exact.first == cpp_rational(7, 108);
    rows.push_back(exact_count("event_A_exact_rational", rational_ok ? 0 : 1, seed, "a=3/10;epsilon=1/10",
                               "p_left=" + exact.first.str() + ";p_right=" + exact.second.str()));
    const auto closed = example_event_probabilities<double>(0.3, 0.1);
    const auto n = scaled(cfg, 1e5, 2000);
    auto rng = make_stream(seed, 0);
    const auto mc = event_A_frequency(ModelParams::make(0.1, {0.3, 0.7}), n, 1e-9, rng);
    auto mc_row = [&](const std::string& name, double freq, double se, double target) {
        const double allowance = 3 * se + mc.truncation_bound;
        return make_row(name, TestKind::statistical, std::abs(freq - target) / allowance,
                        std::numeric_limits<double>::quiet_NaN(), Criterion::stat_at_most, 1.0, seed,
                        "a=0.3;epsilon=0.1;n=" + std::to_string(n),
                        fmt(freq) + "+-" + fmt(se) + " vs " + fmt(target) + ";allowance=" + fmt(allowance));
    };
    rows.push_back(mc_row("event_A_mc_left", mc.p_left, mc.se_left, closed.first));
    rows.push_back(mc_row("event_A_mc_right", mc.p_right, mc.se_right, closed.second));
    rows.push_back(exact_count("event_A_asymmetry", closed.first != closed.second ? 0 : 1, seed, "a=0.3;epsilon=0.1",
                               fmt(closed.first) + " vs " + fmt(closed.second)));
    const auto half = example_event_probabilities<double>(0.5, 0.1);
    rows.push_back(make_row("event_A_symmetric_at_half", TestKind::exact, std::abs(half.first - half.second), 1.0,
                            Criterion::stat_below, 1e-12, seed, "a=0.5;epsilon=0.1",
                            fmt(half.first) + " vs " + fmt(half.second)));
    return rows;
}

std::vector<std::string> law_names(const std::string& base) {
    return {base, base + "_aa", base + "_ab_epsilon", base + "_ab_dispatch"};
}

std::vector<std::string> track_names() {
    std::vector<std::string> out;
    for (const auto& n : identity_names()) out.push_back("track_" + n);
    return out;
}

}  // namespace

const std::vector<Suite>& registered_suites() {
    static const std::vector<Suite> suites{
        {"encoding",
         {"encoding_hl", "encoding_hc", "encoding_mirror", "encoding_spine_decomposition", "encoding_cut_sigma",
          "encoding_cut_contour_sup", "encoding_cut_left", "encoding_cut_right"},
         suite_encoding},
        {"forest", {"forest_concatenation"}, suite_forest},
        {"genfun_closed", {"genfun_closed_form"}, suite_genfun_closed},
        {"genfun_conditional", {"genfun_conditional_pgf"}, suite_genfun_conditional},
        {"gwi_pgf", {"gwi_population_pgf"}, suite_gwi_pgf},
        {"fn", {"fn_closed_vs_iterate", "fn_power_limit"}, suite_fn},
        {"escape", {"escape_probability_dp", "conditioned_transition_dp"}, suite_escape},
        {"track", track_names(), suite_track},
        {"law_decoded", law_names("law_decoded"), suite_law_decoded},
        {"law_shuffle", law_names("law_shuffle"), suite_law_shuffle},
        {"law_mark_shuffle", {"law_mark_shuffle"}, suite_law_marks},
        {"sizebias", {"sizebias_height0", "sizebias_height1", "sizebias_height3", "sizebias_cut_size5"}, suite_sizebias},
        {"gamma",
         {"gamma_mc_b2", "gamma_mc_b5", "gamma_eps_gap_decreasing", "gamma_eps_gap_at_0.01",
          "gamma_eps_vs_distinct_ratio"},
         suite_gamma},
        {"event_A",
         {"event_A_exact_rational", "event_A_mc_left", "event_A_mc_right", "event_A_asymmetry",
          "event_A_symmetric_at_half"},
         suite_event},
    };
    return suites;
}

std::size_t registered_row_count() {
    std::size_t n = 0;
    for (const auto& s : registered_suites()) n += s.rows.size();
    return n;
}

std::vector<TestRow> run_suites(const VerifyConfig& cfg, const std::vector<std::string>& names) {
    cfg.validate();
    std::vector<TestRow> out;
    for (const auto& s : registered_suites()) {
        if (std::find(names.begin(), names.end(), s.name) == names.end()) continue;
        auto rows = s.run(cfg);
        out.insert(out.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    }
    return out;
}

std::vector<TestRow> run_verify(const VerifyConfig& cfg) {
    std::vector<std::string> names;
    for (const auto& s : registered_suites()) names.push_back(s.name);
    return run_suites(cfg, names);
}

}  // namespace rangelab
