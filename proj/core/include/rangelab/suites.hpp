#pragma once

#include "rangelab/results.hpp"
#include "rangelab/trees.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace rangelab {

/// Deliberate defects for mutation smoke tests of the verify driver.
enum class Fault {
    none,
    height_from_walk,  ///< the height-from-walk inversion counts one index too many
};

/// "none" or "height-off-by-one". Throws InvalidParams otherwise.
Fault parse_fault(std::string_view name);
std::string to_string(Fault f);

struct VerifyConfig {
    std::uint64_t seed = 2024;
    /// Multiplies every Monte Carlo sample size (floored at a small minimum).
    double scale = 1.0;
    /// Passed to the ensemble-based suites.
    std::size_t shards = 8;
    std::size_t workers = 0;
    Fault fault = Fault::none;

    void validate() const;
};

using HeightFromWalk = std::function<PathSeq(const PathSeq&)>;

/// Height-from-walk that counts j <= n instead of j < n.
PathSeq height_from_lukasiewicz_shifted(const PathSeq& v);

/// A group of rows computed together; `rows` lists the row names in order.
struct Suite {
    std::string name;
    std::vector<std::string> rows;
    std::function<std::vector<TestRow>(const VerifyConfig&)> run;
};

const std::vector<Suite>& registered_suites();

/// Total number of rows over all registered suites.
std::size_t registered_row_count();

/// Runs every suite, in registration order.
std::vector<TestRow> run_verify(const VerifyConfig& cfg);

/// Runs the suites whose name is listed.
std::vector<TestRow> run_suites(const VerifyConfig& cfg, const std::vector<std::string>& names);

// Encoding checks, exposed so unit tests can reuse them. Each returns the
// number of mismatches over the corpus.
std::size_t hl_mismatches(const std::vector<OrderedTree>& corpus, const HeightFromWalk& h_of_v);
std::size_t hc_mismatches(const std::vector<OrderedTree>& corpus);
std::size_t mirror_mismatches(const std::vector<OrderedTree>& corpus);
std::size_t spine_mismatches(const std::vector<SinTreeSlice>& corpus);

/// Per cut-identity violation counts, for every spine level n below the tip:
/// sigma_n = sup{k : H_k <= n} = #{u < u*_n}; 2 sigma_n - n = sup{s : C_s <= n};
/// the left contour agrees with the cut tree on [0, 2 sigma_n - n]; the right
/// contour is the reversed contour of the cut tree on [0, 2 sigma_n(mirror) - n].
struct CutViolations {
    std::size_t sigma = 0;
    std::size_t contour_sup = 0;
    std::size_t left = 0;
    std::size_t right = 0;
};

CutViolations cut_violations(const SinTreeSlice& s);
/// Number of slices failing each identity.
CutViolations cut_mismatches(const std::vector<SinTreeSlice>& corpus);

/// Slice whose spine runs from the root to v.
SinTreeSlice slice_to(const OrderedTree& t, std::size_t v);

}  // namespace rangelab
