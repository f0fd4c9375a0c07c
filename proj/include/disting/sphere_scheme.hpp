#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "disting/layered_graph.hpp"
#include "disting/motion_engine.hpp"
#include "disting/perm_group.hpp"

namespace disting {

// Parameters of one sphere-block iteration.
struct SchemeParams {
    double epsilon = 0.5;    // in (0,1)
    double c = 1.0;          // growth constant
    int m = 0;               // last processed sphere index
    double c_tilde = 1.0;    // c * 2^((1-epsilon) sqrt(m) / 2)
    long long k = 0;
    long long k0 = 0;        // sparsity threshold from the fixroot step
    double delta = 0.25;     // fixroot sparsity
};

// c_tilde = c * 2^((1-epsilon) * sqrt(m) / 2).
double effective_constant(double c, int m, double epsilon);

// Smallest k > k0 satisfying, simultaneously,
//   log2(c_tilde) < eps*sqrt(k)/8,
//   log2(k)       < eps*sqrt(k)/8,
//   4*sqrt(k)     < (1/2)*eps*(1-eps/2)*k,
//   c_tilde*sqrt(k)/2 < (eps/4)*k,
// found by linear scan. Throws Error(infeasible) past the ceiling, naming the
// inequality that failed last.
long long choose_k(double c_tilde, double epsilon, long long k0,
                   long long ceiling = (1ll << 24));

// The uncolored spheres of (m, m+k] split into r-1 blocks of kappa spheres
// plus a remainder block.
struct BlockPlan {
    std::vector<int> uncolored;                      // sphere indices, ascending
    long long kappa = 0;
    int r = 0;
    std::vector<std::vector<int>> block_spheres;     // r entries
    std::vector<std::vector<VertexId>> blocks;       // r entries, sorted vertex sets
};

BlockPlan compute_blocks(const LayeredGraph& g, const SchemeParams& params,
                         const std::unordered_set<int>& colored);

// Classification by restricted motion thresholds: class i < r holds the
// elements with motion <= 2^i on some uncolored sphere above block i that
// escaped every smaller class; class r holds the rest. Elements violating the
// per-block motion invariant (a truncation boundary artifact) are excluded
// and reported.
struct AutPartition {
    std::vector<std::vector<std::size_t>> classes;   // r entries, indices into A
    std::vector<std::size_t> excluded;
};

AutPartition classify(const PermSet& A, const BlockPlan& plan, const LayeredGraph& g);

struct BlockBoundsRow {
    int class_index = 0;              // 1-based
    long long class_size = 0;
    long long restricted_size = 0;    // |A_i restricted to P_i|, deduplicated
    double log2_restricted = 0.0;
    double analytic_log2_bound = 0.0;
    long long motion = 0;             // m(A_i)|P_i
    double analytic_motion_bound = 0.0;
    double two_log_size = 0.0;
    bool lemma5_ok = false;
    bool skipped = false;             // empty class
};

struct BlockBoundsReport {
    std::vector<BlockBoundsRow> rows;
    bool all_nonempty_ok = true;
};

BlockBoundsReport verify_block_bounds(const PermSet& A, const AutPartition& partition,
                                      const BlockPlan& plan, const SchemeParams& params);

// Sparse coloring breaking every automorphism that moves the base vertex.
// Stand-in construction: every ceil(2/delta)-th sphere is allocated as
// support and the motion engine breaks A_moving on their union.
struct FixrootResult {
    PartialColoring coloring;
    std::vector<int> colored_spheres;
    double delta = 0.0;
    long long k0 = 0;
    SearchStats stats;
};

FixrootResult fixroot(const LayeredGraph& g, const PermSet& A_moving, double delta,
                      const SearchStrategy& strategy);

struct PipelineOptions {
    std::uint64_t seed = 0;
    bool force = false;
    int margin = 1;
    std::size_t group_cap = 100000;
    long long choose_k_ceiling = (1ll << 24);
    int exhaustive_limit = 20;
    long long max_tries = 10000;
    // Supplied layered action: used instead of enumerating automorphisms, for
    // synthetic instances whose action is designed rather than derived.
    std::optional<PermSet> target;
};

struct IterationRecord {
    int m = 0;
    double c_tilde = 0.0;
    long long k = 0;
    long long kappa = 0;
    int r = 0;
    long long uncolored_count = 0;
    long long target_count = 0;
    std::vector<long long> class_sizes;
    BlockBoundsReport bounds;
    std::vector<SearchStats> searches;       // one per nonempty class broken
    std::vector<std::size_t> excluded;
};

struct FinalVerification {
    long long checked = 0;
    std::vector<std::size_t> survivors;      // indices into the enumerated set
};

struct PipelineReport {
    std::string family;
    int radius = 0;
    double epsilon = 0.0;
    double c = 0.0;
    bool c_auto = false;
    std::uint64_t seed = 0;
    bool force = false;
    int margin = 1;
    std::size_t group_size = 0;
    std::size_t stabilizer_size = 0;
    bool trivially_distinguishable = false;
    long long fixroot_k0 = 0;
    std::vector<int> fixroot_spheres;
    SearchStats fixroot_stats;
    std::vector<IterationRecord> iterations;
    int m_final = 0;
    FinalVerification final_check;
};

struct PipelineResult {
    PartialColoring coloring;
    PipelineReport report;
    // The enumerated (or supplied) automorphism set the run verified against.
    PermSet group;
};

// The full sphere-block scheme: fixroot with delta = epsilon/2, then iterated
// block breaking until the truncation radius is exhausted, then verification
// of every nontrivial element moving a vertex within the processed range.
PipelineResult run_pipeline(const LayeredGraph& g, double epsilon, std::optional<double> c,
                            const PipelineOptions& opts, const std::string& family_name = "");

} // namespace disting
