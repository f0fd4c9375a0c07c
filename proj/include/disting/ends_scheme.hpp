#pragma once

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "disting/layered_graph.hpp"
#include "disting/motion_engine.hpp"
#include "disting/sphere_scheme.hpp"

namespace disting {

// Rooted tree of boundary components: at each chosen level n_i the sphere S(n_i)
// is partitioned by the components of the graph minus the ball of radius n_i - 1.
struct ComponentNode {
    int level = 0;                     // index into ComponentTree::levels
    std::vector<VertexId> vertices;    // sorted; node set = component ∩ sphere
    int parent = -1;                   // node index at the previous level, -1 at level 0
};

struct ComponentTree {
    VertexId root = 0;
    std::vector<int> levels;                     // sphere indices, strictly increasing
    std::vector<ComponentNode> nodes;            // grouped by level, deterministic order
    std::vector<std::vector<int>> nodes_at_level;
    // Root-to-leaf chains, one per leaf; chains[j][i] is the node index at level i.
    std::vector<std::vector<int>> chains;
};

// Levels are the smallest sphere indices with consecutive gaps ceil(4/epsilon)+1
// that avoid `exclude` and never the outermost sphere. Throws Error(config) when
// fewer than two levels fit.
ComponentTree component_tree(const LayeredGraph& g, double epsilon,
                             const std::unordered_set<int>& exclude = {});

// Same construction at caller-chosen levels (strictly increasing, inside
// (0, radius)); the gap condition is the caller's responsibility here.
ComponentTree component_tree_at_levels(const LayeredGraph& g, std::vector<int> levels);

// S^chain(n): the intersection of sphere n with the component of the graph minus
// ball(n-1) that the chain's leaf lies in. Defined for 0 < n <= leaf level.
std::vector<VertexId> chain_sphere(const LayeredGraph& g, const ComponentTree& tree,
                                   int chain, int n);

// Elements permuting the node sets of some level nontrivially (movers) versus
// the rest (fixers). Requires every element to fix each level sphere setwise.
struct EndSplit {
    PermSet fixers;
    PermSet movers;
    std::vector<std::size_t> mover_indices;   // into the input set
};

EndSplit end_fixing_split(const PermSet& A, const ComponentTree& tree);

// A coloring supported on the union of level spheres breaking every mover,
// found by direct motion-engine search.
PartialColoring break_end_movers(const PermSet& movers, const ComponentTree& tree,
                                 const LayeredGraph& g, const SearchStrategy& strategy,
                                 SearchStats* stats = nullptr);

// Round-robin step-to-chain map over a finite horizon.
struct Schedule {
    int num_ends = 0;
    std::vector<int> f;
};

Schedule make_schedule(int num_ends, int horizon);

struct ChainGrowthRow {
    int chain = 0;
    double c_fit = 0.0;      // smallest constant making the chain bound hold
    bool ok = false;         // against the supplied constant, or trivially for auto
};

struct EndIterationRecord {
    int step = 0;
    int chain = 0;
    IterationRecord iteration;
};

struct Theorem9Report {
    std::string family;
    int radius = 0;
    double epsilon = 0.0;
    bool c_auto = false;
    double c_per_end = 0.0;              // supplied constant; per-chain fits below
    std::vector<ChainGrowthRow> chain_growth;
    std::uint64_t seed = 0;
    bool force = false;
    int margin = 1;
    std::size_t group_size = 0;
    std::size_t stabilizer_size = 0;
    bool trivially_distinguishable = false;
    long long fixroot_k0 = 0;
    std::vector<int> fixroot_spheres;
    SearchStats fixroot_stats;
    std::vector<int> levels;
    std::vector<long long> nodes_per_level;
    int num_chains = 0;
    std::size_t mover_count = 0;
    std::size_t fixer_count = 0;
    SearchStats end_break_stats;
    Schedule schedule;
    std::vector<EndIterationRecord> iterations;
    int m_final = 0;
    FinalVerification final_check;
};

struct Theorem9Result {
    PartialColoring coloring;
    Theorem9Report report;
    PermSet group;
    ComponentTree tree;
};

// Two phases: (1) fixroot with delta = epsilon/4 plus end-mover breaking on the
// component-tree levels; (2) round-robin per-chain sphere-block iterations on
// the chain's node sets, then final verification under the margin rule.
Theorem9Result theorem9_pipeline(const LayeredGraph& g, double epsilon,
                                 std::optional<double> c_per_end, const PipelineOptions& opts,
                                 const std::string& family_name = "",
                                 const std::optional<std::vector<int>>& levels = std::nullopt);

} // namespace disting
