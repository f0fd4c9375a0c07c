#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "disting/errors.hpp"

namespace disting {

using VertexId = int;

// A finite graph truncation stratified into spheres around a base vertex.
// Sphere index of a vertex equals its geodesic distance to the base; every
// edge joins vertices in the same or consecutive spheres.
struct LayeredGraph {
    VertexId base = 0;
    std::vector<std::vector<VertexId>> spheres;          // sorted ids per sphere
    std::vector<std::pair<VertexId, VertexId>> edges;    // u < v, sorted

    int radius() const { return static_cast<int>(spheres.size()) - 1; }
    std::size_t num_vertices() const;

    // Derived lookups, built by finalize().
    int sphere_of(VertexId v) const;
    const std::vector<VertexId>& neighbors(VertexId v) const;
    bool has_vertex(VertexId v) const;
    std::vector<VertexId> all_vertices() const;   // sorted

    // Validates all layering invariants (including sphere index == BFS
    // distance) and builds the adjacency structure. Throws Error on violation.
    void finalize();

private:
    std::vector<int> sphere_of_;                   // indexed by id, -1 = absent
    std::vector<std::vector<VertexId>> adj_;       // indexed by id, sorted
};

// Growth budget bound(n) = c * 2^((1-epsilon) * sqrt(n) / 2).
struct GrowthBudget {
    double epsilon = 0.5;    // in (0,1)
    double c = 1.0;          // positive

    double bound(int n) const;
};

struct SyntheticSpec {
    std::vector<int> sphere_sizes;                       // index 0..N
    std::vector<std::pair<VertexId, VertexId>> edges;    // ids assigned consecutively per sphere
};

struct FamilySpec {
    enum class Kind { Line, Ladder, Grid2d, RegularTree, Synthetic };
    Kind kind = Kind::Line;
    int tree_degree = 3;
    SyntheticSpec synthetic;

    // "line", "two-way-ladder", "grid2d", "regular-tree(3)"
    static FamilySpec parse(const std::string& text);
    std::string name() const;
};

// BFS stratification of the family truncated to the ball of the given radius
// around the family's canonical base vertex. Deterministic; ids of previously
// generated vertices are stable under increasing radius.
LayeredGraph generate(const FamilySpec& spec, int radius);

// Union of spheres 0..n.
std::vector<VertexId> ball(const LayeredGraph& g, int n);

struct GrowthCheckRow {
    int n;
    long long ball_size;
    double bound;
    bool ok;
};

struct GrowthCheckReport {
    std::vector<GrowthCheckRow> rows;
    bool all_ok = true;
    std::optional<int> first_failing_n;
};

GrowthCheckReport growth_check(const LayeredGraph& g, const GrowthBudget& budget);

// Smallest c making growth_check pass, i.e. max_n |B(n)| / 2^((1-eps)sqrt(n)/2).
double auto_fit_constant(const LayeredGraph& g, double epsilon);

// Numeric check that a sphere-size bound 2^((1-eps)sqrt(n)/2) implies the
// corresponding ball bound with eps/2: reports the smallest n0 such that
// sum_{k=1..n} 2^((1-eps)sqrt(k)/2) <= 2^((1-eps/2)sqrt(n)/2) for all
// n0 <= n <= n_max.
struct SphereToBallReport {
    double epsilon;
    int n_max;
    std::optional<int> threshold_n0;   // empty if the inequality never stabilizes in range
};

SphereToBallReport sphere_to_ball_diagnostic(const GrowthBudget& budget, int n_max);

} // namespace disting
