#pragma once

#include <optional>
#include <string>
#include <vector>

#include "disting/layered_graph.hpp"
#include "disting/permutation.hpp"

namespace disting {

// Full automorphism group of the finite graph, enumerated explicitly by
// backtracking over candidate images within iterated-degree refinement
// classes. The element list is deterministic and sorted. Throws
// Error(cap_exceeded) when more than `cap` elements exist.
PermSet automorphisms(const LayeredGraph& g, std::size_t cap = 100000);

// Subset of A fixing v pointwise.
PermSet stabilizer(const PermSet& A, VertexId v);

// Restrictions of all elements to S, duplicates removed. Throws unless every
// element fixes S setwise.
PermSet restrict_set(const PermSet& A, const std::vector<VertexId>& S);

struct MotionReport {
    std::vector<long long> element_motion;                      // per element of A
    std::vector<std::vector<long long>> element_sphere_motion;  // [element][sphere]
    std::optional<long long> set_motion;                        // nullopt = infinite (A empty)
    std::optional<long long> restricted_set_motion;             // over the requested support
};

MotionReport motion_report(const PermSet& A, const LayeredGraph& g,
                           const std::vector<VertexId>& support);

// Checks the structural properties of base-fixing automorphisms at truncation
// scale: (1) every sphere setwise fixed, (2) nonzero restricted motion
// propagates to every higher sphere below the boundary margin, (3) two
// elements agree on sphere i iff they agree on the ball of radius i, for
// i <= radius - margin. Violations are report entries, not errors.
struct Lemma4Report {
    struct SphereFixViolation { std::size_t element; int sphere; };
    struct PropagationViolation { std::size_t element; int from_sphere; int dead_sphere; };
    struct RestrictionViolation { std::size_t element_a; std::size_t element_b; int sphere; };
    std::vector<SphereFixViolation> sphere_fix;
    std::vector<PropagationViolation> propagation;
    std::vector<RestrictionViolation> restriction_equality;
    bool clean() const {
        return sphere_fix.empty() && propagation.empty() && restriction_equality.empty();
    }
};

Lemma4Report check_lemma4(const PermSet& A, const LayeredGraph& g, int boundary_margin = 1);

// Components of the subgraph induced on the non-fixed vertices of phi, with a
// flag per component for whether it reaches the outermost sphere.
struct FixedPointComponentsReport {
    std::vector<std::vector<VertexId>> components;   // each sorted
    std::vector<bool> touches_outermost;
    bool all_touch_outermost = true;
};

FixedPointComponentsReport fixed_point_components(const Permutation& phi, const LayeredGraph& g);

// Finite analogue of the disjoint-ray construction: from a fixed neighbor of
// the component, a path of strictly increasing distance reaching the outermost
// sphere whose image under phi is vertex-disjoint from it.
struct RayWitness {
    VertexId anchor;                 // the fixed neighbor the tree is rooted at
    std::vector<VertexId> path;      // starts adjacent to anchor, ends in the outermost sphere
};

std::optional<RayWitness> disjoint_ray_witness(const Permutation& phi, const LayeredGraph& g,
                                               const std::vector<VertexId>& component);

} // namespace disting
