#pragma once

#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "disting/layered_graph.hpp"

namespace disting {

// A bijection of a finite vertex set onto itself. Stored sparsely: only the
// moved points are recorded, so very sparse permutations over large domains
// stay cheap. The domain is shared between the elements of a PermSet.
class Permutation {
public:
    using Domain = std::shared_ptr<const std::vector<VertexId>>; // sorted, distinct

    Permutation() = default;

    static Permutation identity(Domain domain);
    // Mapping given as (src, dst) pairs for the moved points only; fixed points
    // are implicit. Validates bijectivity on the domain.
    static Permutation from_moved(Domain domain, std::vector<std::pair<VertexId, VertexId>> moved);
    // Full mapping; fixed points are stripped.
    static Permutation from_mapping(Domain domain, const std::map<VertexId, VertexId>& mapping);

    VertexId apply(VertexId v) const;
    bool in_domain(VertexId v) const;
    const Domain& domain() const { return domain_; }
    const std::vector<std::pair<VertexId, VertexId>>& moved() const { return moved_; }

    bool is_identity() const { return moved_.empty(); }
    long long motion() const { return static_cast<long long>(moved_.size()); }
    // Number of moved points inside S (S sorted).
    long long restricted_motion(const std::vector<VertexId>& S) const;

    // Nontrivial cycles; singleton cycles are implied by the domain.
    std::vector<std::vector<VertexId>> nontrivial_cycles() const;
    // Total cycle count including fixed points as singleton cycles.
    long long cycle_count() const;

    // True iff apply(S) == S as sets (S sorted).
    bool fixes_setwise(const std::vector<VertexId>& S) const;
    // The induced bijection on S; throws unless S is setwise fixed.
    Permutation restrict_to(Domain S) const;

    Permutation compose(const Permutation& inner) const;   // this ∘ inner
    Permutation inverse() const;

    bool operator==(const Permutation& o) const { return moved_ == o.moved_; }
    bool operator<(const Permutation& o) const { return moved_ < o.moved_; }

private:
    Domain domain_;
    std::vector<std::pair<VertexId, VertexId>> moved_;   // sorted by src, dst != src
};

// An explicitly enumerated set of distinct permutations over a common domain.
struct PermSet {
    std::vector<Permutation> elements;    // sorted, distinct
    bool closed = false;                  // closed under composition and inverse
    std::size_t cap = 100000;

    std::size_t size() const { return elements.size(); }
    bool empty() const { return elements.empty(); }
    void sort_unique();
    bool verify_closed() const;   // exhaustive membership check
};

Permutation::Domain make_domain(std::vector<VertexId> vertices);

// Minimum motion over the elements; empty set reports infinity (nullopt).
std::optional<long long> group_motion(const PermSet& A);
std::optional<long long> group_motion(const PermSet& A, const std::vector<VertexId>& S);

} // namespace disting
