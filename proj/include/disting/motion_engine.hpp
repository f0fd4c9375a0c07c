#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "disting/permutation.hpp"

namespace disting {

enum class Color : std::uint8_t { Black = 0, White = 1 };

// A 2-coloring with explicit support.
struct PartialColoring {
    std::vector<VertexId> support;     // sorted
    std::vector<std::uint8_t> white;   // parallel to support, 1 = white

    std::size_t size() const { return support.size(); }
    bool contains(VertexId v) const;
    std::optional<Color> color_of(VertexId v) const;
    // Disjoint-union merge; throws if supports overlap with conflicting colors.
    void merge(const PartialColoring& other);

    static PartialColoring all_black(std::vector<VertexId> support);
};

// Number of full 2-colorings of phi's domain preserved by phi: 2^p where p is
// the number of cycles (fixed points count as singleton cycles).
unsigned long long preserved_count(const Permutation& phi);

// Both sides of the double-counting identity over all 2^|S'| colorings of the
// common domain of A's elements:
//   sum_phi #{c preserved by phi}  ==  sum_c #{phi preserving c}.
struct DoubleCountResult {
    unsigned long long lhs = 0;
    unsigned long long rhs = 0;
    bool equal = false;
};

DoubleCountResult double_count_check(const PermSet& A, int enumeration_limit = 16);

// The Motion Lemma hypothesis m(A)|S' > 2 log2 |A|S'| on the restrictions.
struct BoundCheck {
    long long group_motion = 0;
    std::size_t set_size = 0;     // |A restricted to S'|, deduplicated
    double threshold = 0.0;       // 2 log2 |A|S'|
    bool holds = false;
};

// Throws Error(config) listing offenders when some restriction is the identity
// on S' (motion 0 makes the bound unsatisfiable).
BoundCheck bound_check(const PermSet& A, const std::vector<VertexId>& support);

// True iff c extends to a full coloring preserved by phi, equivalently iff the
// colors assigned on every cycle of phi intersected with the support agree.
// Defined also when phi does not fix the support setwise (cycle-constancy is
// exactly extendability in that case too).
bool preserves_partial(const Permutation& phi, const PartialColoring& c);

struct SearchStrategy {
    enum class Kind { Auto, Exhaustive, Randomized };
    Kind kind = Kind::Auto;
    std::uint64_t seed = 0;
    long long max_tries = 10000;
    int exhaustive_limit = 20;   // Auto switches to randomized above this support size
};

struct SearchStats {
    std::string strategy;
    long long tries = 0;
    long long survivors_last_try = 0;
};

// A partial coloring with support exactly `support` breaking every element of
// A. The exhaustive strategy scans colorings as binary integers over the
// sorted support; randomized sampling is deterministic given the seed.
// Requires bound_check to hold unless force is set; throws
// Error(search_failure) when no coloring is found.
PartialColoring find_breaking_coloring(const PermSet& A, const std::vector<VertexId>& support,
                                       const SearchStrategy& strategy, bool force = false,
                                       SearchStats* stats = nullptr);

// Every element of A preserving c; empty means c is A-distinguishing.
std::vector<std::size_t> verify_breaks(const PartialColoring& c, const PermSet& A);

} // namespace disting
