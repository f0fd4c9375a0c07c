#include "disting/motion_engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "disting/perm_group.hpp"

namespace disting {

bool PartialColoring::contains(VertexId v) const {
    return std::binary_search(support.begin(), support.end(), v);
}

std::optional<Color> PartialColoring::color_of(VertexId v) const {
    auto it = std::lower_bound(support.begin(), support.end(), v);
    if (it == support.end() || *it != v) return std::nullopt;
    return white[static_cast<std::size_t>(it - support.begin())] ? Color::White : Color::Black;
}

void PartialColoring::merge(const PartialColoring& other) {
    std::vector<VertexId> s;
    std::vector<std::uint8_t> w;
    s.reserve(support.size() + other.support.size());
    w.reserve(support.size() + other.support.size());
    std::size_t i = 0, j = 0;
    while (i < support.size() || j < other.support.size()) {
        bool take_left = j >= other.support.size() ||
                         (i < support.size() && support[i] <= other.support[j]);
        if (take_left && j < other.support.size() && i < support.size() &&
            support[i] == other.support[j]) {
            if (white[i] != other.white[j])
                throw Error(Errc::config, "conflicting colors in coloring merge");
            s.push_back(support[i]);
            w.push_back(white[i]);
            ++i;
            ++j;
        } else if (take_left) {
            s.push_back(support[i]);
            w.push_back(white[i]);
            ++i;
        } else {
            s.push_back(other.support[j]);
            w.push_back(other.white[j]);
            ++j;
        }
    }
    support = std::move(s);
    white = std::move(w);
}

PartialColoring PartialColoring::all_black(std::vector<VertexId> support_) {
    PartialColoring c;
    std::sort(support_.begin(), support_.end());
    c.support = std::move(support_);
    c.white.assign(c.support.size(), 0);
    return c;
}

unsigned long long preserved_count(const Permutation& phi) {
    long long p = phi.cycle_count();
    if (p >= 64)
        throw Error(Errc::config, "preserved_count would overflow (" + std::to_string(p) +
                                      " cycles)");
    return 1ull << p;
}

bool preserves_partial(const Permutation& phi, const PartialColoring& c) {
    // Singleton cycles are trivially constant; only cycles made of moved
    // points can see two colors.
    std::unordered_set<VertexId> visited;
    for (const auto& [s, d] : phi.moved()) {
        if (!c.contains(s) || visited.count(s)) continue;
        std::optional<Color> seen = c.color_of(s);
        VertexId v = phi.apply(s);
        visited.insert(s);
        while (v != s) {
            visited.insert(v);
            auto col = c.color_of(v);
            if (col) {
                if (seen && *col != *seen) return false;
                seen = col;
            }
            v = phi.apply(v);
        }
    }
    return true;
}

DoubleCountResult double_count_check(const PermSet& A, int enumeration_limit) {
    DoubleCountResult r;
    if (A.empty()) {
        r.equal = true;
        return r;
    }
    const auto& domain = *A.elements.front().domain();
    int L = static_cast<int>(domain.size());
    if (L > enumeration_limit)
        throw Error(Errc::config, "double_count_check enumeration limit exceeded: |S'| = " +
                                      std::to_string(L));
    for (const auto& p : A.elements) r.lhs += preserved_count(p);

    PartialColoring c;
    c.support = domain;
    c.white.assign(domain.size(), 0);
    for (unsigned long long v = 0; v < (1ull << L); ++v) {
        for (int i = 0; i < L; ++i) c.white[i] = (v >> (L - 1 - i)) & 1u;
        for (const auto& p : A.elements)
            if (preserves_partial(p, c)) ++r.rhs;
    }
    r.equal = r.lhs == r.rhs;
    return r;
}

BoundCheck bound_check(const PermSet& A, const std::vector<VertexId>& support) {
    BoundCheck bc;
    if (A.empty()) {
        bc.holds = true;
        return bc;
    }
    PermSet restricted = restrict_set(A, support);
    std::vector<std::size_t> identity_elements;
    for (std::size_t i = 0; i < A.size(); ++i)
        if (A.elements[i].restricted_motion(support) == 0) identity_elements.push_back(i);
    if (!identity_elements.empty()) {
        std::string msg = "identity-on-support: elements";
        for (std::size_t i : identity_elements) msg += " " + std::to_string(i);
        throw Error(Errc::config, msg);
    }
    bc.set_size = restricted.size();
    bc.group_motion = *group_motion(restricted);
    bc.threshold = 2.0 * std::log2(static_cast<double>(bc.set_size));
    bc.holds = static_cast<double>(bc.group_motion) > bc.threshold;
    return bc;
}

namespace {

// Identical restrictions are broken together; when some element does not fix
// the support setwise we fall back to testing the elements themselves via
// cycle constancy.
std::vector<Permutation> dedup_for_support(const PermSet& A,
                                           const std::vector<VertexId>& support) {
    bool all_setwise = true;
    for (const auto& p : A.elements)
        if (!p.fixes_setwise(support)) {
            all_setwise = false;
            break;
        }
    if (!all_setwise) return A.elements;
    return restrict_set(A, support).elements;
}

} // namespace

PartialColoring find_breaking_coloring(const PermSet& A, const std::vector<VertexId>& support,
                                       const SearchStrategy& strategy, bool force,
                                       SearchStats* stats) {
    std::vector<VertexId> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    if (A.empty()) {
        if (stats) *stats = {"trivial", 0, 0};
        return PartialColoring::all_black(sorted);
    }

    bool setwise = true;
    for (const auto& p : A.elements)
        if (!p.fixes_setwise(sorted)) {
            setwise = false;
            break;
        }
    if (setwise && !force) {
        BoundCheck bc = bound_check(A, sorted);
        if (!bc.holds)
            throw Error(Errc::config,
                        "motion bound does not hold on the support (motion " +
                            std::to_string(bc.group_motion) + " vs threshold " +
                            std::to_string(bc.threshold) + "); use force to search anyway");
    }

    auto targets = dedup_for_support(A, sorted);
    int L = static_cast<int>(sorted.size());

    PartialColoring c;
    c.support = sorted;
    c.white.assign(sorted.size(), 0);
    auto survivors = [&]() {
        long long count = 0;
        for (const auto& p : targets)
            if (preserves_partial(p, c)) ++count;
        return count;
    };

    SearchStrategy::Kind kind = strategy.kind;
    if (kind == SearchStrategy::Kind::Auto)
        kind = (L <= strategy.exhaustive_limit) ? SearchStrategy::Kind::Exhaustive
                                                : SearchStrategy::Kind::Randomized;

    if (kind == SearchStrategy::Kind::Exhaustive) {
        if (L > 30)
            throw Error(Errc::config, "exhaustive coloring scan infeasible for |S'| = " +
                                          std::to_string(L));
        long long tries = 0;
        for (unsigned long long v = 0; v < (1ull << L); ++v) {
            for (int i = 0; i < L; ++i) c.white[i] = (v >> (L - 1 - i)) & 1u;
            ++tries;
            long long surv = survivors();
            if (surv == 0) {
                if (stats) *stats = {"exhaustive", tries, 0};
                return c;
            }
        }
        if (stats) *stats = {"exhaustive", tries, -1};
        throw Error(Errc::search_failure, "exhaustive scan found no breaking coloring over 2^" +
                                              std::to_string(L) + " candidates");
    }

    std::mt19937_64 rng(strategy.seed);
    long long last_survivors = 0;
    for (long long t = 1; t <= strategy.max_tries; ++t) {
        std::uint64_t word = 0;
        for (int i = 0; i < L; ++i) {
            if (i % 64 == 0) word = rng();
            c.white[i] = (word >> (i % 64)) & 1u;
        }
        last_survivors = survivors();
        if (last_survivors == 0) {
            if (stats) *stats = {"randomized", t, 0};
            return c;
        }
    }
    if (stats) *stats = {"randomized", strategy.max_tries, last_survivors};
    throw Error(Errc::search_failure,
                "randomized coloring search exhausted " + std::to_string(strategy.max_tries) +
                    " tries; last try preserved by " + std::to_string(last_survivors) +
                    " elements");
}

std::vector<std::size_t> verify_breaks(const PartialColoring& c, const PermSet& A) {
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < A.size(); ++i)
        if (preserves_partial(A.elements[i], c)) survivors.push_back(i);
    return survivors;
}

} // namespace disting
