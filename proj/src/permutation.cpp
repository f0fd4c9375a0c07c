#include "disting/permutation.hpp"

#include <algorithm>
#include <unordered_set>

namespace disting {

Permutation::Domain make_domain(std::vector<VertexId> vertices) {
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    return std::make_shared<const std::vector<VertexId>>(std::move(vertices));
}

Permutation Permutation::identity(Domain domain) {
    Permutation p;
    p.domain_ = std::move(domain);
    return p;
}

Permutation Permutation::from_moved(Domain domain,
                                    std::vector<std::pair<VertexId, VertexId>> moved) {
    Permutation p;
    p.domain_ = std::move(domain);
    std::sort(moved.begin(), moved.end());
    const auto& dom = *p.domain_;
    std::vector<VertexId> dsts;
    dsts.reserve(moved.size());
    for (std::size_t i = 0; i < moved.size(); ++i) {
        auto [s, d] = moved[i];
        if (s == d) continue;
        if (i > 0 && moved[i - 1].first == s)
            throw Error(Errc::config, "duplicate source in permutation");
        if (!std::binary_search(dom.begin(), dom.end(), s) ||
            !std::binary_search(dom.begin(), dom.end(), d))
            throw Error(Errc::config, "permutation maps outside its domain");
        p.moved_.push_back(moved[i]);
        dsts.push_back(d);
    }
    std::sort(dsts.begin(), dsts.end());
    if (std::adjacent_find(dsts.begin(), dsts.end()) != dsts.end())
        throw Error(Errc::config, "permutation image has duplicates");
    // Moved sources and moved destinations must coincide as sets, otherwise
    // some fixed point would also be an image.
    for (std::size_t i = 0; i < p.moved_.size(); ++i)
        if (!std::binary_search(dsts.begin(), dsts.end(), p.moved_[i].first))
            throw Error(Errc::config, "permutation is not a bijection");
    return p;
}

Permutation Permutation::from_mapping(Domain domain, const std::map<VertexId, VertexId>& mapping) {
    std::vector<std::pair<VertexId, VertexId>> moved;
    for (auto [s, d] : mapping)
        if (s != d) moved.emplace_back(s, d);
    return from_moved(std::move(domain), std::move(moved));
}

VertexId Permutation::apply(VertexId v) const {
    auto it = std::lower_bound(moved_.begin(), moved_.end(), std::make_pair(v, VertexId{0}),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it != moved_.end() && it->first == v) return it->second;
    return v;
}

bool Permutation::in_domain(VertexId v) const {
    return domain_ && std::binary_search(domain_->begin(), domain_->end(), v);
}

long long Permutation::restricted_motion(const std::vector<VertexId>& S) const {
    long long count = 0;
    if (moved_.size() < S.size()) {
        for (const auto& [s, d] : moved_)
            if (std::binary_search(S.begin(), S.end(), s)) ++count;
    } else {
        for (VertexId v : S)
            if (apply(v) != v) ++count;
    }
    return count;
}

std::vector<std::vector<VertexId>> Permutation::nontrivial_cycles() const {
    std::vector<std::vector<VertexId>> cycles;
    std::unordered_set<VertexId> visited;
    visited.reserve(moved_.size() * 2);
    for (const auto& [s, d] : moved_) {
        if (visited.count(s)) continue;
        std::vector<VertexId> cycle;
        VertexId v = s;
        do {
            cycle.push_back(v);
            visited.insert(v);
            v = apply(v);
        } while (v != s);
        cycles.push_back(std::move(cycle));
    }
    return cycles;
}

long long Permutation::cycle_count() const {
    long long fixed = static_cast<long long>(domain_->size()) - motion();
    return fixed + static_cast<long long>(nontrivial_cycles().size());
}

bool Permutation::fixes_setwise(const std::vector<VertexId>& S) const {
    // All images of S land in S: |phi(S)| = |S| forces a bijection of S.
    if (moved_.size() < S.size()) {
        for (const auto& [s, d] : moved_)
            if (std::binary_search(S.begin(), S.end(), s) !=
                std::binary_search(S.begin(), S.end(), d))
                return false;
        return true;
    }
    for (VertexId v : S)
        if (!std::binary_search(S.begin(), S.end(), apply(v))) return false;
    return true;
}

Permutation Permutation::restrict_to(Domain S) const {
    if (!fixes_setwise(*S))
        throw Error(Errc::config, "restriction target is not setwise fixed");
    std::vector<std::pair<VertexId, VertexId>> moved;
    if (moved_.size() < S->size()) {
        for (const auto& pr : moved_)
            if (std::binary_search(S->begin(), S->end(), pr.first)) moved.push_back(pr);
    } else {
        for (VertexId v : *S) {
            VertexId d = apply(v);
            if (d != v) moved.emplace_back(v, d);
        }
    }
    Permutation p;
    p.domain_ = std::move(S);
    p.moved_ = std::move(moved);
    return p;
}

Permutation Permutation::compose(const Permutation& inner) const {
    std::vector<std::pair<VertexId, VertexId>> moved;
    std::vector<VertexId> sources;
    sources.reserve(moved_.size() + inner.moved_.size());
    for (const auto& [s, d] : moved_) sources.push_back(s);
    for (const auto& [s, d] : inner.moved_) sources.push_back(s);
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    for (VertexId s : sources) {
        VertexId d = apply(inner.apply(s));
        if (d != s) moved.emplace_back(s, d);
    }
    Permutation p;
    p.domain_ = domain_;
    p.moved_ = std::move(moved);
    return p;
}

Permutation Permutation::inverse() const {
    std::vector<std::pair<VertexId, VertexId>> moved;
    moved.reserve(moved_.size());
    for (const auto& [s, d] : moved_) moved.emplace_back(d, s);
    std::sort(moved.begin(), moved.end());
    Permutation p;
    p.domain_ = domain_;
    p.moved_ = std::move(moved);
    return p;
}

void PermSet::sort_unique() {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
}

bool PermSet::verify_closed() const {
    auto member = [&](const Permutation& p) {
        return std::binary_search(elements.begin(), elements.end(), p);
    };
    for (const auto& a : elements) {
        if (!member(a.inverse())) return false;
        for (const auto& b : elements)
            if (!member(a.compose(b))) return false;
    }
    return true;
}

std::optional<long long> group_motion(const PermSet& A) {
    std::optional<long long> m;
    for (const auto& p : A.elements)
        if (!m || p.motion() < *m) m = p.motion();
    return m;
}

std::optional<long long> group_motion(const PermSet& A, const std::vector<VertexId>& S) {
    std::optional<long long> m;
    for (const auto& p : A.elements) {
        long long v = p.restricted_motion(S);
        if (!m || v < *m) m = v;
    }
    return m;
}

} // namespace disting
