#include "disting/perm_group.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace disting {

namespace {

struct BitMatrix {
    std::size_t n = 0;
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;

    explicit BitMatrix(std::size_t n_) : n(n_), words((n_ + 63) / 64), bits(n_ * words, 0) {}
    void set(std::size_t i, std::size_t j) {
        bits[i * words + j / 64] |= (std::uint64_t{1} << (j % 64));
    }
    bool get(std::size_t i, std::size_t j) const {
        return (bits[i * words + j / 64] >> (j % 64)) & 1u;
    }
};

// Iterated degree refinement (1-dimensional Weisfeiler-Leman). Returns stable
// color classes; automorphism-invariant by construction.
std::vector<int> refine_colors(const std::vector<std::vector<int>>& adj) {
    std::size_t n = adj.size();
    std::vector<int> color(n, 0);
    std::size_t classes = 1;
    for (;;) {
        std::vector<std::pair<std::vector<int>, int>> sig(n);
        for (std::size_t v = 0; v < n; ++v) {
            std::vector<int> s;
            s.reserve(adj[v].size() + 1);
            s.push_back(color[v]);
            std::vector<int> nb;
            nb.reserve(adj[v].size());
            for (int w : adj[v]) nb.push_back(color[w]);
            std::sort(nb.begin(), nb.end());
            s.insert(s.end(), nb.begin(), nb.end());
            sig[v] = {std::move(s), static_cast<int>(v)};
        }
        auto sorted = sig;
        std::sort(sorted.begin(), sorted.end());
        std::map<std::vector<int>, int> ids;
        for (const auto& [s, v] : sorted)
            ids.emplace(s, static_cast<int>(ids.size()));
        std::vector<int> next(n);
        for (std::size_t v = 0; v < n; ++v) next[v] = ids.at(sig[v].first);
        if (ids.size() == classes) return next;
        classes = ids.size();
        color = std::move(next);
    }
}

struct AutSearch {
    std::size_t n;
    const std::vector<std::vector<int>>& adj;
    const BitMatrix& mat;
    const std::vector<int>& color;
    std::vector<std::vector<int>> by_color;
    std::vector<int> order;        // vertex processing order
    std::vector<int> image;        // partial map, -1 = unset
    std::vector<char> used;        // image vertices taken
    std::vector<std::vector<int>> results;
    std::size_t cap;

    AutSearch(const std::vector<std::vector<int>>& adj_, const BitMatrix& mat_,
              const std::vector<int>& color_, std::size_t cap_)
        : n(adj_.size()), adj(adj_), mat(mat_), color(color_), image(n, -1), used(n, 0),
          cap(cap_) {
        int classes = *std::max_element(color.begin(), color.end()) + 1;
        by_color.resize(classes);
        for (std::size_t v = 0; v < n; ++v) by_color[color[v]].push_back(static_cast<int>(v));
        build_order();
    }

    void build_order() {
        // Start in the smallest color class, then always take the unplaced
        // vertex with the most placed neighbors so adjacency prunes early.
        std::vector<char> placed(n, 0);
        std::vector<int> placed_nb(n, 0);
        int first = 0;
        std::size_t best = n + 1;
        for (std::size_t v = 0; v < n; ++v) {
            std::size_t sz = by_color[color[v]].size();
            if (sz < best) {
                best = sz;
                first = static_cast<int>(v);
            }
        }
        order.push_back(first);
        placed[first] = 1;
        for (int w : adj[first]) ++placed_nb[w];
        while (order.size() < n) {
            int pick = -1;
            for (std::size_t v = 0; v < n; ++v) {
                if (placed[v]) continue;
                if (pick == -1 || placed_nb[v] > placed_nb[pick] ||
                    (placed_nb[v] == placed_nb[pick] &&
                     by_color[color[v]].size() < by_color[color[pick]].size()))
                    pick = static_cast<int>(v);
            }
            order.push_back(pick);
            placed[pick] = 1;
            for (int w : adj[pick]) ++placed_nb[w];
        }
    }

    void search(std::size_t depth) {
        if (depth == n) {
            if (results.size() >= cap)
                throw Error(Errc::cap_exceeded,
                            "automorphism group exceeds cap of " + std::to_string(cap) +
                                " elements; " + std::to_string(results.size()) +
                                " enumerated before the cap");
            results.push_back(image);
            return;
        }
        int v = order[depth];
        for (int w : by_color[color[v]]) {
            if (used[w]) continue;
            bool ok = true;
            for (std::size_t d = 0; d < depth; ++d) {
                int u = order[d];
                if (mat.get(v, u) != mat.get(w, image[u])) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            image[v] = w;
            used[w] = 1;
            search(depth + 1);
            image[v] = -1;
            used[w] = 0;
        }
    }
};

} // namespace

PermSet automorphisms(const LayeredGraph& g, std::size_t cap) {
    auto ids = g.all_vertices();
    std::size_t n = ids.size();
    if (n == 0) throw Error(Errc::config, "automorphisms of an empty graph");
    if (n > 8192)
        throw Error(Errc::cap_exceeded,
                    "automorphism enumeration supports up to 8192 vertices, got " +
                        std::to_string(n));
    std::unordered_map<VertexId, int> idx;
    idx.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) idx[ids[i]] = static_cast<int>(i);

    std::vector<std::vector<int>> adj(n);
    BitMatrix mat(n);
    for (auto [u, v] : g.edges) {
        int a = idx.at(u), b = idx.at(v);
        adj[a].push_back(b);
        adj[b].push_back(a);
        mat.set(a, b);
        mat.set(b, a);
    }
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());

    auto color = refine_colors(adj);
    AutSearch search(adj, mat, color, cap);
    search.search(0);

    auto domain = make_domain(ids);
    PermSet out;
    out.cap = cap;
    out.elements.reserve(search.results.size());
    for (const auto& img : search.results) {
        std::vector<std::pair<VertexId, VertexId>> moved;
        for (std::size_t i = 0; i < n; ++i)
            if (img[i] != static_cast<int>(i))
                moved.emplace_back(ids[i], ids[img[i]]);
        out.elements.push_back(Permutation::from_moved(domain, std::move(moved)));
    }
    out.sort_unique();
    out.closed = true;
    return out;
}

PermSet stabilizer(const PermSet& A, VertexId v) {
    PermSet out;
    out.cap = A.cap;
    for (const auto& p : A.elements)
        if (p.apply(v) == v) out.elements.push_back(p);
    out.closed = A.closed;   // the stabilizer of a group is a subgroup
    return out;
}

PermSet restrict_set(const PermSet& A, const std::vector<VertexId>& S) {
    auto domain = make_domain(S);
    PermSet out;
    out.cap = A.cap;
    out.elements.reserve(A.size());
    for (const auto& p : A.elements) out.elements.push_back(p.restrict_to(domain));
    out.sort_unique();
    out.closed = A.closed;
    return out;
}

MotionReport motion_report(const PermSet& A, const LayeredGraph& g,
                           const std::vector<VertexId>& support) {
    MotionReport r;
    for (const auto& p : A.elements) {
        r.element_motion.push_back(p.motion());
        std::vector<long long> per_sphere(g.radius() + 1, 0);
        for (const auto& [s, d] : p.moved())
            if (g.has_vertex(s)) ++per_sphere[g.sphere_of(s)];
        r.element_sphere_motion.push_back(std::move(per_sphere));
    }
    r.set_motion = group_motion(A);
    r.restricted_set_motion = group_motion(A, support);
    return r;
}

Lemma4Report check_lemma4(const PermSet& A, const LayeredGraph& g, int boundary_margin) {
    Lemma4Report report;
    int top = g.radius() - boundary_margin;

    std::vector<std::vector<long long>> sphere_motion(A.size(),
                                                      std::vector<long long>(g.radius() + 1, 0));
    for (std::size_t e = 0; e < A.size(); ++e) {
        const auto& p = A.elements[e];
        for (int i = 0; i <= g.radius(); ++i)
            if (!p.fixes_setwise(g.spheres[i])) report.sphere_fix.push_back({e, i});
        for (const auto& [s, d] : p.moved())
            if (g.has_vertex(s)) ++sphere_motion[e][g.sphere_of(s)];
    }

    for (std::size_t e = 0; e < A.size(); ++e) {
        int first_active = -1;
        for (int i = 0; i <= g.radius(); ++i) {
            if (sphere_motion[e][i] > 0) {
                first_active = i;
                break;
            }
        }
        if (first_active < 0) continue;
        for (int j = first_active + 1; j <= top; ++j)
            if (sphere_motion[e][j] == 0)
                report.propagation.push_back({e, first_active, j});
    }

    // agree-on-sphere-i must imply agree-on-ball-i.
    for (std::size_t a = 0; a < A.size(); ++a) {
        for (std::size_t b = a + 1; b < A.size(); ++b) {
            bool ball_agree = true;
            std::vector<bool> sphere_agree(top + 1, true);
            for (int i = 0; i <= top; ++i) {
                bool agree = true;
                for (VertexId v : g.spheres[i]) {
                    if (A.elements[a].apply(v) != A.elements[b].apply(v)) {
                        agree = false;
                        break;
                    }
                }
                if (agree && !ball_agree)
                    report.restriction_equality.push_back({a, b, i});
                ball_agree = ball_agree && agree;
            }
        }
    }
    return report;
}

FixedPointComponentsReport fixed_point_components(const Permutation& phi, const LayeredGraph& g) {
    FixedPointComponentsReport report;
    std::unordered_set<VertexId> moved;
    for (const auto& [s, d] : phi.moved())
        if (g.has_vertex(s)) moved.insert(s);

    std::unordered_set<VertexId> visited;
    for (const auto& [start, d0] : phi.moved()) {
        if (!g.has_vertex(start) || visited.count(start)) continue;
        std::vector<VertexId> comp;
        std::queue<VertexId> q;
        visited.insert(start);
        q.push(start);
        bool touches = false;
        while (!q.empty()) {
            VertexId u = q.front();
            q.pop();
            comp.push_back(u);
            if (g.sphere_of(u) == g.radius()) touches = true;
            for (VertexId w : g.neighbors(u)) {
                if (moved.count(w) && !visited.count(w)) {
                    visited.insert(w);
                    q.push(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        report.components.push_back(std::move(comp));
        report.touches_outermost.push_back(touches);
        if (!touches) report.all_touch_outermost = false;
    }
    return report;
}

std::optional<RayWitness> disjoint_ray_witness(const Permutation& phi, const LayeredGraph& g,
                                               const std::vector<VertexId>& component) {
    bool touches = false;
    for (VertexId v : component)
        if (g.sphere_of(v) == g.radius()) touches = true;
    if (!touches)
        throw Error(Errc::config, "component does not touch the outermost sphere");

    // Fixed neighbor of the component; smallest id for determinism.
    std::optional<VertexId> anchor;
    for (VertexId v : component)
        for (VertexId w : g.neighbors(v))
            if (phi.apply(w) == w && (!anchor || w < *anchor)) anchor = w;
    if (!anchor) return std::nullopt;

    // BFS tree of component + anchor, rooted at the anchor; depths along any
    // root-to-node path are strictly increasing.
    std::unordered_map<VertexId, VertexId> parent;
    std::unordered_map<VertexId, int> depth;
    std::queue<VertexId> q;
    parent[*anchor] = *anchor;
    depth[*anchor] = 0;
    q.push(*anchor);
    std::unordered_set<VertexId> in_comp(component.begin(), component.end());
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop();
        for (VertexId w : g.neighbors(u)) {
            if (!in_comp.count(w) || parent.count(w)) continue;
            parent[w] = u;
            depth[w] = depth[u] + 1;
            q.push(w);
        }
    }

    std::vector<VertexId> targets;
    for (VertexId v : component)
        if (g.sphere_of(v) == g.radius() && parent.count(v)) targets.push_back(v);
    std::sort(targets.begin(), targets.end());

    for (VertexId t : targets) {
        std::vector<VertexId> path;
        for (VertexId v = t; v != *anchor; v = parent.at(v)) path.push_back(v);
        std::reverse(path.begin(), path.end());
        std::unordered_set<VertexId> on_path(path.begin(), path.end());
        bool disjoint = true;
        for (VertexId v : path) {
            if (on_path.count(phi.apply(v))) {
                disjoint = false;
                break;
            }
        }
        if (disjoint) return RayWitness{*anchor, std::move(path)};
    }
    return std::nullopt;
}

} // namespace disting
