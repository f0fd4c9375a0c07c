#include "disting/layered_graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <queue>
#include <set>

namespace disting {

std::size_t LayeredGraph::num_vertices() const {
    std::size_t n = 0;
    for (const auto& s : spheres) n += s.size();
    return n;
}

int LayeredGraph::sphere_of(VertexId v) const {
    if (v < 0 || v >= static_cast<VertexId>(sphere_of_.size()) || sphere_of_[v] < 0)
        throw Error(Errc::config, "vertex id not in graph: " + std::to_string(v));
    return sphere_of_[v];
}

bool LayeredGraph::has_vertex(VertexId v) const {
    return v >= 0 && v < static_cast<VertexId>(sphere_of_.size()) && sphere_of_[v] >= 0;
}

const std::vector<VertexId>& LayeredGraph::neighbors(VertexId v) const {
    sphere_of(v); // bounds check
    return adj_[v];
}

std::vector<VertexId> LayeredGraph::all_vertices() const {
    std::vector<VertexId> out;
    out.reserve(num_vertices());
    for (VertexId v = 0; v < static_cast<VertexId>(sphere_of_.size()); ++v)
        if (sphere_of_[v] >= 0) out.push_back(v);
    return out;
}

void LayeredGraph::finalize() {
    if (spheres.empty()) throw Error(Errc::config, "layered graph has no spheres");
    if (spheres[0].size() != 1 || spheres[0][0] != base)
        throw Error(Errc::config, "sphere 0 must equal {base}");

    VertexId max_id = base;
    std::size_t total = 0;
    for (const auto& s : spheres) {
        for (VertexId v : s) {
            if (v < 0) throw Error(Errc::config, "negative vertex id");
            max_id = std::max(max_id, v);
        }
        total += s.size();
    }
    sphere_of_.assign(static_cast<std::size_t>(max_id) + 1, -1);
    for (int n = 0; n < static_cast<int>(spheres.size()); ++n) {
        auto& s = spheres[n];
        std::sort(s.begin(), s.end());
        for (VertexId v : s) {
            if (sphere_of_[v] != -1) throw Error(Errc::config, "duplicate vertex id across spheres");
            sphere_of_[v] = n;
        }
    }

    adj_.assign(sphere_of_.size(), {});
    std::sort(edges.begin(), edges.end());
    for (auto& [u, v] : edges) {
        if (u > v) std::swap(u, v);
        if (!has_vertex(u) || !has_vertex(v) || u == v)
            throw Error(Errc::config, "edge endpoint not a vertex");
        int du = sphere_of_[u], dv = sphere_of_[v];
        if (std::abs(du - dv) > 1)
            throw Error(Errc::config, "edge violates BFS layering between spheres " +
                                          std::to_string(du) + " and " + std::to_string(dv));
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto& nb : adj_) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }

    // Every vertex in sphere n+1 needs a parent in sphere n, and the sphere
    // index must equal the BFS distance from base.
    std::vector<int> dist(sphere_of_.size(), -1);
    std::queue<VertexId> q;
    dist[base] = 0;
    q.push(base);
    std::size_t seen = 1;
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop();
        for (VertexId w : adj_[u]) {
            if (dist[w] == -1) {
                dist[w] = dist[u] + 1;
                ++seen;
                q.push(w);
            }
        }
    }
    if (seen != total) throw Error(Errc::config, "graph is not connected");
    for (VertexId v = 0; v < static_cast<VertexId>(sphere_of_.size()); ++v) {
        if (sphere_of_[v] >= 0 && dist[v] != sphere_of_[v])
            throw Error(Errc::config, "sphere index of vertex " + std::to_string(v) +
                                          " does not match BFS distance");
    }
}

double GrowthBudget::bound(int n) const {
    return c * std::exp2((1.0 - epsilon) * std::sqrt(static_cast<double>(n)) / 2.0);
}

FamilySpec FamilySpec::parse(const std::string& text) {
    FamilySpec s;
    if (text == "line") {
        s.kind = Kind::Line;
    } else if (text == "two-way-ladder" || text == "ladder") {
        s.kind = Kind::Ladder;
    } else if (text == "grid2d") {
        s.kind = Kind::Grid2d;
    } else if (text.rfind("regular-tree(", 0) == 0 && text.back() == ')') {
        s.kind = Kind::RegularTree;
        s.tree_degree = std::stoi(text.substr(13, text.size() - 14));
        if (s.tree_degree < 2) throw Error(Errc::config, "regular-tree degree must be >= 2");
    } else {
        throw Error(Errc::config, "unknown family kind: " + text);
    }
    return s;
}

std::string FamilySpec::name() const {
    switch (kind) {
        case Kind::Line: return "line";
        case Kind::Ladder: return "two-way-ladder";
        case Kind::Grid2d: return "grid2d";
        case Kind::RegularTree: return "regular-tree(" + std::to_string(tree_degree) + ")";
        case Kind::Synthetic: return "synthetic-layered";
    }
    return "?";
}

namespace {

using Coord = std::array<long long, 2>;

template <typename NeighborFn>
LayeredGraph bfs_generate(const Coord& origin, int radius, NeighborFn neighbors_of) {
    LayeredGraph g;
    std::map<Coord, VertexId> id_of;
    std::vector<Coord> coord_of;
    auto intern = [&](const Coord& c) {
        auto [it, fresh] = id_of.emplace(c, static_cast<VertexId>(coord_of.size()));
        if (fresh) coord_of.push_back(c);
        return it->second;
    };

    g.base = intern(origin);
    g.spheres.push_back({g.base});
    std::vector<Coord> frontier = {origin};
    for (int n = 1; n <= radius; ++n) {
        std::vector<VertexId> layer;
        std::vector<Coord> next;
        for (const Coord& c : frontier) {
            VertexId u = id_of.at(c);
            for (const Coord& nb : neighbors_of(c)) {
                bool fresh = id_of.find(nb) == id_of.end();
                VertexId w = intern(nb);
                if (fresh) {
                    layer.push_back(w);
                    next.push_back(nb);
                }
                if (w > u) g.edges.emplace_back(u, w);
                else g.edges.emplace_back(w, u);
            }
        }
        g.spheres.push_back(std::move(layer));
        frontier = std::move(next);
    }
    // Same-sphere edges within the outermost layer are only visible from the
    // final frontier, which the loop above never expands.
    for (const Coord& c : frontier) {
        VertexId u = id_of.at(c);
        for (const Coord& nb : neighbors_of(c)) {
            auto it = id_of.find(nb);
            if (it == id_of.end()) continue;
            VertexId w = it->second;
            if (w < u) g.edges.emplace_back(w, u);
            else if (w > u) g.edges.emplace_back(u, w);
        }
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    g.finalize();
    return g;
}

LayeredGraph generate_tree(int degree, int radius) {
    LayeredGraph g;
    g.base = 0;
    g.spheres.push_back({0});
    VertexId next_id = 1;
    for (int n = 1; n <= radius; ++n) {
        std::vector<VertexId> layer;
        for (VertexId parent : g.spheres[n - 1]) {
            int children = (n == 1) ? degree : degree - 1;
            for (int c = 0; c < children; ++c) {
                g.edges.emplace_back(parent, next_id);
                layer.push_back(next_id++);
            }
        }
        g.spheres.push_back(std::move(layer));
    }
    g.finalize();
    return g;
}

LayeredGraph generate_synthetic(const SyntheticSpec& spec, int radius) {
    if (spec.sphere_sizes.empty() || spec.sphere_sizes[0] != 1)
        throw Error(Errc::config, "synthetic description must start with a sphere of size 1");
    if (radius >= static_cast<int>(spec.sphere_sizes.size()))
        throw Error(Errc::config, "synthetic description too shallow for requested radius");
    LayeredGraph g;
    g.base = 0;
    VertexId next_id = 0;
    VertexId limit = 0;
    for (int n = 0; n <= radius; ++n) {
        if (spec.sphere_sizes[n] <= 0)
            throw Error(Errc::config, "synthetic sphere sizes must be positive");
        std::vector<VertexId> layer;
        for (int i = 0; i < spec.sphere_sizes[n]; ++i) layer.push_back(next_id++);
        g.spheres.push_back(std::move(layer));
    }
    limit = next_id;
    for (auto [u, v] : spec.edges)
        if (u < limit && v < limit) g.edges.emplace_back(u, v);
    g.finalize(); // rejects sphere vertices with no parent edge, layering violations
    return g;
}

} // namespace

LayeredGraph generate(const FamilySpec& spec, int radius) {
    if (radius < 0) throw Error(Errc::config, "radius must be >= 0");
    switch (spec.kind) {
        case FamilySpec::Kind::Line:
            return bfs_generate({0, 0}, radius, [](const Coord& c) {
                return std::vector<Coord>{{c[0] - 1, 0}, {c[0] + 1, 0}};
            });
        case FamilySpec::Kind::Ladder:
            return bfs_generate({0, 0}, radius, [](const Coord& c) {
                return std::vector<Coord>{{c[0] - 1, c[1]}, {c[0], 1 - c[1]}, {c[0] + 1, c[1]}};
            });
        case FamilySpec::Kind::Grid2d:
            return bfs_generate({0, 0}, radius, [](const Coord& c) {
                return std::vector<Coord>{
                    {c[0] - 1, c[1]}, {c[0], c[1] - 1}, {c[0], c[1] + 1}, {c[0] + 1, c[1]}};
            });
        case FamilySpec::Kind::RegularTree:
            return generate_tree(spec.tree_degree, radius);
        case FamilySpec::Kind::Synthetic:
            return generate_synthetic(spec.synthetic, radius);
    }
    throw Error(Errc::config, "unknown family kind");
}

std::vector<VertexId> ball(const LayeredGraph& g, int n) {
    if (n < 0 || n > g.radius()) throw Error(Errc::config, "ball radius out of range");
    std::vector<VertexId> out;
    for (int i = 0; i <= n; ++i)
        out.insert(out.end(), g.spheres[i].begin(), g.spheres[i].end());
    std::sort(out.begin(), out.end());
    return out;
}

GrowthCheckReport growth_check(const LayeredGraph& g, const GrowthBudget& budget) {
    GrowthCheckReport report;
    long long ball_size = 0;
    for (int n = 0; n <= g.radius(); ++n) {
        ball_size += static_cast<long long>(g.spheres[n].size());
        double bound = budget.bound(n);
        bool ok = static_cast<double>(ball_size) <= bound;
        report.rows.push_back({n, ball_size, bound, ok});
        if (!ok && report.all_ok) {
            report.all_ok = false;
            report.first_failing_n = n;
        }
    }
    return report;
}

double auto_fit_constant(const LayeredGraph& g, double epsilon) {
    double c = 0.0;
    long long ball_size = 0;
    for (int n = 0; n <= g.radius(); ++n) {
        ball_size += static_cast<long long>(g.spheres[n].size());
        double denom = std::exp2((1.0 - epsilon) * std::sqrt(static_cast<double>(n)) / 2.0);
        c = std::max(c, static_cast<double>(ball_size) / denom);
    }
    return c;
}

SphereToBallReport sphere_to_ball_diagnostic(const GrowthBudget& budget, int n_max) {
    if (n_max < 1) throw Error(Errc::config, "n_max must be >= 1");
    SphereToBallReport report{budget.epsilon, n_max, std::nullopt};
    const double eps = budget.epsilon;
    long double sum = 0.0L;
    std::optional<int> candidate;
    for (int n = 1; n <= n_max; ++n) {
        sum += std::exp2((long double)((1.0 - eps) * std::sqrt((double)n) / 2.0));
        long double rhs = std::exp2((long double)((1.0 - eps / 2.0) * std::sqrt((double)n) / 2.0));
        if (sum <= rhs) {
            if (!candidate) candidate = n;
        } else {
            candidate = std::nullopt;
        }
    }
    report.threshold_n0 = candidate;
    return report;
}

} // namespace disting
