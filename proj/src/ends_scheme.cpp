#include "disting/ends_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "disting/rng.hpp"

namespace disting {

namespace {

// Components of the induced subgraph on vertices at distance >= n, in
// deterministic discovery order (spheres ascending, stored vertex order).
std::vector<std::vector<VertexId>> outer_components(const LayeredGraph& g, int n,
                                                    std::unordered_map<VertexId, int>* comp_of) {
    std::vector<std::vector<VertexId>> comps;
    std::unordered_map<VertexId, int> local;
    auto& assign = comp_of ? *comp_of : local;
    for (int s = n; s <= g.radius(); ++s) {
        for (VertexId v : g.spheres[s]) {
            if (assign.count(v)) continue;
            int id = static_cast<int>(comps.size());
            comps.emplace_back();
            std::deque<VertexId> queue{v};
            assign[v] = id;
            while (!queue.empty()) {
                VertexId u = queue.front();
                queue.pop_front();
                comps[id].push_back(u);
                for (VertexId w : g.neighbors(u)) {
                    if (g.sphere_of(w) < n || assign.count(w)) continue;
                    assign[w] = id;
                    queue.push_back(w);
                }
            }
        }
    }
    return comps;
}

long long threshold_pow2(int i) {
    if (i >= 62) return (1ll << 62);
    return 1ll << i;
}

} // namespace

ComponentTree component_tree(const LayeredGraph& g, double epsilon,
                             const std::unordered_set<int>& exclude) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::config, "epsilon must be in (0,1)");
    const int gap = static_cast<int>(std::ceil(4.0 / epsilon)) + 1;
    std::vector<int> levels;
    for (int n = gap; n < g.radius(); n += gap) {
        while (n < g.radius() && exclude.count(n)) ++n;
        if (n >= g.radius()) break;
        levels.push_back(n);
    }
    if (levels.size() < 2)
        throw Error(Errc::config,
                    "radius " + std::to_string(g.radius()) +
                        " too small for two component-tree levels at gap " + std::to_string(gap));
    return component_tree_at_levels(g, std::move(levels));
}

ComponentTree component_tree_at_levels(const LayeredGraph& g, std::vector<int> levels) {
    if (levels.size() < 2) throw Error(Errc::config, "need at least two component-tree levels");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] <= 0 || levels[i] >= g.radius())
            throw Error(Errc::config, "level " + std::to_string(levels[i]) +
                                          " outside (0, radius)");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw Error(Errc::config, "levels must be strictly increasing");
    }
    ComponentTree tree;
    tree.root = g.base;
    tree.levels = std::move(levels);

    std::unordered_map<VertexId, int> prev_node_of; // vertex -> node index, previous level
    for (std::size_t li = 0; li < tree.levels.size(); ++li) {
        int n = tree.levels[li];
        std::unordered_map<VertexId, int> comp_of;
        auto comps = outer_components(g, n, &comp_of);
        tree.nodes_at_level.emplace_back();
        std::unordered_map<VertexId, int> node_of;
        std::size_t covered = 0;
        for (const auto& comp : comps) {
            ComponentNode node;
            node.level = static_cast<int>(li);
            for (VertexId v : comp)
                if (g.sphere_of(v) == n) node.vertices.push_back(v);
            std::sort(node.vertices.begin(), node.vertices.end());
            if (node.vertices.empty())
                throw Error(Errc::config, "component at level " + std::to_string(n) +
                                              " misses its sphere");
            if (li > 0) node.parent = prev_node_of.at(node.vertices.front());
            int idx = static_cast<int>(tree.nodes.size());
            covered += node.vertices.size();
            tree.nodes_at_level.back().push_back(idx);
            tree.nodes.push_back(std::move(node));
        }
        if (covered != g.spheres[n].size())
            throw Error(Errc::config, "component nodes do not partition sphere " +
                                          std::to_string(n));
        prev_node_of.clear();
        for (const auto& [v, c] : comp_of) prev_node_of[v] = tree.nodes_at_level.back()[c];
    }

    for (int leaf : tree.nodes_at_level.back()) {
        std::vector<int> chain;
        for (int idx = leaf; idx != -1; idx = tree.nodes[idx].parent) chain.push_back(idx);
        std::reverse(chain.begin(), chain.end());
        tree.chains.push_back(std::move(chain));
    }
    return tree;
}

std::vector<VertexId> chain_sphere(const LayeredGraph& g, const ComponentTree& tree, int chain,
                                   int n) {
    if (chain < 0 || chain >= static_cast<int>(tree.chains.size()))
        throw Error(Errc::config, "chain index out of range");
    const ComponentNode& leaf = tree.nodes[tree.chains[chain].back()];
    int leaf_level = tree.levels[leaf.level];
    if (n <= 0 || n > leaf_level)
        throw Error(Errc::config, "chain_sphere defined for 0 < n <= leaf level " +
                                      std::to_string(leaf_level));
    std::unordered_map<VertexId, int> comp_of;
    outer_components(g, n, &comp_of);
    int target = comp_of.at(leaf.vertices.front());
    std::vector<VertexId> result;
    for (VertexId v : g.spheres[n])
        if (comp_of.at(v) == target) result.push_back(v);
    return result;
}

EndSplit end_fixing_split(const PermSet& A, const ComponentTree& tree) {
    EndSplit split;
    split.fixers.cap = split.movers.cap = A.cap;
    for (std::size_t e = 0; e < A.size(); ++e) {
        const auto& phi = A.elements[e];
        bool mover = false;
        for (std::size_t li = 0; li < tree.levels.size() && !mover; ++li) {
            std::vector<VertexId> sphere;
            for (int idx : tree.nodes_at_level[li]) {
                const auto& verts = tree.nodes[idx].vertices;
                sphere.insert(sphere.end(), verts.begin(), verts.end());
            }
            std::sort(sphere.begin(), sphere.end());
            if (!phi.fixes_setwise(sphere))
                throw Error(Errc::config, "element " + std::to_string(e) +
                                              " does not fix level sphere " +
                                              std::to_string(tree.levels[li]) + " setwise");
            for (int idx : tree.nodes_at_level[li]) {
                const auto& verts = tree.nodes[idx].vertices;
                std::vector<VertexId> image;
                image.reserve(verts.size());
                for (VertexId v : verts) image.push_back(phi.apply(v));
                std::sort(image.begin(), image.end());
                if (image != verts) {
                    mover = true;
                    break;
                }
            }
        }
        if (mover) {
            split.movers.elements.push_back(phi);
            split.mover_indices.push_back(e);
        } else {
            split.fixers.elements.push_back(phi);
        }
    }
    return split;
}

PartialColoring break_end_movers(const PermSet& movers, const ComponentTree& tree,
                                 const LayeredGraph& g, const SearchStrategy& strategy,
                                 SearchStats* stats) {
    if (movers.empty()) {
        if (stats) *stats = {"trivial", 0, 0};
        return {};
    }
    std::vector<VertexId> support;
    for (int n : tree.levels) {
        const auto& verts = g.spheres[n];
        support.insert(support.end(), verts.begin(), verts.end());
    }
    return find_breaking_coloring(movers, support, strategy, /*force=*/true, stats);
}

Schedule make_schedule(int num_ends, int horizon) {
    if (num_ends < 0 || horizon < 0) throw Error(Errc::config, "bad schedule parameters");
    Schedule s;
    s.num_ends = num_ends;
    if (num_ends > 0)
        for (int t = 0; t < horizon; ++t) s.f.push_back(t % num_ends);
    return s;
}

namespace {

// Per-chain analogue of classify: motion measured on the chain's node subsets.
AutPartition classify_sets(const PermSet& A, const std::vector<std::vector<VertexId>>& sets,
                           long long kappa, int r) {
    AutPartition partition;
    partition.classes.resize(r);
    const long long l = static_cast<long long>(sets.size());
    std::vector<long long> motion(l);
    std::vector<long long> suffix_min(l + 1);
    for (std::size_t e = 0; e < A.size(); ++e) {
        const auto& phi = A.elements[e];
        for (long long p = 0; p < l; ++p) motion[p] = phi.restricted_motion(sets[p]);
        suffix_min[l] = threshold_pow2(62);
        for (long long p = l - 1; p >= 0; --p)
            suffix_min[p] = std::min(suffix_min[p + 1], motion[p]);
        int cls = r;
        for (int i = 1; i < r; ++i) {
            long long above = std::min<long long>(static_cast<long long>(i) * kappa, l);
            if (suffix_min[above] <= threshold_pow2(i)) {
                cls = i;
                break;
            }
        }
        long long lo = static_cast<long long>(cls - 1) * kappa;
        long long hi = (cls == r) ? l : std::min<long long>(lo + kappa, l);
        bool ok = true;
        for (long long p = lo; p < hi && ok; ++p)
            if (motion[p] <= threshold_pow2(cls - 1)) ok = false;
        if (ok)
            partition.classes[cls - 1].push_back(e);
        else
            partition.excluded.push_back(e);
    }
    return partition;
}

} // namespace

Theorem9Result theorem9_pipeline(const LayeredGraph& g, double epsilon,
                                 std::optional<double> c_per_end, const PipelineOptions& opts,
                                 const std::string& family_name,
                                 const std::optional<std::vector<int>>& levels) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::config, "epsilon must be in (0,1)");

    Theorem9Result result;
    Theorem9Report& report = result.report;
    report.family = family_name;
    report.radius = g.radius();
    report.epsilon = epsilon;
    report.seed = opts.seed;
    report.force = opts.force;
    report.margin = opts.margin;
    report.c_auto = !c_per_end.has_value();
    report.c_per_end = c_per_end.value_or(0.0);

    result.group = opts.target ? *opts.target : automorphisms(g, opts.group_cap);
    result.group.sort_unique();
    report.group_size = result.group.size();

    std::vector<std::size_t> nontrivial;
    for (std::size_t i = 0; i < result.group.size(); ++i)
        if (!result.group.elements[i].is_identity()) nontrivial.push_back(i);
    if (nontrivial.empty()) {
        report.trivially_distinguishable = true;
        return result;
    }

    PermSet moving, stab;
    moving.cap = stab.cap = result.group.cap;
    std::vector<std::size_t> stab_index;
    for (std::size_t i : nontrivial) {
        const auto& p = result.group.elements[i];
        if (p.apply(g.base) != g.base) {
            moving.elements.push_back(p);
        } else {
            stab.elements.push_back(p);
            stab_index.push_back(i);
        }
    }
    report.stabilizer_size = stab.size();

    SearchStrategy base_strategy;
    base_strategy.kind = SearchStrategy::Kind::Auto;
    base_strategy.exhaustive_limit = opts.exhaustive_limit;
    base_strategy.max_tries = opts.max_tries;

    // Phase 1: sparse base breaking at delta = epsilon/4, then end movers.
    SearchStrategy fr_strategy = base_strategy;
    fr_strategy.seed = derive_seed(opts.seed, 0xe4d, 0);
    FixrootResult fr = fixroot(g, moving, epsilon / 4.0, fr_strategy);
    result.coloring = fr.coloring;
    report.fixroot_k0 = fr.k0;
    report.fixroot_spheres = fr.colored_spheres;
    report.fixroot_stats = fr.stats;
    std::unordered_set<int> colored(fr.colored_spheres.begin(), fr.colored_spheres.end());

    result.tree = levels ? component_tree_at_levels(g, *levels)
                         : component_tree(g, epsilon, colored);
    report.levels = result.tree.levels;
    for (const auto& level_nodes : result.tree.nodes_at_level)
        report.nodes_per_level.push_back(static_cast<long long>(level_nodes.size()));
    report.num_chains = static_cast<int>(result.tree.chains.size());

    // Per-chain growth audit against the (supplied or fitted) constant.
    std::vector<double> chain_c;
    bool growth_ok = true;
    for (int j = 0; j < report.num_chains; ++j) {
        ChainGrowthRow row;
        row.chain = j;
        double fit = 0.0;
        for (int idx : result.tree.chains[j]) {
            const auto& node = result.tree.nodes[idx];
            int n = result.tree.levels[node.level];
            double denom = std::exp2((1.0 - epsilon) * std::sqrt(static_cast<double>(n)) / 2.0);
            fit = std::max(fit, static_cast<double>(node.vertices.size()) / denom);
        }
        row.c_fit = fit;
        row.ok = !c_per_end || fit <= *c_per_end;
        if (!row.ok) growth_ok = false;
        chain_c.push_back(c_per_end ? *c_per_end : fit);
        report.chain_growth.push_back(row);
    }
    if (!growth_ok && !opts.force)
        throw Error(Errc::infeasible,
                    "per-chain growth bound fails for the supplied constant; pass force");

    EndSplit split = end_fixing_split(stab, result.tree);
    report.mover_count = split.movers.size();
    report.fixer_count = split.fixers.size();
    SearchStrategy end_strategy = base_strategy;
    end_strategy.seed = derive_seed(opts.seed, 0xe4d, 1);
    PartialColoring end_coloring =
        break_end_movers(split.movers, result.tree, g, end_strategy, &report.end_break_stats);
    result.coloring.merge(end_coloring);
    if (!split.movers.empty())
        for (int n : result.tree.levels) colored.insert(n);

    // Phase 2: round-robin per-chain sphere-block iterations.
    report.schedule = make_schedule(report.num_chains, 2 * report.num_chains);
    std::vector<int> chain_m(report.num_chains, 0);
    std::vector<char> chain_done(report.num_chains, 0);
    std::vector<int> chain_last(report.num_chains, 0);
    for (std::size_t step = 0; step < report.schedule.f.size(); ++step) {
        int j = report.schedule.f[step];
        if (chain_done[j]) continue;
        int leaf_level = result.tree.levels[result.tree.nodes[result.tree.chains[j].back()].level];
        int horizon = std::min(leaf_level, g.radius() - opts.margin);

        SchemeParams params;
        params.epsilon = epsilon;
        params.c = chain_c[j];
        params.delta = epsilon / 4.0;
        params.m = chain_m[j];
        params.k0 = fr.k0;
        params.c_tilde = effective_constant(chain_c[j], chain_m[j], epsilon);
        params.k = choose_k(params.c_tilde, epsilon, fr.k0, opts.choose_k_ceiling);
        if (static_cast<long long>(chain_m[j]) + params.k > horizon) {
            chain_done[j] = 1;
            continue;
        }

        std::vector<int> uncolored;
        std::vector<std::vector<VertexId>> sets;
        for (long long n = chain_m[j] + 1; n <= chain_m[j] + params.k; ++n) {
            if (colored.count(static_cast<int>(n))) continue;
            uncolored.push_back(static_cast<int>(n));
            sets.push_back(chain_sphere(g, result.tree, j, static_cast<int>(n)));
        }
        const long long l = static_cast<long long>(uncolored.size());
        if (static_cast<double>(l) < (1.0 - epsilon) * static_cast<double>(params.k))
            throw Error(Errc::infeasible, "chain " + std::to_string(j) +
                                              ": too few uncolored spheres in the window");
        double sk = std::sqrt(static_cast<double>(params.k));
        long long kappa = static_cast<long long>(std::ceil(2.0 * sk * (1.0 - epsilon / 2.0)));
        int r = static_cast<int>(std::ceil((1.0 - epsilon) * sk / 2.0)) + 1;
        long long remainder = l - static_cast<long long>(r - 1) * kappa;
        if (!(static_cast<double>(remainder) >
              (epsilon / 2.0) * (1.0 - epsilon / 2.0) * params.k))
            throw Error(Errc::infeasible,
                        "chain " + std::to_string(j) + ": remainder block too small");

        BlockPlan plan;
        plan.uncolored = uncolored;
        plan.kappa = kappa;
        plan.r = r;
        plan.block_spheres.resize(r);
        plan.blocks.resize(r);
        for (long long pos = 0; pos < l; ++pos) {
            int block = static_cast<int>(std::min<long long>(pos / kappa, r - 1));
            plan.block_spheres[block].push_back(uncolored[pos]);
            plan.blocks[block].insert(plan.blocks[block].end(), sets[pos].begin(),
                                      sets[pos].end());
        }
        for (auto& b : plan.blocks) std::sort(b.begin(), b.end());

        std::vector<VertexId> entry = chain_m[j] == 0
                                          ? std::vector<VertexId>{g.base}
                                          : chain_sphere(g, result.tree, j, chain_m[j]);
        std::sort(entry.begin(), entry.end());
        PermSet targets;
        targets.cap = stab.cap;
        for (const auto& p : split.fixers.elements)
            if (p.restricted_motion(entry) > 0) targets.elements.push_back(p);

        EndIterationRecord rec;
        rec.step = static_cast<int>(step);
        rec.chain = j;
        rec.iteration.m = chain_m[j];
        rec.iteration.c_tilde = params.c_tilde;
        rec.iteration.k = params.k;
        rec.iteration.kappa = kappa;
        rec.iteration.r = r;
        rec.iteration.uncolored_count = l;
        rec.iteration.target_count = static_cast<long long>(targets.size());

        AutPartition partition = classify_sets(targets, sets, kappa, r);
        rec.iteration.excluded = partition.excluded;
        for (const auto& cls : partition.classes)
            rec.iteration.class_sizes.push_back(static_cast<long long>(cls.size()));
        rec.iteration.bounds = verify_block_bounds(targets, partition, plan, params);

        for (int i = 1; i <= r; ++i) {
            const auto& members = partition.classes[i - 1];
            if (members.empty()) continue;
            PermSet cls;
            for (std::size_t e : members) cls.elements.push_back(targets.elements[e]);
            SearchStrategy strat = base_strategy;
            strat.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(step),
                                     static_cast<std::uint64_t>(i));
            SearchStats stats;
            PartialColoring block_coloring =
                find_breaking_coloring(cls, plan.blocks[i - 1], strat, /*force=*/true, &stats);
            rec.iteration.searches.push_back(stats);
            result.coloring.merge(block_coloring);
        }
        report.iterations.push_back(std::move(rec));
        chain_last[j] = chain_m[j];
        chain_m[j] += static_cast<int>(params.k);
    }
    report.m_final = report.num_chains == 0
                         ? 0
                         : *std::min_element(chain_last.begin(), chain_last.end());

    std::unordered_set<std::size_t> mover_group_idx;
    for (std::size_t mi : split.mover_indices) mover_group_idx.insert(stab_index[mi]);
    for (std::size_t i : nontrivial) {
        const auto& p = result.group.elements[i];
        bool check = p.apply(g.base) != g.base || mover_group_idx.count(i) > 0;
        if (!check)
            for (const auto& [s, d] : p.moved())
                if (g.has_vertex(s) && g.sphere_of(s) <= report.m_final) {
                    check = true;
                    break;
                }
        if (!check) continue;
        ++report.final_check.checked;
        if (preserves_partial(p, result.coloring)) report.final_check.survivors.push_back(i);
    }
    return result;
}

} // namespace disting
