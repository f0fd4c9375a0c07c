#include "disting/sphere_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "disting/rng.hpp"

namespace disting {

double effective_constant(double c, int m, double epsilon) {
    if (m < 0) throw Error(Errc::config, "effective_constant: m must be >= 0");
    return c * std::exp2((1.0 - epsilon) * std::sqrt(static_cast<double>(m)) / 2.0);
}

long long choose_k(double c_tilde, double epsilon, long long k0, long long ceiling) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::config, "epsilon must be in (0,1)");
    if (!(c_tilde > 0.0)) throw Error(Errc::config, "c_tilde must be positive");
    if (k0 < 0) throw Error(Errc::config, "k0 must be >= 0");
    const double log_c = std::log2(c_tilde);
    const char* last_failed = "none";
    for (long long k = k0 + 1; k <= ceiling; ++k) {
        double sk = std::sqrt(static_cast<double>(k));
        double budget = epsilon * sk / 8.0;
        if (!(log_c < budget)) { last_failed = "log2(c_tilde) < eps*sqrt(k)/8"; continue; }
        if (!(std::log2(static_cast<double>(k)) < budget)) {
            last_failed = "log2(k) < eps*sqrt(k)/8";
            continue;
        }
        if (!(4.0 * sk < 0.5 * epsilon * (1.0 - epsilon / 2.0) * k)) {
            last_failed = "4*sqrt(k) < (1/2)*eps*(1-eps/2)*k";
            continue;
        }
        if (!(c_tilde * sk / 2.0 < (epsilon / 4.0) * k)) {
            last_failed = "c_tilde*sqrt(k)/2 < (eps/4)*k";
            continue;
        }
        return k;
    }
    throw Error(Errc::infeasible, std::string("choose_k ceiling of ") + std::to_string(ceiling) +
                                      " exceeded; last failing inequality: " + last_failed);
}

BlockPlan compute_blocks(const LayeredGraph& g, const SchemeParams& params,
                         const std::unordered_set<int>& colored) {
    const long long k = params.k;
    const int m = params.m;
    const double eps = params.epsilon;
    if (m < 0 || k <= 0) throw Error(Errc::config, "compute_blocks: bad m or k");
    if (static_cast<long long>(m) + k > g.radius())
        throw Error(Errc::infeasible, "truncation too shallow: m + k = " +
                                          std::to_string(m + k) + " exceeds radius " +
                                          std::to_string(g.radius()));

    BlockPlan plan;
    for (long long n = m + 1; n <= m + k; ++n)
        if (!colored.count(static_cast<int>(n))) plan.uncolored.push_back(static_cast<int>(n));
    const long long l = static_cast<long long>(plan.uncolored.size());
    if (static_cast<double>(l) < (1.0 - eps) * static_cast<double>(k))
        throw Error(Errc::infeasible, "too few uncolored spheres: " + std::to_string(l) +
                                          " < (1-eps)*k");

    double sk = std::sqrt(static_cast<double>(k));
    plan.kappa = static_cast<long long>(std::ceil(2.0 * sk * (1.0 - eps / 2.0)));
    plan.r = static_cast<int>(std::ceil((1.0 - eps) * sk / 2.0)) + 1;

    long long remainder = l - static_cast<long long>(plan.r - 1) * plan.kappa;
    if (!(static_cast<double>(remainder) > (eps / 2.0) * (1.0 - eps / 2.0) * k))
        throw Error(Errc::infeasible,
                    "remainder block too small: " + std::to_string(remainder) + " spheres");

    plan.block_spheres.resize(plan.r);
    plan.blocks.resize(plan.r);
    for (long long pos = 0; pos < l; ++pos) {
        int block = static_cast<int>(std::min<long long>(pos / plan.kappa, plan.r - 1));
        int sphere = plan.uncolored[pos];
        plan.block_spheres[block].push_back(sphere);
        const auto& verts = g.spheres[sphere];
        plan.blocks[block].insert(plan.blocks[block].end(), verts.begin(), verts.end());
    }
    for (auto& b : plan.blocks) std::sort(b.begin(), b.end());
    return plan;
}

namespace {

long long threshold_pow2(int i) {
    if (i >= 62) return (1ll << 62);
    return 1ll << i;
}

} // namespace

AutPartition classify(const PermSet& A, const BlockPlan& plan, const LayeredGraph& g) {
    AutPartition partition;
    partition.classes.resize(plan.r);
    const long long l = static_cast<long long>(plan.uncolored.size());

    std::unordered_map<int, long long> pos_of_sphere;
    pos_of_sphere.reserve(plan.uncolored.size() * 2);
    for (long long p = 0; p < l; ++p) pos_of_sphere[plan.uncolored[p]] = p;

    std::vector<long long> motion(l);
    std::vector<long long> suffix_min(l + 1);
    for (std::size_t e = 0; e < A.size(); ++e) {
        const auto& phi = A.elements[e];
        std::fill(motion.begin(), motion.end(), 0);
        for (const auto& [s, d] : phi.moved()) {
            if (!g.has_vertex(s)) continue;
            auto it = pos_of_sphere.find(g.sphere_of(s));
            if (it != pos_of_sphere.end()) ++motion[it->second];
        }
        suffix_min[l] = threshold_pow2(62);
        for (long long p = l - 1; p >= 0; --p)
            suffix_min[p] = std::min(suffix_min[p + 1], motion[p]);

        // phi lands in class i iff some sphere strictly above block i has
        // motion <= 2^i and no smaller i qualifies.
        int cls = plan.r;
        for (int i = 1; i < plan.r; ++i) {
            long long above = std::min<long long>(static_cast<long long>(i) * plan.kappa, l);
            if (suffix_min[above] <= threshold_pow2(i)) {
                cls = i;
                break;
            }
        }

        // Per-block motion invariant: inside its own block every uncolored
        // sphere must see motion above 2^(cls-1).
        long long lo = static_cast<long long>(cls - 1) * plan.kappa;
        long long hi = (cls == plan.r) ? l : std::min<long long>(lo + plan.kappa, l);
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

BlockBoundsReport verify_block_bounds(const PermSet& A, const AutPartition& partition,
                                      const BlockPlan& plan, const SchemeParams& params) {
    BlockBoundsReport report;
    const double eps = params.epsilon;
    const double sk = std::sqrt(static_cast<double>(params.k));
    for (int i = 1; i <= plan.r; ++i) {
        BlockBoundsRow row;
        row.class_index = i;
        const auto& members = partition.classes[i - 1];
        row.class_size = static_cast<long long>(members.size());
        if (members.empty()) {
            row.skipped = true;
            report.rows.push_back(row);
            continue;
        }
        PermSet cls;
        for (std::size_t e : members) cls.elements.push_back(A.elements[e]);
        PermSet restricted = restrict_set(cls, plan.blocks[i - 1]);
        row.restricted_size = static_cast<long long>(restricted.size());
        row.log2_restricted = std::log2(static_cast<double>(row.restricted_size));
        row.motion = *group_motion(cls, plan.blocks[i - 1]);
        if (i < plan.r) {
            row.analytic_log2_bound =
                (1.0 - eps / 2.0) * (sk / 2.0) * std::exp2(static_cast<double>(i));
            row.analytic_motion_bound =
                static_cast<double>(plan.kappa) * std::exp2(static_cast<double>(i - 1));
        } else {
            row.analytic_log2_bound = params.c_tilde * (1.0 - eps / 2.0) * (sk / 2.0) *
                                      std::exp2((1.0 - eps) * sk / 2.0);
            row.analytic_motion_bound = (eps / 2.0) * (1.0 - eps / 2.0) *
                                        static_cast<double>(params.k) *
                                        std::exp2(static_cast<double>(plan.r - 1));
        }
        row.two_log_size = 2.0 * row.log2_restricted;
        row.lemma5_ok = static_cast<double>(row.motion) > row.two_log_size;
        if (!row.lemma5_ok) report.all_nonempty_ok = false;
        report.rows.push_back(row);
    }
    return report;
}

FixrootResult fixroot(const LayeredGraph& g, const PermSet& A_moving, double delta,
                      const SearchStrategy& strategy) {
    if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::config, "delta must be in (0,1)");
    FixrootResult result;
    result.delta = delta;
    if (A_moving.empty()) {
        result.k0 = 0;
        result.stats.strategy = "trivial";
        return result;
    }
    result.k0 = static_cast<long long>(std::ceil(2.0 / delta));
    std::vector<VertexId> support;
    for (long long n = result.k0; n <= g.radius(); n += result.k0) {
        result.colored_spheres.push_back(static_cast<int>(n));
        const auto& verts = g.spheres[n];
        support.insert(support.end(), verts.begin(), verts.end());
    }
    if (support.empty())
        throw Error(Errc::search_failure,
                    "fixroot: no sphere available below radius " + std::to_string(g.radius()) +
                        " at sparsity delta = " + std::to_string(delta));
    try {
        result.coloring =
            find_breaking_coloring(A_moving, support, strategy, /*force=*/true, &result.stats);
    } catch (const Error& e) {
        if (e.code() == Errc::search_failure)
            throw Error(Errc::search_failure,
                        std::string("fixroot: allocated sparse spheres insufficient to break the "
                                    "base-moving set: ") +
                            e.what());
        throw;
    }
    return result;
}

PipelineResult run_pipeline(const LayeredGraph& g, double epsilon, std::optional<double> c_opt,
                            const PipelineOptions& opts, const std::string& family_name) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(Errc::config, "epsilon must be in (0,1)");

    PipelineResult result;
    PipelineReport& report = result.report;
    report.family = family_name;
    report.radius = g.radius();
    report.epsilon = epsilon;
    report.seed = opts.seed;
    report.force = opts.force;
    report.margin = opts.margin;
    report.c_auto = !c_opt.has_value();
    report.c = c_opt ? *c_opt : auto_fit_constant(g, epsilon);

    GrowthCheckReport growth = growth_check(g, {epsilon, report.c});
    if (!growth.all_ok && !opts.force)
        throw Error(Errc::infeasible,
                    "growth check fails first at radius " +
                        std::to_string(*growth.first_failing_n) + "; pass force to proceed");

    result.group = opts.target ? *opts.target : automorphisms(g, opts.group_cap);
    result.group.sort_unique();
    report.group_size = result.group.size();

    std::vector<std::size_t> nontrivial;
    for (std::size_t i = 0; i < result.group.size(); ++i)
        if (!result.group.elements[i].is_identity()) nontrivial.push_back(i);
    if (nontrivial.empty()) {
        report.trivially_distinguishable = true;
        report.final_check = {0, {}};
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

    SearchStrategy fr_strategy = base_strategy;
    fr_strategy.seed = derive_seed(opts.seed, 0xf1c, 0);
    FixrootResult fr = fixroot(g, moving, epsilon / 2.0, fr_strategy);
    result.coloring = fr.coloring;
    report.fixroot_k0 = fr.k0;
    report.fixroot_spheres = fr.colored_spheres;
    report.fixroot_stats = fr.stats;
    std::unordered_set<int> colored(fr.colored_spheres.begin(), fr.colored_spheres.end());

    int m = 0;
    report.m_final = 0;
    for (;;) {
        SchemeParams params;
        params.epsilon = epsilon;
        params.c = report.c;
        params.delta = epsilon / 2.0;
        params.m = m;
        params.k0 = fr.k0;
        params.c_tilde = effective_constant(report.c, m, epsilon);
        params.k = choose_k(params.c_tilde, epsilon, fr.k0, opts.choose_k_ceiling);
        if (static_cast<long long>(m) + params.k > g.radius() - opts.margin) break;

        BlockPlan plan = compute_blocks(g, params, colored);

        PermSet targets;
        targets.cap = stab.cap;
        const auto& sphere_m = g.spheres[m];
        for (const auto& p : stab.elements)
            if (p.restricted_motion(sphere_m) > 0) targets.elements.push_back(p);

        IterationRecord rec;
        rec.m = m;
        rec.c_tilde = params.c_tilde;
        rec.k = params.k;
        rec.kappa = plan.kappa;
        rec.r = plan.r;
        rec.uncolored_count = static_cast<long long>(plan.uncolored.size());
        rec.target_count = static_cast<long long>(targets.size());

        AutPartition partition = classify(targets, plan, g);
        rec.excluded = partition.excluded;
        for (const auto& cls : partition.classes)
            rec.class_sizes.push_back(static_cast<long long>(cls.size()));
        rec.bounds = verify_block_bounds(targets, partition, plan, params);

        for (int i = 1; i <= plan.r; ++i) {
            const auto& members = partition.classes[i - 1];
            if (members.empty()) continue;
            PermSet cls;
            for (std::size_t e : members) cls.elements.push_back(targets.elements[e]);
            SearchStrategy strat = base_strategy;
            strat.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(m),
                                     static_cast<std::uint64_t>(i));
            SearchStats stats;
            PartialColoring block_coloring =
                find_breaking_coloring(cls, plan.blocks[i - 1], strat, /*force=*/true, &stats);
            rec.searches.push_back(stats);
            result.coloring.merge(block_coloring);
        }
        report.iterations.push_back(std::move(rec));
        report.m_final = m;
        m += static_cast<int>(params.k);
    }

    // Every nontrivial element moving a vertex within the processed range must
    // be broken by the accumulated coloring.
    for (std::size_t i : nontrivial) {
        const auto& p = result.group.elements[i];
        bool in_range = false;
        for (const auto& [s, d] : p.moved()) {
            if (g.has_vertex(s) && g.sphere_of(s) <= report.m_final) {
                in_range = true;
                break;
            }
        }
        if (!in_range) continue;
        ++report.final_check.checked;
        if (preserves_partial(p, result.coloring)) report.final_check.survivors.push_back(i);
    }
    return result;
}

} // namespace disting
