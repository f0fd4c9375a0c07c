#include "disting/json_io.hpp"

#include <fstream>

#include "disting/errors.hpp"

namespace disting {

Json to_json(const LayeredGraph& g) {
    Json j;
    j["base"] = g.base;
    j["spheres"] = g.spheres;
    Json edges = Json::array();
    for (const auto& [u, v] : g.edges) edges.push_back(Json::array({u, v}));
    j["edges"] = std::move(edges);
    return j;
}

LayeredGraph graph_from_json(const Json& j) {
    LayeredGraph g;
    try {
        g.base = j.at("base").get<VertexId>();
        g.spheres = j.at("spheres").get<std::vector<std::vector<VertexId>>>();
        for (const auto& e : j.at("edges"))
            g.edges.emplace_back(e.at(0).get<VertexId>(), e.at(1).get<VertexId>());
    } catch (const Json::exception& e) {
        throw Error(Errc::config, std::string("malformed graph JSON: ") + e.what());
    }
    g.finalize();
    return g;
}

Json to_json(const Permutation& p) {
    Json j = Json::object();
    for (const auto& [s, d] : p.moved()) j[std::to_string(s)] = d;
    return j;
}

Json to_json(const PermSet& A) {
    Json j = Json::array();
    for (const auto& p : A.elements) j.push_back(to_json(p));
    return j;
}

Json to_json(const PartialColoring& c) {
    Json j;
    j["support"] = c.support;
    Json black = Json::array();
    for (std::size_t i = 0; i < c.support.size(); ++i)
        if (!c.white[i]) black.push_back(c.support[i]);
    j["black"] = std::move(black);
    return j;
}

PartialColoring coloring_from_json(const Json& j) {
    PartialColoring c;
    try {
        c.support = j.at("support").get<std::vector<VertexId>>();
        std::vector<VertexId> black = j.at("black").get<std::vector<VertexId>>();
        c.white.assign(c.support.size(), 1);
        for (VertexId v : black) {
            auto it = std::lower_bound(c.support.begin(), c.support.end(), v);
            if (it == c.support.end() || *it != v)
                throw Error(Errc::config, "black vertex outside coloring support");
            c.white[static_cast<std::size_t>(it - c.support.begin())] = 0;
        }
    } catch (const Json::exception& e) {
        throw Error(Errc::config, std::string("malformed coloring JSON: ") + e.what());
    }
    return c;
}

Json to_json(const ComponentTree& tree) {
    Json j;
    j["levels"] = tree.levels;
    Json nodes = Json::array();
    for (const auto& node : tree.nodes) {
        Json n;
        n["level"] = node.level;
        n["vertices"] = node.vertices;
        n["parent"] = node.parent;
        nodes.push_back(std::move(n));
    }
    j["nodes"] = std::move(nodes);
    return j;
}

Json to_json(const SearchStats& s) {
    Json j;
    j["strategy"] = s.strategy;
    j["tries"] = s.tries;
    j["survivors_last_try"] = s.survivors_last_try;
    return j;
}

Json to_json(const BlockBoundsReport& r) {
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json j;
        j["class"] = row.class_index;
        j["class_size"] = row.class_size;
        j["skipped"] = row.skipped;
        if (!row.skipped) {
            j["restricted_size"] = row.restricted_size;
            j["log2_restricted"] = row.log2_restricted;
            j["analytic_log2_bound"] = row.analytic_log2_bound;
            j["motion"] = row.motion;
            j["analytic_motion_bound"] = row.analytic_motion_bound;
            j["two_log_size"] = row.two_log_size;
            j["lemma5_ok"] = row.lemma5_ok;
        }
        rows.push_back(std::move(j));
    }
    Json j;
    j["rows"] = std::move(rows);
    j["all_nonempty_ok"] = r.all_nonempty_ok;
    return j;
}

Json to_json(const IterationRecord& rec) {
    Json j;
    j["m"] = rec.m;
    j["c_tilde"] = rec.c_tilde;
    j["k"] = rec.k;
    j["kappa"] = rec.kappa;
    j["r"] = rec.r;
    j["uncolored_count"] = rec.uncolored_count;
    j["target_count"] = rec.target_count;
    j["class_sizes"] = rec.class_sizes;
    Json margins = Json::array();
    for (const auto& row : rec.bounds.rows) {
        if (row.skipped) continue;
        Json m;
        m["class"] = row.class_index;
        m["motion"] = row.motion;
        m["two_log_size"] = row.two_log_size;
        margins.push_back(std::move(m));
    }
    j["bound_margins"] = std::move(margins);
    j["bounds"] = to_json(rec.bounds);
    Json searches = Json::array();
    for (const auto& s : rec.searches) searches.push_back(to_json(s));
    j["search"] = std::move(searches);
    j["excluded"] = rec.excluded;
    return j;
}

namespace {

Json final_check_json(const FinalVerification& f) {
    Json j;
    j["checked"] = f.checked;
    j["survivors"] = f.survivors;
    return j;
}

} // namespace

Json to_json(const PipelineReport& r) {
    Json j;
    j["family"] = r.family;
    j["radius"] = r.radius;
    j["epsilon"] = r.epsilon;
    j["c"] = r.c;
    j["c_auto"] = r.c_auto;
    j["seed"] = r.seed;
    j["force"] = r.force;
    j["margin"] = r.margin;
    j["group_size"] = r.group_size;
    j["stabilizer_size"] = r.stabilizer_size;
    j["trivially_distinguishable"] = r.trivially_distinguishable;
    j["fixroot"] = {{"k0", r.fixroot_k0},
                    {"spheres", r.fixroot_spheres},
                    {"search", to_json(r.fixroot_stats)}};
    Json iterations = Json::array();
    for (const auto& rec : r.iterations) iterations.push_back(to_json(rec));
    j["iterations"] = std::move(iterations);
    j["m_final"] = r.m_final;
    j["final_verification"] = final_check_json(r.final_check);
    return j;
}

Json to_json(const Theorem9Report& r) {
    Json j;
    j["family"] = r.family;
    j["radius"] = r.radius;
    j["epsilon"] = r.epsilon;
    j["c_auto"] = r.c_auto;
    j["c_per_end"] = r.c_per_end;
    Json growth = Json::array();
    for (const auto& row : r.chain_growth)
        growth.push_back({{"chain", row.chain}, {"c_fit", row.c_fit}, {"ok", row.ok}});
    j["chain_growth"] = std::move(growth);
    j["seed"] = r.seed;
    j["force"] = r.force;
    j["margin"] = r.margin;
    j["group_size"] = r.group_size;
    j["stabilizer_size"] = r.stabilizer_size;
    j["trivially_distinguishable"] = r.trivially_distinguishable;
    j["fixroot"] = {{"k0", r.fixroot_k0},
                    {"spheres", r.fixroot_spheres},
                    {"search", to_json(r.fixroot_stats)}};
    j["levels"] = r.levels;
    j["nodes_per_level"] = r.nodes_per_level;
    j["num_chains"] = r.num_chains;
    j["mover_count"] = r.mover_count;
    j["fixer_count"] = r.fixer_count;
    j["end_break_search"] = to_json(r.end_break_stats);
    j["schedule"] = {{"num_ends", r.schedule.num_ends}, {"f", r.schedule.f}};
    Json iterations = Json::array();
    for (const auto& rec : r.iterations) {
        Json step;
        step["step"] = rec.step;
        step["chain"] = rec.chain;
        step["iteration"] = to_json(rec.iteration);
        iterations.push_back(std::move(step));
    }
    j["iterations"] = std::move(iterations);
    j["m_final"] = r.m_final;
    j["final_verification"] = final_check_json(r.final_check);
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::config, "cannot open for writing: " + path);
    out << dump(j);
    if (!out) throw Error(Errc::config, "write failed: " + path);
}

Json read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::config, "cannot open for reading: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(Errc::config, std::string("malformed JSON in ") + path + ": " + e.what());
    }
}

} // namespace disting
