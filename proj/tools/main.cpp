// Command-line front end: graph generation, breaking pipelines, structural
// lemma checks, and motion-engine experiments, all emitting JSON reports.
#include <algorithm>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "disting/ends_scheme.hpp"
#include "disting/json_io.hpp"
#include "disting/motion_engine.hpp"
#include "disting/perm_group.hpp"
#include "disting/rng.hpp"
#include "disting/sphere_scheme.hpp"

namespace {

using disting::Json;

struct CommonArgs {
    std::string family = "line";
    std::string graph_path;
    int radius = 10;
    double epsilon = 0.5;
    std::string c_mode = "auto";
    std::uint64_t seed = 0;
    bool force = false;
    int margin = 1;
    std::string report_path;
    std::string coloring_path;
};

void add_graph_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--family", args.family,
                    "graph family: line | two-way-ladder | grid2d | regular-tree(d)");
    cmd->add_option("--graph", args.graph_path, "layered graph JSON file (overrides --family)");
    cmd->add_option("--radius", args.radius, "truncation radius");
}

void add_run_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--epsilon", args.epsilon, "growth parameter in (0,1)")->required();
    cmd->add_option("--c", args.c_mode, "growth constant: auto or a positive value");
    cmd->add_option("--seed", args.seed, "seed for all randomized searches");
    cmd->add_flag("--force", args.force, "proceed past growth-check refusals");
    cmd->add_option("--margin", args.margin, "boundary margin (spheres excluded at the rim)");
    cmd->add_option("--report", args.report_path, "write the run report JSON here");
    cmd->add_option("--coloring", args.coloring_path, "write the final coloring JSON here");
}

disting::LayeredGraph load_graph(const CommonArgs& args, std::string* family_name) {
    if (!args.graph_path.empty()) {
        *family_name = args.graph_path;
        return disting::graph_from_json(disting::read_file(args.graph_path));
    }
    auto spec = disting::FamilySpec::parse(args.family);
    *family_name = spec.name();
    if (args.radius < 1) throw disting::Error(disting::Errc::config, "radius must be >= 1");
    return disting::generate(spec, args.radius);
}

std::optional<double> parse_c(const std::string& mode) {
    if (mode == "auto") return std::nullopt;
    try {
        std::size_t pos = 0;
        double v = std::stod(mode, &pos);
        if (pos != mode.size() || !(v > 0.0)) throw std::invalid_argument(mode);
        return v;
    } catch (const std::exception&) {
        throw disting::Error(disting::Errc::config, "--c expects 'auto' or a positive number");
    }
}

void emit(const CommonArgs& args, const Json& report, const Json& coloring) {
    if (!args.report_path.empty()) disting::write_file(args.report_path, report);
    if (!args.coloring_path.empty()) disting::write_file(args.coloring_path, coloring);
    if (args.report_path.empty() && args.coloring_path.empty()) std::cout << disting::dump(report);
}

int run_pipeline_cmd(const CommonArgs& args) {
    std::string family;
    auto g = load_graph(args, &family);
    disting::PipelineOptions opts;
    opts.seed = args.seed;
    opts.force = args.force;
    opts.margin = args.margin;
    auto res = disting::run_pipeline(g, args.epsilon, parse_c(args.c_mode), opts, family);
    emit(args, disting::to_json(res.report), disting::to_json(res.coloring));
    std::cerr << "pipeline: group " << res.report.group_size << ", checked "
              << res.report.final_check.checked << ", survivors "
              << res.report.final_check.survivors.size() << "\n";
    return 0;
}

int run_ends_cmd(const CommonArgs& args, const std::string& levels_arg) {
    std::string family;
    auto g = load_graph(args, &family);
    disting::PipelineOptions opts;
    opts.seed = args.seed;
    opts.force = args.force;
    opts.margin = args.margin;
    std::optional<std::vector<int>> levels;
    if (levels_arg != "auto") {
        levels.emplace();
        std::string token;
        for (char ch : levels_arg + ",") {
            if (ch == ',') {
                if (!token.empty()) levels->push_back(std::stoi(token));
                token.clear();
            } else {
                token += ch;
            }
        }
        if (levels->empty())
            throw disting::Error(disting::Errc::config, "--levels expects 'auto' or n1,n2,...");
    }
    auto res =
        disting::theorem9_pipeline(g, args.epsilon, parse_c(args.c_mode), opts, family, levels);
    Json report = disting::to_json(res.report);
    report["component_tree"] = disting::to_json(res.tree);
    emit(args, report, disting::to_json(res.coloring));
    std::cerr << "ends: chains " << res.report.num_chains << ", movers " << res.report.mover_count
              << ", survivors " << res.report.final_check.survivors.size() << "\n";
    return 0;
}

int run_lemma_check(const CommonArgs& args) {
    std::string family;
    auto g = load_graph(args, &family);
    auto group = disting::automorphisms(g);
    auto stab = disting::stabilizer(group, g.base);
    auto lemma4 = disting::check_lemma4(stab, g, args.margin);

    Json j;
    j["family"] = family;
    j["radius"] = g.radius();
    j["group_size"] = group.size();
    j["stabilizer_size"] = stab.size();
    Json l4;
    Json sphere_fix = Json::array(), propagation = Json::array(), restriction = Json::array();
    for (const auto& v : lemma4.sphere_fix)
        sphere_fix.push_back({{"element", v.element}, {"sphere", v.sphere}});
    for (const auto& v : lemma4.propagation)
        propagation.push_back({{"element", v.element},
                               {"from_sphere", v.from_sphere},
                               {"dead_sphere", v.dead_sphere}});
    for (const auto& v : lemma4.restriction_equality)
        restriction.push_back(
            {{"element_a", v.element_a}, {"element_b", v.element_b}, {"sphere", v.sphere}});
    l4["sphere_fix_violations"] = std::move(sphere_fix);
    l4["propagation_violations"] = std::move(propagation);
    l4["restriction_violations"] = std::move(restriction);
    l4["clean"] = lemma4.clean();
    j["lemma4"] = std::move(l4);

    Json per_element = Json::array();
    for (std::size_t i = 0; i < stab.size(); ++i) {
        const auto& phi = stab.elements[i];
        if (phi.is_identity()) continue;
        auto comps = disting::fixed_point_components(phi, g);
        Json e;
        e["element"] = i;
        e["components"] = comps.components.size();
        e["all_touch_outermost"] = comps.all_touch_outermost;
        Json witnesses = Json::array();
        for (std::size_t c = 0; c < comps.components.size(); ++c) {
            Json w;
            w["component"] = c;
            if (comps.touches_outermost[c]) {
                auto ray = disting::disjoint_ray_witness(phi, g, comps.components[c]);
                w["witness_found"] = ray.has_value();
                if (ray) {
                    w["anchor"] = ray->anchor;
                    w["path"] = ray->path;
                }
            } else {
                w["witness_found"] = false;
            }
            witnesses.push_back(std::move(w));
        }
        e["ray_witnesses"] = std::move(witnesses);
        per_element.push_back(std::move(e));
    }
    j["fixed_point_components"] = std::move(per_element);
    emit(args, j, Json::object());
    std::cerr << "lemma-check: lemma4 " << (lemma4.clean() ? "clean" : "violations found")
              << "\n";
    return 0;
}

int run_motion_lab(const CommonArgs& args, int instances, int domain_size, int set_size) {
    if (domain_size < 2 || domain_size > 16)
        throw disting::Error(disting::Errc::config, "--domain must be in [2,16]");
    if (instances < 1 || set_size < 1)
        throw disting::Error(disting::Errc::config, "--instances and --set-size must be >= 1");

    std::vector<disting::VertexId> verts(domain_size);
    for (int i = 0; i < domain_size; ++i) verts[i] = i;
    auto domain = disting::make_domain(verts);

    Json runs = Json::array();
    int identity_ok = 0, bound_holds = 0, search_ok = 0;
    for (int t = 0; t < instances; ++t) {
        std::mt19937_64 rng(disting::derive_seed(args.seed, static_cast<std::uint64_t>(t)));
        disting::PermSet A;
        for (int s = 0; s < set_size; ++s) {
            std::vector<disting::VertexId> image = verts;
            std::shuffle(image.begin(), image.end(), rng);
            std::map<disting::VertexId, disting::VertexId> mapping;
            for (int i = 0; i < domain_size; ++i) mapping[verts[i]] = image[i];
            auto p = disting::Permutation::from_mapping(domain, mapping);
            if (!p.is_identity()) A.elements.push_back(p);
        }
        A.sort_unique();
        if (A.empty()) continue;

        Json run;
        run["instance"] = t;
        run["set_size"] = A.size();
        auto dc = disting::double_count_check(A, 16);
        run["double_count"] = {{"lhs", dc.lhs}, {"rhs", dc.rhs}, {"equal", dc.equal}};
        if (dc.equal) ++identity_ok;

        auto bc = disting::bound_check(A, verts);
        run["bound"] = {{"group_motion", bc.group_motion},
                        {"set_size", bc.set_size},
                        {"threshold", bc.threshold},
                        {"holds", bc.holds}};
        if (bc.holds) {
            ++bound_holds;
            disting::SearchStrategy strat;
            strat.kind = disting::SearchStrategy::Kind::Exhaustive;
            disting::SearchStats stats;
            try {
                disting::find_breaking_coloring(A, verts, strat, false, &stats);
                ++search_ok;
                run["search"] = disting::to_json(stats);
            } catch (const disting::Error&) {
                run["search"] = {{"strategy", "exhaustive"}, {"failed", true}};
            }
        }
        runs.push_back(std::move(run));
    }
    Json j;
    j["seed"] = args.seed;
    j["instances"] = instances;
    j["domain_size"] = domain_size;
    j["double_count_equal"] = identity_ok;
    j["bound_holds"] = bound_holds;
    j["search_success"] = search_ok;
    j["runs"] = std::move(runs);
    emit(args, j, Json::object());
    std::cerr << "motion-lab: " << bound_holds << " bound-holding instances, " << search_ok
              << " broken by exhaustive search\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmetry breaking on layered graph truncations"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string levels_arg = "auto";
    int instances = 100, domain_size = 10, set_size = 8;

    auto* pipeline = app.add_subcommand("pipeline", "sphere-block breaking pipeline");
    add_graph_flags(pipeline, args);
    add_run_flags(pipeline, args);

    auto* ends = app.add_subcommand("ends", "component-tree (per-end) breaking pipeline");
    add_graph_flags(ends, args);
    add_run_flags(ends, args);
    ends->add_option("--levels", levels_arg, "component-tree levels: auto or n1,n2,...");

    auto* lemma = app.add_subcommand("lemma-check", "structural checks on the base stabilizer");
    add_graph_flags(lemma, args);
    lemma->add_option("--margin", args.margin, "boundary margin");
    lemma->add_option("--report", args.report_path, "write the report JSON here");

    auto* lab = app.add_subcommand("motion-lab", "double counting and motion-bound experiments");
    lab->add_option("--instances", instances, "number of random permutation sets");
    lab->add_option("--domain", domain_size, "support size (<= 16)");
    lab->add_option("--set-size", set_size, "permutations drawn per set");
    lab->add_option("--seed", args.seed, "base seed");
    lab->add_option("--report", args.report_path, "write the report JSON here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pipeline->parsed()) return run_pipeline_cmd(args);
        if (ends->parsed()) return run_ends_cmd(args, levels_arg);
        if (lemma->parsed()) return run_lemma_check(args);
        return run_motion_lab(args, instances, domain_size, set_size);
    } catch (const disting::Error& e) {
        Json err = {{"error", e.what()}, {"code", static_cast<int>(e.code())}};
        std::cerr << disting::dump(err);
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", e.what()}, {"code", 1}}.dump() << "\n";
        return 1;
    }
}
