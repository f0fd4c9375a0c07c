#pragma once

#include <string>

#include "json.hpp"

#include "disting/ends_scheme.hpp"
#include "disting/layered_graph.hpp"
#include "disting/motion_engine.hpp"
#include "disting/permutation.hpp"
#include "disting/sphere_scheme.hpp"

namespace disting {

using Json = nlohmann::ordered_json;

// {"base": id, "spheres": [[ids],...], "edges": [[u,v],...]}
Json to_json(const LayeredGraph& g);
LayeredGraph graph_from_json(const Json& j);

// A permutation is a map from id to id (moved points only); a set is an array
// of such maps sorted lexicographically.
Json to_json(const Permutation& p);
Json to_json(const PermSet& A);

// {"support": [ids], "black": [ids]}; white = support minus black.
Json to_json(const PartialColoring& c);
PartialColoring coloring_from_json(const Json& j);

// {"levels": [n_i], "nodes": [{"level", "vertices", "parent"}]}
Json to_json(const ComponentTree& tree);

Json to_json(const SearchStats& s);
Json to_json(const BlockBoundsReport& r);
Json to_json(const IterationRecord& rec);
Json to_json(const PipelineReport& r);
Json to_json(const Theorem9Report& r);

// Deterministic dump (2-space indent, trailing newline) used for all emitted files.
std::string dump(const Json& j);
void write_file(const std::string& path, const Json& j);
Json read_file(const std::string& path);

} // namespace disting
