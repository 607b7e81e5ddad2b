#pragma once

#include <filesystem>
#include <string>

#include "vsal/topology.hpp"

namespace vsal {

// {"nodes": [{"id", "row", "col", "kind"}], "edges": [{"a", "b", "path": [[r, c], ...]}]}
std::string graph_to_json(const VesselGraph& graph);
VesselGraph graph_from_json(const std::string& text);

void save_graph_json(const VesselGraph& graph, const std::filesystem::path& path);
VesselGraph load_graph_json(const std::filesystem::path& path);

}  // namespace vsal
