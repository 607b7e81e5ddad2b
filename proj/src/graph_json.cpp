#include "vsal/graph_json.hpp"

#include <fstream>

#include <json.hpp>

#include "vsal/raster.hpp"

namespace vsal {

namespace {

const char* kind_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::termination: return "termination";
        case NodeKind::bifurcation: return "bifurcation";
        case NodeKind::anchor: return "anchor";
    }
    return "termination";
}

NodeKind kind_from_name(const std::string& name) {
    if (name == "termination") return NodeKind::termination;
    if (name == "bifurcation") return NodeKind::bifurcation;
    if (name == "anchor") return NodeKind::anchor;
    throw IoError("unknown node kind: " + name);
}

}  // namespace

std::string graph_to_json(const VesselGraph& graph) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const GraphNode& n : graph.nodes)
        j["nodes"].push_back({{"id", n.id},
                              {"row", n.pos.row},
                              {"col", n.pos.col},
                              {"kind", kind_name(n.kind)}});
    j["edges"] = nlohmann::json::array();
    for (const GraphEdge& e : graph.edges) {
        nlohmann::json path = nlohmann::json::array();
        for (const Pixel& p : e.mas) path.push_back({p.row, p.col});
        j["edges"].push_back({{"a", e.a}, {"b", e.b}, {"path", std::move(path)}});
    }
    return j.dump(2) + "\n";
}

VesselGraph graph_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    VesselGraph graph;
    for (const auto& jn : j.at("nodes")) {
        GraphNode n;
        n.id = jn.at("id").get<int>();
        n.pos = {jn.at("row").get<int>(), jn.at("col").get<int>()};
        n.kind = kind_from_name(jn.at("kind").get<std::string>());
        graph.nodes.push_back(n);
    }
    for (const auto& je : j.at("edges")) {
        GraphEdge e;
        e.a = je.at("a").get<int>();
        e.b = je.at("b").get<int>();
        for (const auto& jp : je.at("path"))
            e.mas.push_back({jp.at(0).get<int>(), jp.at(1).get<int>()});
        graph.edges.push_back(std::move(e));
    }
    return graph;
}

void save_graph_json(const VesselGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << graph_to_json(graph);
    if (!out) throw IoError("write failed: " + path.string());
}

VesselGraph load_graph_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return graph_from_json(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace vsal
