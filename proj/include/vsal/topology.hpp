#pragma once

#include <span>
#include <vector>

#include "vsal/raster.hpp"

namespace vsal {

// Unit-width 8-connected medial axis of a mask.
struct Skeleton {
    BinaryMask mask;
};

enum class NodeKind {
    termination,  // one skeleton neighbour (or an isolated pixel)
    bifurcation,  // three or more skeleton neighbours
    anchor,       // promoted pixel anchoring an isolated cycle
};

struct GraphNode {
    int id{0};
    Pixel pos;
    NodeKind kind{NodeKind::termination};
};

// An edge's `mas` is the ordered medial-axis pixel path. It starts at node
// a's pixel and ends at node b's pixel; self-loops repeat the anchor pixel
// at both ends. Consecutive entries are 8-adjacent.
struct GraphEdge {
    int a{0};
    int b{0};
    std::vector<Pixel> mas;
};

struct VesselGraph {
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
};

// Closed border pixel sequence; consecutive pixels (and last-to-first) are
// 8-adjacent. `outer` distinguishes component outlines from hole borders.
struct Contour {
    std::vector<Pixel> pixels;
    bool outer{true};
};

// Iterative topology-preserving thinning: directional sub-passes delete
// border pixels whose removal keeps both the local foreground 8-connectivity
// and background 4-connectivity intact, never removing chain endpoints.
// The fixpoint has the same component and hole counts as the input, is
// contained in it, and carries no fully-foreground 2x2 block on non-degenerate
// shapes (diagonal staircase corners are themselves removable and get eaten).
Skeleton skeletonize(const BinaryMask& mask);

// Nodes at skeleton pixels with 1 or >=3 skeleton neighbours, edges as
// maximal degree-2 chains. Isolated cycles get their row-major smallest
// pixel promoted to an anchor node carrying a self-loop edge.
VesselGraph extract_graph(const Skeleton& skeleton);

// Removes every edge incident to a termination whose mas path length is
// strictly below min_branch_len, dissolving nodes that drop to degree 2 by
// splicing their two incident edges; repeats until stable.
VesselGraph prune_graph(const VesselGraph& graph, double min_branch_len);

// Fuses node pairs joined by an edge of path length <= merge_radius into a
// single node at the integer-rounded centroid of the fused positions.
// Surviving incident edges are re-anchored (mas extended to the new
// position); repeats until no such pair remains.
VesselGraph merge_nodes(const VesselGraph& graph, double merge_radius);

// Border following over 8-connected components: one outer contour per
// component plus one contour per hole. The union of all contour pixels is
// exactly the set of foreground pixels with a background 8-neighbour, where
// the image border counts as background.
std::vector<Contour> trace_contours(const BinaryMask& mask);

// Sum of unit / sqrt(2) steps along mas between indices i and j (order
// irrelevant). Throws std::out_of_range on bad indices.
double path_length(std::span<const Pixel> mas, std::size_t i, std::size_t j);

inline double total_path_length(std::span<const Pixel> mas) {
    return mas.empty() ? 0.0 : path_length(mas, 0, mas.size() - 1);
}

}  // namespace vsal
