#include "vsal/topology.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

namespace vsal {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Ring cell i corresponds to kNeighbors8[i]. The tables below answer, for a
// 3x3 neighbourhood configuration (bit i set = ring cell i foreground),
// whether deleting the centre keeps the local foreground 8-connected and the
// local background 4-connected: the classic simple-point test.
struct SimpleLut {
    std::array<bool, 256> simple{};

    SimpleLut() {
        for (int cfg = 0; cfg < 256; ++cfg) {
            simple[cfg] = fg_components(cfg) == 1 && bg_components(cfg) == 1;
        }
    }

    static bool adjacent8(int i, int j) {
        const Offset a = kNeighbors8[i], b = kNeighbors8[j];
        return std::abs(a.drow - b.drow) <= 1 && std::abs(a.dcol - b.dcol) <= 1;
    }
    static bool adjacent4(int i, int j) {
        const Offset a = kNeighbors8[i], b = kNeighbors8[j];
        return std::abs(a.drow - b.drow) + std::abs(a.dcol - b.dcol) == 1;
    }

    static int fg_components(int cfg) {
        int seen = 0, comps = 0;
        for (int i = 0; i < 8; ++i) {
            if (!(cfg & (1 << i)) || (seen & (1 << i))) continue;
            ++comps;
            int stack = 1 << i;
            while (stack) {
                const int k = std::countr_zero(static_cast<unsigned>(stack));
                stack &= stack - 1;
                seen |= 1 << k;
                for (int j = 0; j < 8; ++j)
                    if ((cfg & (1 << j)) && !(seen & (1 << j)) && adjacent8(k, j))
                        stack |= 1 << j;
            }
        }
        return comps;
    }

    // 4-connected background components that touch an edge-neighbour of the
    // centre (ring cells 1, 3, 4, 6).
    static int bg_components(int cfg) {
        constexpr int kEdgeCells = (1 << 1) | (1 << 3) | (1 << 4) | (1 << 6);
        int seen = 0, comps = 0;
        for (int i = 0; i < 8; ++i) {
            if ((cfg & (1 << i)) || (seen & (1 << i))) continue;
            int stack = 1 << i, members = 0;
            while (stack) {
                const int k = std::countr_zero(static_cast<unsigned>(stack));
                stack &= stack - 1;
                seen |= 1 << k;
                members |= 1 << k;
                for (int j = 0; j < 8; ++j)
                    if (!(cfg & (1 << j)) && !(seen & (1 << j)) && adjacent4(k, j))
                        stack |= 1 << j;
            }
            if (members & kEdgeCells) ++comps;
        }
        return comps;
    }
};

const SimpleLut& simple_lut() {
    static const SimpleLut lut;
    return lut;
}

int ring_config(const BinaryMask& m, Pixel p) {
    int cfg = 0;
    for (int i = 0; i < 8; ++i) {
        const Pixel q = p + kNeighbors8[i];
        if (m.in_bounds(q) && m.at(q)) cfg |= 1 << i;
    }
    return cfg;
}

}  // namespace

Skeleton skeletonize(const BinaryMask& mask) {
    BinaryMask sk = mask;
    const SimpleLut& lut = simple_lut();
    // Each directional sub-pass peels one border layer: candidates are fixed
    // up front, then deleted sequentially so every deletion is re-validated
    // against the current raster and topology cannot break. Without the
    // snapshot a single pass would cascade through the whole shape.
    constexpr std::array<Offset, 4> kDirs = {{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
    std::vector<Pixel> border;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Offset& dir : kDirs) {
            border.clear();
            for (int r = 0; r < sk.height(); ++r) {
                for (int c = 0; c < sk.width(); ++c) {
                    const Pixel p{r, c};
                    if (!sk.at(p)) continue;
                    const Pixel q = p + dir;
                    if (sk.in_bounds(q) && sk.at(q)) continue;  // not a border in `dir`
                    border.push_back(p);
                }
            }
            for (const Pixel& p : border) {
                const int cfg = ring_config(sk, p);
                if (std::popcount(static_cast<unsigned>(cfg)) <= 1) continue;
                if (lut.simple[cfg]) {
                    sk.set(p, false);
                    changed = true;
                }
            }
        }
    }
    return Skeleton{std::move(sk)};
}

namespace {

int skeleton_degree(const BinaryMask& m, Pixel p) {
    int n = 0;
    for (const Offset& o : kNeighbors8) {
        const Pixel q = p + o;
        if (m.in_bounds(q) && m.at(q)) ++n;
    }
    return n;
}

}  // namespace

VesselGraph extract_graph(const Skeleton& skeleton) {
    const BinaryMask& sk = skeleton.mask;
    const int w = sk.width(), h = sk.height();
    VesselGraph g;

    std::vector<std::int32_t> node_id(static_cast<std::size_t>(w) * h, -1);
    auto idx = [w](Pixel p) { return static_cast<std::size_t>(p.row) * w + p.col; };

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const Pixel p{r, c};
            if (!sk.at(p)) continue;
            const int deg = skeleton_degree(sk, p);
            if (deg == 2) continue;
            node_id[idx(p)] = static_cast<std::int32_t>(g.nodes.size());
            g.nodes.push_back({static_cast<int>(g.nodes.size()), p,
                               deg >= 3 ? NodeKind::bifurcation : NodeKind::termination});
        }
    }

    std::vector<std::uint8_t> visited(static_cast<std::size_t>(w) * h, 0);

    auto walk_chain = [&](Pixel from, Pixel first) {
        std::vector<Pixel> path{from, first};
        visited[idx(first)] = 1;
        Pixel prev = from, cur = first;
        while (node_id[idx(cur)] < 0) {
            Pixel next{-1, -1};
            for (const Offset& o : kNeighbors8) {
                const Pixel q = cur + o;
                if (sk.in_bounds(q) && sk.at(q) && q != prev) {
                    next = q;
                    break;
                }
            }
            path.push_back(next);
            prev = cur;
            cur = next;
            if (node_id[idx(cur)] < 0) visited[idx(cur)] = 1;
        }
        return path;
    };

    for (const GraphNode& node : g.nodes) {
        for (const Offset& o : kNeighbors8) {
            const Pixel q = node.pos + o;
            if (!sk.in_bounds(q) || !sk.at(q)) continue;
            const std::int32_t qid = node_id[idx(q)];
            if (qid >= 0) {
                if (node.pos < q)  // each adjacent node pair once
                    g.edges.push_back({node.id, qid, {node.pos, q}});
                continue;
            }
            if (visited[idx(q)]) continue;
            std::vector<Pixel> path = walk_chain(node.pos, q);
            const std::int32_t end_id = node_id[idx(path.back())];
            g.edges.push_back({node.id, end_id, std::move(path)});
        }
    }

    // Leftover degree-2 pixels form isolated cycles; promote the row-major
    // smallest pixel of each to an anchor node with a self-loop.
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const Pixel a{r, c};
            if (!sk.at(a) || visited[idx(a)] || node_id[idx(a)] >= 0) continue;
            const std::int32_t aid = static_cast<std::int32_t>(g.nodes.size());
            node_id[idx(a)] = aid;
            g.nodes.push_back({aid, a, NodeKind::anchor});
            visited[idx(a)] = 1;
            Pixel first{-1, -1};
            for (const Offset& o : kNeighbors8) {
                const Pixel q = a + o;
                if (sk.in_bounds(q) && sk.at(q)) {
                    first = q;
                    break;
                }
            }
            std::vector<Pixel> path = walk_chain(a, first);
            g.edges.push_back({aid, aid, std::move(path)});
        }
    }
    return g;
}

namespace {

std::vector<int> node_degrees(const VesselGraph& g) {
    std::vector<int> deg(g.nodes.size(), 0);
    for (const GraphEdge& e : g.edges) {
        deg[e.a] += 1;
        deg[e.b] += 1;
    }
    return deg;
}

NodeKind kind_for_degree(int deg) {
    if (deg >= 3) return NodeKind::bifurcation;
    if (deg == 2) return NodeKind::anchor;
    return NodeKind::termination;
}

// Reassigns node ids 0..n-1 in current order and remaps edge endpoints.
void reindex(VesselGraph& g) {
    std::vector<int> remap(
        g.nodes.empty() ? 0 : static_cast<std::size_t>(std::max_element(
                                  g.nodes.begin(), g.nodes.end(),
                                  [](const GraphNode& x, const GraphNode& y) {
                                      return x.id < y.id;
                                  })->id) + 1,
        -1);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        remap[g.nodes[i].id] = static_cast<int>(i);
        g.nodes[i].id = static_cast<int>(i);
    }
    for (GraphEdge& e : g.edges) {
        e.a = remap[e.a];
        e.b = remap[e.b];
    }
}

void orient_to_end_at(GraphEdge& e, int node) {
    if (e.b == node) return;
    std::swap(e.a, e.b);
    std::reverse(e.mas.begin(), e.mas.end());
}

}  // namespace

VesselGraph prune_graph(const VesselGraph& graph, double min_branch_len) {
    VesselGraph g = graph;
    reindex(g);
    // Nodes isolated from the start survive; nodes stripped of their last
    // edge during pruning are dropped along with it.
    std::vector<int> initial_deg = node_degrees(g);

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> deg = node_degrees(g);

        std::vector<GraphEdge> kept;
        for (GraphEdge& e : g.edges) {
            const bool stub = (deg[e.a] == 1 || deg[e.b] == 1) &&
                              total_path_length(e.mas) < min_branch_len;
            if (stub)
                changed = true;
            else
                kept.push_back(std::move(e));
        }
        g.edges = std::move(kept);
        if (!changed) break;

        // Splice out nodes left with exactly two distinct incident edges.
        bool spliced = true;
        while (spliced) {
            spliced = false;
            deg = node_degrees(g);
            for (const GraphNode& node : g.nodes) {
                if (deg[node.id] != 2) continue;
                std::vector<std::size_t> inc;
                for (std::size_t i = 0; i < g.edges.size(); ++i)
                    if (g.edges[i].a == node.id || g.edges[i].b == node.id)
                        inc.push_back(i);
                if (inc.size() != 2) continue;  // a self-loop keeps its anchor
                GraphEdge e1 = g.edges[inc[0]];
                GraphEdge e2 = g.edges[inc[1]];
                orient_to_end_at(e1, node.id);
                if (e2.a != node.id) {
                    std::swap(e2.a, e2.b);
                    std::reverse(e2.mas.begin(), e2.mas.end());
                }
                e1.mas.insert(e1.mas.end(), e2.mas.begin() + 1, e2.mas.end());
                GraphEdge merged{e1.a, e2.b, std::move(e1.mas)};
                g.edges.erase(g.edges.begin() + inc[1]);
                g.edges.erase(g.edges.begin() + inc[0]);
                g.edges.push_back(std::move(merged));
                spliced = true;
                break;
            }
        }

        deg = node_degrees(g);
        std::vector<GraphNode> survivors;
        for (const GraphNode& node : g.nodes)
            if (deg[node.id] > 0 || initial_deg[node.id] == 0)
                survivors.push_back(node);
        if (survivors.size() != g.nodes.size()) {
            std::vector<int> new_initial;
            for (const GraphNode& node : survivors) new_initial.push_back(initial_deg[node.id]);
            g.nodes = std::move(survivors);
            initial_deg = std::move(new_initial);
            reindex(g);
        }
    }

    std::vector<int> deg = node_degrees(g);
    for (GraphNode& node : g.nodes)
        if (deg[node.id] > 0) node.kind = kind_for_degree(deg[node.id]);
    return g;
}

VesselGraph merge_nodes(const VesselGraph& graph, double merge_radius) {
    VesselGraph g = graph;
    reindex(g);

    while (true) {
        std::vector<std::size_t> short_edges;
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            const GraphEdge& e = g.edges[i];
            if (e.a != e.b && total_path_length(e.mas) <= merge_radius)
                short_edges.push_back(i);
        }
        if (short_edges.empty()) break;

        std::vector<int> parent(g.nodes.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&parent](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (std::size_t i : short_edges) {
            const int ra = find(g.edges[i].a), rb = find(g.edges[i].b);
            if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
        }

        // One new node per merged cluster, at the rounded centroid of the
        // cluster's node positions; untouched nodes pass through.
        std::map<int, std::vector<int>> clusters;
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
            clusters[find(static_cast<int>(i))].push_back(static_cast<int>(i));

        std::vector<GraphNode> new_nodes;
        std::vector<int> remap(g.nodes.size(), -1);
        for (const auto& [root, members] : clusters) {
            const int id = static_cast<int>(new_nodes.size());
            Pixel pos = g.nodes[root].pos;
            if (members.size() > 1) {
                double sr = 0.0, sc = 0.0;
                for (int m : members) {
                    sr += g.nodes[m].pos.row;
                    sc += g.nodes[m].pos.col;
                }
                pos = {static_cast<int>(std::lround(sr / members.size())),
                       static_cast<int>(std::lround(sc / members.size()))};
            }
            new_nodes.push_back({id, pos, g.nodes[root].kind});
            for (int m : members) remap[m] = id;
        }

        std::vector<GraphEdge> new_edges;
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            if (std::binary_search(short_edges.begin(), short_edges.end(), i)) continue;
            GraphEdge e = std::move(g.edges[i]);
            e.a = remap[e.a];
            e.b = remap[e.b];
            // Re-anchor: extend the path to reach any moved endpoint.
            if (e.mas.front() != new_nodes[e.a].pos) {
                std::vector<Pixel> ext = rasterize_line(new_nodes[e.a].pos, e.mas.front());
                ext.pop_back();
                e.mas.insert(e.mas.begin(), ext.begin(), ext.end());
            }
            if (e.mas.back() != new_nodes[e.b].pos) {
                std::vector<Pixel> ext = rasterize_line(e.mas.back(), new_nodes[e.b].pos);
                e.mas.insert(e.mas.end(), ext.begin() + 1, ext.end());
            }
            new_edges.push_back(std::move(e));
        }

        g.nodes = std::move(new_nodes);
        g.edges = std::move(new_edges);
    }

    std::vector<int> deg = node_degrees(g);
    for (GraphNode& node : g.nodes)
        if (deg[node.id] > 0) node.kind = kind_for_degree(deg[node.id]);
    return g;
}

namespace {

// Neighbour ring for border following; increasing index is the
// counterclockwise sweep direction in (row, col) coordinates.
constexpr std::array<Offset, 8> kTraceDirs = {{
    {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1},
}};

int dir_between(Pixel from, Pixel to) {
    for (int i = 0; i < 8; ++i)
        if (to.row - from.row == kTraceDirs[i].drow && to.col - from.col == kTraceDirs[i].dcol)
            return i;
    throw std::logic_error("dir_between: pixels not adjacent");
}

}  // namespace

std::vector<Contour> trace_contours(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    std::vector<std::int32_t> f(static_cast<std::size_t>(w) * h, 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (mask.at(r, c)) f[static_cast<std::size_t>(r) * w + c] = 1;

    auto fval = [&](Pixel p) -> std::int32_t {
        if (p.row < 0 || p.row >= h || p.col < 0 || p.col >= w) return 0;
        return f[static_cast<std::size_t>(p.row) * w + p.col];
    };
    auto fset = [&](Pixel p, std::int32_t v) {
        f[static_cast<std::size_t>(p.row) * w + p.col] = v;
    };

    std::vector<Contour> out;
    std::int32_t nbd = 1;

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const Pixel p{r, c};
            const std::int32_t fij = fval(p);
            bool outer;
            Pixel from;
            if (fij == 1 && fval({r, c - 1}) == 0) {
                outer = true;
                from = {r, c - 1};
            } else if (fij >= 1 && fval({r, c + 1}) == 0) {
                outer = false;
                from = {r, c + 1};
            } else {
                continue;
            }
            ++nbd;

            Contour contour;
            contour.outer = outer;
            contour.pixels.push_back(p);

            // A diagonal move can cut the corner past a foreground pixel
            // whose only background contact is the diagonal gap itself;
            // splice that pixel in so the union covers the whole border.
            auto append_corner = [&](Pixel a, Pixel b) {
                const int dr = b.row - a.row, dc = b.col - a.col;
                if (dr == 0 || dc == 0) return;
                const Pixel c1{a.row + dr, a.col}, c2{a.row, a.col + dc};
                const bool f1 = fval(c1) != 0, f2 = fval(c2) != 0;
                if (f1 != f2) contour.pixels.push_back(f1 ? c1 : c2);
            };

            // Clockwise scan for the first foreground neighbour.
            int d = dir_between(p, from);
            Pixel p1{-1, -1};
            for (int k = 0; k < 8; ++k) {
                const Pixel q = p + kTraceDirs[(d - k + 16) % 8];
                if (fval(q) != 0) {
                    p1 = q;
                    break;
                }
            }
            if (p1.row < 0) {
                fset(p, -nbd);
                out.push_back(std::move(contour));
                continue;
            }

            Pixel p2 = p1;  // previous border pixel
            Pixel p3 = p;   // current border pixel
            while (true) {
                // Counterclockwise sweep around p3 starting just after p2.
                int start = (dir_between(p3, p2) + 1) % 8;
                Pixel p4{-1, -1};
                bool examined_right_zero = false;
                for (int k = 0; k < 8; ++k) {
                    const int dd = (start + k) % 8;
                    const Pixel q = p3 + kTraceDirs[dd];
                    if (fval(q) != 0) {
                        p4 = q;
                        break;
                    }
                    if (dd == 0) examined_right_zero = true;  // (row, col+1) seen as 0
                }
                if (examined_right_zero)
                    fset(p3, -nbd);
                else if (fval(p3) == 1)
                    fset(p3, nbd);

                append_corner(p3, p4);
                if (p4 == p && p3 == p1) break;
                contour.pixels.push_back(p4);
                p2 = p3;
                p3 = p4;
            }
            out.push_back(std::move(contour));
        }
    }
    return out;
}

double path_length(std::span<const Pixel> mas, std::size_t i, std::size_t j) {
    if (i >= mas.size() || j >= mas.size())
        throw std::out_of_range("path_length: index beyond path");
    if (i > j) std::swap(i, j);
    double len = 0.0;
    for (std::size_t k = i; k < j; ++k) {
        const int dr = std::abs(mas[k + 1].row - mas[k].row);
        const int dc = std::abs(mas[k + 1].col - mas[k].col);
        assert(dr <= 1 && dc <= 1 && (dr | dc));
        len += (dr == 1 && dc == 1) ? kSqrt2 : 1.0;
    }
    return len;
}

}  // namespace vsal
