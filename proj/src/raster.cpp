#include "vsal/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace vsal {

std::int64_t BinaryMask::count() const {
    std::int64_t n = 0;
    for (std::uint8_t v : values_) n += v;
    return n;
}

std::vector<Pixel> BinaryMask::foreground() const {
    std::vector<Pixel> out;
    for (int r = 0; r < height_; ++r)
        for (int c = 0; c < width_; ++c)
            if (at(r, c)) out.push_back({r, c});
    return out;
}

std::int64_t ScalarField::valid_count() const {
    std::int64_t n = 0;
    for (std::uint8_t v : valid_) n += v;
    return n;
}

namespace {

// Plain Bresenham walk; always steps from a toward b.
std::vector<Pixel> bresenham(Pixel a, Pixel b) {
    std::vector<Pixel> out;
    int r = a.row, c = a.col;
    const int dr = std::abs(b.row - a.row);
    const int dc = std::abs(b.col - a.col);
    const int sr = a.row < b.row ? 1 : -1;
    const int sc = a.col < b.col ? 1 : -1;
    int err = dc - dr;
    out.reserve(static_cast<std::size_t>(std::max(dr, dc)) + 1);
    while (true) {
        out.push_back({r, c});
        if (r == b.row && c == b.col) break;
        const int e2 = 2 * err;
        if (e2 > -dr) {
            err -= dr;
            c += sc;
        }
        if (e2 < dc) {
            err += dc;
            r += sr;
        }
    }
    return out;
}

}  // namespace

std::vector<Pixel> rasterize_line(Pixel a, Pixel b) {
    // Walk from the row-major smaller endpoint so that swapping the
    // arguments produces the same pixel set in reversed order.
    if (b < a) {
        std::vector<Pixel> out = bresenham(b, a);
        std::reverse(out.begin(), out.end());
        return out;
    }
    return bresenham(a, b);
}

std::vector<Pixel> disk_pixels(Pixel center, double radius, int width, int height) {
    std::vector<Pixel> out;
    if (radius < 0.0) return out;
    const int ri = static_cast<int>(std::floor(radius));
    const double r2 = radius * radius;
    const int r0 = std::max(0, center.row - ri);
    const int r1 = std::min(height - 1, center.row + ri);
    const int c0 = std::max(0, center.col - ri);
    const int c1 = std::min(width - 1, center.col + ri);
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            const double dr = r - center.row;
            const double dc = c - center.col;
            if (dr * dr + dc * dc <= r2) out.push_back({r, c});
        }
    }
    return out;
}

std::pair<std::vector<std::int32_t>, int> label_components(const BinaryMask& mask) {
    const int w = mask.width(), h = mask.height();
    std::vector<std::int32_t> labels(static_cast<std::size_t>(w) * h, -1);
    int next = 0;
    std::vector<Pixel> stack;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c) || labels[static_cast<std::size_t>(r) * w + c] >= 0)
                continue;
            stack.push_back({r, c});
            labels[static_cast<std::size_t>(r) * w + c] = next;
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                for (const Offset& o : kNeighbors8) {
                    const Pixel q = p + o;
                    if (!mask.in_bounds(q) || !mask.at(q)) continue;
                    std::int32_t& l = labels[static_cast<std::size_t>(q.row) * w + q.col];
                    if (l < 0) {
                        l = next;
                        stack.push_back(q);
                    }
                }
            }
            ++next;
        }
    }
    return {std::move(labels), next};
}

namespace {

struct SourceKey {
    std::int64_t d2;
    Pixel p;
    std::int32_t idx;

    bool operator<(const SourceKey& o) const {
        if (d2 != o.d2) return d2 < o.d2;
        if (p != o.p) return p < o.p;
        return idx < o.idx;
    }
};

}  // namespace

std::vector<std::int32_t> nearest_source_index(std::span<const Pixel> sources,
                                               const BinaryMask& domain) {
    if (sources.empty())
        throw std::invalid_argument("nearest_source_index: no sources");
    const int w = domain.width(), h = domain.height();
    std::vector<std::int32_t> out(static_cast<std::size_t>(w) * h, -1);

    // Bucket grid over the sources; per-pixel outward ring scan.
    constexpr int kCell = 16;
    const int gw = (w + kCell - 1) / kCell;
    const int gh = (h + kCell - 1) / kCell;
    std::vector<std::vector<std::int32_t>> cells(
        static_cast<std::size_t>(std::max(1, gw)) * std::max(1, gh));
    auto cell_of = [&](Pixel p) {
        return static_cast<std::size_t>(p.row / kCell) * gw + p.col / kCell;
    };
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (!domain.in_bounds(sources[i]))
            throw std::invalid_argument("nearest_source_index: source out of bounds");
        cells[cell_of(sources[i])].push_back(static_cast<std::int32_t>(i));
    }

    const int max_ring = std::max(gw, gh);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!domain.at(r, c)) continue;
            const Pixel p{r, c};
            const int pcr = r / kCell, pcc = c / kCell;
            SourceKey best{std::numeric_limits<std::int64_t>::max(), {}, -1};
            for (int ring = 0; ring <= max_ring; ++ring) {
                // Any cell at ring distance k >= 1 is at least (k-1)*kCell+1
                // pixels away; past that bound the best cannot improve.
                if (best.idx >= 0) {
                    const std::int64_t lo = static_cast<std::int64_t>(ring - 1) * kCell + 1;
                    if (ring >= 1 && lo * lo > best.d2) break;
                }
                for (int gr = pcr - ring; gr <= pcr + ring; ++gr) {
                    if (gr < 0 || gr >= gh) continue;
                    for (int gc = pcc - ring; gc <= pcc + ring; ++gc) {
                        if (gc < 0 || gc >= gw) continue;
                        if (std::max(std::abs(gr - pcr), std::abs(gc - pcc)) != ring)
                            continue;
                        for (std::int32_t si : cells[static_cast<std::size_t>(gr) * gw + gc]) {
                            const SourceKey k{squared_distance(p, sources[si]), sources[si], si};
                            if (k < best) best = k;
                        }
                    }
                }
            }
            out[static_cast<std::size_t>(r) * w + c] = best.idx;
        }
    }
    return out;
}

}  // namespace vsal
