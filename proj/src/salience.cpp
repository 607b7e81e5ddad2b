#include "vsal/salience.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace vsal {

std::optional<CrossSection> find_cross_section(Pixel p,
                                               std::span<const Pixel> contour_pixels,
                                               const BinaryMask& mask) {
    (void)mask;
    if (contour_pixels.empty()) return std::nullopt;

    auto closer = [p](Pixel a, Pixel b) {
        const auto da = squared_distance(a, p), db = squared_distance(b, p);
        if (da != db) return da < db;
        return a < b;
    };

    Pixel p_c1 = contour_pixels[0];
    for (const Pixel& q : contour_pixels)
        if (closer(q, p_c1)) p_c1 = q;

    std::optional<Pixel> p_c2;
    if (p_c1 == p) {
        // Width-one vessel: p is itself on the contour; take the nearest
        // other contour pixel without the opposite-side test.
        for (const Pixel& q : contour_pixels) {
            if (q == p) continue;
            if (!p_c2 || closer(q, *p_c2)) p_c2 = q;
        }
    } else {
        const Offset v1 = p_c1 - p;
        for (const Pixel& q : contour_pixels) {
            const Offset vq = q - p;
            const std::int64_t dot = static_cast<std::int64_t>(v1.drow) * vq.drow +
                                     static_cast<std::int64_t>(v1.dcol) * vq.dcol;
            if (dot >= 0) continue;
            if (!p_c2 || closer(q, *p_c2)) p_c2 = q;
        }
    }
    if (!p_c2) return std::nullopt;

    CrossSection cs{p_c1, *p_c2, {}};
    cs.s_v = rasterize_line(p_c1, p);
    const std::vector<Pixel> second = rasterize_line(p, *p_c2);
    cs.s_v.insert(cs.s_v.end(), second.begin() + 1, second.end());
    // The two half-sections can overlap on steep diagonals; keep each pixel once.
    std::set<Pixel> seen;
    std::vector<Pixel> dedup;
    dedup.reserve(cs.s_v.size());
    for (const Pixel& q : cs.s_v)
        if (seen.insert(q).second) dedup.push_back(q);
    cs.s_v = std::move(dedup);
    return cs;
}

std::vector<Pixel> sample_background(const CrossSection& cs, const BinaryMask& mask,
                                     double r_b) {
    std::set<Pixel> out;
    for (const Pixel& center : {cs.p_c1, cs.p_c2})
        for (const Pixel& q : disk_pixels(center, r_b, mask.width(), mask.height()))
            if (!mask.at(q)) out.insert(q);
    return {out.begin(), out.end()};
}

double local_contrast(const GrayImage& image, std::span<const Pixel> s_v,
                      std::span<const Pixel> s_b) {
    if (s_v.empty() || s_b.empty())
        throw std::invalid_argument("local_contrast: empty sample");
    double iv = 0.0, ib = 0.0;
    for (const Pixel& q : s_v) iv += image.at(q);
    for (const Pixel& q : s_b) ib += image.at(q);
    iv /= static_cast<double>(s_v.size());
    ib /= static_cast<double>(s_b.size());
    const double denom = std::max(iv, ib);
    if (denom == 0.0) return 0.0;
    return (iv - ib) / denom;
}

std::vector<std::optional<double>> smooth_along_mas(
    std::span<const std::optional<double>> delta, int k) {
    if (k < 0) throw std::invalid_argument("smooth_along_mas: negative k");
    std::vector<std::optional<double>> out(delta.size());
    if (k == 0) {
        std::copy(delta.begin(), delta.end(), out.begin());
        return out;
    }
    const int n = static_cast<int>(delta.size());
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        int cnt = 0;
        const int lo = std::max(0, i - k), hi = std::min(n - 1, i + k);
        for (int j = lo; j <= hi; ++j) {
            if (delta[j]) {
                sum += *delta[j];
                ++cnt;
            }
        }
        if (cnt > 0) out[i] = sum / cnt;
    }
    return out;
}

ScalarField expand_to_vessel(std::span<const std::pair<Pixel, double>> values,
                             const BinaryMask& mask) {
    if (values.empty())
        throw std::invalid_argument("expand_to_vessel: no defined values");
    std::vector<Pixel> sources;
    sources.reserve(values.size());
    for (const auto& [p, v] : values) sources.push_back(p);
    const std::vector<std::int32_t> nearest = nearest_source_index(sources, mask);

    ScalarField field(mask.width(), mask.height());
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            const std::int32_t si = nearest[static_cast<std::size_t>(r) * mask.width() + c];
            if (si >= 0) field.set(r, c, static_cast<float>(values[si].second));
        }
    }
    return field;
}

ScalarField compute_lvs_map(const GrayImage& image, const BinaryMask& mask,
                            const LvsParams& params, const GraphParams& graph_params) {
    if (image.width() != mask.width() || image.height() != mask.height())
        throw std::invalid_argument("compute_lvs_map: image/mask size mismatch");

    ScalarField empty_field(mask.width(), mask.height());
    if (mask.count() == 0) return empty_field;

    VesselGraph graph = extract_graph(skeletonize(mask));
    graph = prune_graph(graph, graph_params.min_branch_len);
    graph = merge_nodes(graph, graph_params.merge_radius);

    // Contour pixels grouped by the connected component they outline.
    const auto [labels, n_components] = label_components(mask);
    auto label_of = [&](Pixel p) {
        return labels[static_cast<std::size_t>(p.row) * mask.width() + p.col];
    };
    std::vector<std::vector<Pixel>> component_contours(n_components);
    for (const Contour& contour : trace_contours(mask)) {
        std::set<Pixel> unique(contour.pixels.begin(), contour.pixels.end());
        auto& bucket = component_contours[label_of(contour.pixels.front())];
        bucket.insert(bucket.end(), unique.begin(), unique.end());
    }
    for (auto& bucket : component_contours) {
        std::sort(bucket.begin(), bucket.end());
        bucket.erase(std::unique(bucket.begin(), bucket.end()), bucket.end());
    }

    std::vector<std::pair<Pixel, double>> expanded_values;
    std::set<Pixel> claimed;
    for (const GraphEdge& edge : graph.edges) {
        MasSalience sal;
        sal.delta.resize(edge.mas.size());
        for (std::size_t i = 0; i < edge.mas.size(); ++i) {
            const Pixel p = edge.mas[i];
            // Re-anchored paths can leave the mask; such entries stay undefined.
            if (!mask.in_bounds(p) || !mask.at(p)) continue;
            const auto cs = find_cross_section(p, component_contours[label_of(p)], mask);
            if (!cs) continue;
            const std::vector<Pixel> s_b = sample_background(*cs, mask, params.r_b);
            if (s_b.empty()) continue;
            double d = local_contrast(image, cs->s_v, s_b);
            sal.delta[i] = d;
        }
        sal.lvs = smooth_along_mas(sal.delta, params.k);
        for (std::size_t i = 0; i < edge.mas.size(); ++i) {
            if (!sal.lvs[i]) continue;
            // Shared node pixels keep the first edge's value.
            if (!claimed.insert(edge.mas[i]).second) continue;
            expanded_values.emplace_back(edge.mas[i], std::clamp(*sal.lvs[i], -1.0, 1.0));
        }
    }

    if (expanded_values.empty()) return empty_field;
    return expand_to_vessel(expanded_values, mask);
}

}  // namespace vsal
