#include "vsal/augment.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace vsal {

BinaryMask PreservationField::zero_set() const {
    BinaryMask out(width_, height_);
    for (int r = 0; r < height_; ++r)
        for (int c = 0; c < width_; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * width_ + c;
            out.set(r, c, covered_[i] != 0 && factor_[i] == 0.0);
        }
    return out;
}

namespace {

std::vector<double> prefix_lengths(std::span<const Pixel> mas) {
    std::vector<double> prefix(mas.size(), 0.0);
    for (std::size_t i = 1; i < mas.size(); ++i)
        prefix[i] = prefix[i - 1] + path_length(mas.subspan(i - 1, 2), 0, 1);
    return prefix;
}

}  // namespace

std::optional<std::size_t> select_center(std::span<const Pixel> mas, double l, Rng& rng) {
    if (mas.empty()) return std::nullopt;
    const std::vector<double> prefix = prefix_lengths(mas);
    const double total = prefix.back();
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < mas.size(); ++i)
        if (prefix[i] > l / 2.0 && total - prefix[i] > l / 2.0) eligible.push_back(i);
    if (eligible.empty()) return std::nullopt;
    return eligible[rng.uniform_index(eligible.size())];
}

ProfileWaypoints locate_waypoints(std::span<const Pixel> mas, std::size_t p_c_idx,
                                  double l, double l_d) {
    const std::vector<double> prefix = prefix_lengths(mas);
    auto outward = [&](double target, int step) {
        std::size_t i = p_c_idx;
        while (std::abs(prefix[i] - prefix[p_c_idx]) < target) {
            if (step < 0 && i == 0) break;
            if (step > 0 && i + 1 == mas.size()) break;
            i = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + step);
        }
        return i;
    };
    ProfileWaypoints w{};
    w.p_c = p_c_idx;
    w.p_1 = outward(l / 2.0, -1);
    w.p_2 = outward(l / 2.0, +1);
    w.p_d1 = outward(l_d / 2.0, -1);
    w.p_d2 = outward(l_d / 2.0, +1);
    return w;
}

std::vector<double> preservation_profile(std::span<const Pixel> mas,
                                         const ProfileWaypoints& w) {
    const std::vector<double> prefix = prefix_lengths(mas);
    std::vector<double> f(mas.size(), 1.0);
    const double d1 = prefix[w.p_d1] - prefix[w.p_1];
    for (std::size_t i = w.p_1; i < w.p_d1 && d1 > 0.0; ++i)
        f[i] = (prefix[w.p_d1] - prefix[i]) / d1;
    const double d2 = prefix[w.p_2] - prefix[w.p_d2];
    for (std::size_t i = w.p_d2 + 1; i <= w.p_2 && d2 > 0.0; ++i)
        f[i] = (prefix[i] - prefix[w.p_d2]) / d2;
    for (std::size_t i = w.p_d1; i <= w.p_d2; ++i) f[i] = 0.0;
    return f;
}

PreservationField expand_profile(std::span<const Pixel> mas,
                                 std::span<const double> factors,
                                 const BinaryMask& mask,
                                 std::span<const Pixel> extra_unit_sources) {
    if (mas.size() != factors.size())
        throw std::invalid_argument("expand_profile: factor count mismatch");
    std::vector<Pixel> sources(mas.begin(), mas.end());
    sources.insert(sources.end(), extra_unit_sources.begin(), extra_unit_sources.end());
    const std::vector<std::int32_t> nearest = nearest_source_index(sources, mask);

    PreservationField field(mask.width(), mask.height());
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            const std::int32_t si = nearest[static_cast<std::size_t>(r) * mask.width() + c];
            if (si < 0 || si >= static_cast<std::int32_t>(mas.size())) continue;
            field.set({r, c}, factors[si]);
        }
    }
    return field;
}

std::optional<double> local_background_mean(const GrayImage& image, const BinaryMask& mask,
                                            Pixel p_c, double l) {
    const int li = static_cast<int>(std::floor(l));
    const int r0 = std::max(0, p_c.row - li), r1 = std::min(image.height() - 1, p_c.row + li);
    const int c0 = std::max(0, p_c.col - li), c1 = std::min(image.width() - 1, p_c.col + li);
    double sum = 0.0;
    std::int64_t n = 0;
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            if (mask.at(r, c)) continue;
            sum += image.at(r, c);
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

GrayImage attenuate(const GrayImage& image, const BinaryMask& mask,
                    const PreservationField& field, double i_m) {
    GrayImage out = image;
    for (int r = 0; r < image.height(); ++r) {
        for (int c = 0; c < image.width(); ++c) {
            const Pixel p{r, c};
            if (!mask.at(p) || !field.covered(p)) continue;
            const double f = field.factor(p);
            if (f >= 1.0) continue;
            const double v = f * (image.at(p) - i_m) + i_m;
            const double clamped = std::clamp(v, 0.0, 255.0);
            assert(std::abs(clamped - v) < 1e-9);
            out.set(p, clamped);
        }
    }
    return out;
}

std::optional<Offset> find_background_patch(const BinaryMask& mask, const BinaryMask& s_a,
                                            const GrayImage& image, double t_b, Rng& rng) {
    const int w = mask.width(), h = mask.height();
    const std::vector<Pixel> region = s_a.foreground();
    if (region.empty()) return std::nullopt;

    // Outer ring: background pixels touching the region; inner ring: region
    // pixels touching the outer ring.
    std::vector<Pixel> c_o, c_i;
    {
        BinaryMask outer(w, h);
        for (const Pixel& p : region) {
            for (const Offset& o : kNeighbors8) {
                const Pixel q = p + o;
                if (mask.in_bounds(q) && !mask.at(q) && !outer.at(q)) {
                    outer.set(q, true);
                    c_o.push_back(q);
                }
            }
        }
        for (const Pixel& p : region)
            for (const Offset& o : kNeighbors8) {
                const Pixel q = p + o;
                if (outer.in_bounds(q) && outer.at(q)) {
                    c_i.push_back(p);
                    break;
                }
            }
    }
    if (c_o.empty() || c_i.empty()) return std::nullopt;

    double mean_o = 0.0;
    for (const Pixel& p : c_o) mean_o += image.at(p);
    mean_o /= static_cast<double>(c_o.size());

    // Candidate translations keep the whole region inside the image and on
    // pure background. A row-sum table gives a cheap all-background accept
    // for the region's bounding box.
    int r0 = region[0].row, r1 = r0, c0 = region[0].col, c1 = c0;
    for (const Pixel& p : region) {
        r0 = std::min(r0, p.row);
        r1 = std::max(r1, p.row);
        c0 = std::min(c0, p.col);
        c1 = std::max(c1, p.col);
    }
    std::vector<std::int64_t> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            integral[static_cast<std::size_t>(r + 1) * (w + 1) + c + 1] =
                integral[static_cast<std::size_t>(r) * (w + 1) + c + 1] +
                integral[static_cast<std::size_t>(r + 1) * (w + 1) + c] -
                integral[static_cast<std::size_t>(r) * (w + 1) + c] + (mask.at(r, c) ? 1 : 0);
    auto box_sum = [&](int rr0, int cc0, int rr1, int cc1) {
        return integral[static_cast<std::size_t>(rr1 + 1) * (w + 1) + cc1 + 1] -
               integral[static_cast<std::size_t>(rr0) * (w + 1) + cc1 + 1] -
               integral[static_cast<std::size_t>(rr1 + 1) * (w + 1) + cc0] +
               integral[static_cast<std::size_t>(rr0) * (w + 1) + cc0];
    };

    std::vector<Offset> candidates;
    for (int dr = -r0; dr <= h - 1 - r1; ++dr) {
        for (int dc = -c0; dc <= w - 1 - c1; ++dc) {
            if (box_sum(r0 + dr, c0 + dc, r1 + dr, c1 + dc) == 0) {
                candidates.push_back({dr, dc});
                continue;
            }
            bool clear = true;
            for (const Pixel& p : region) {
                if (mask.at(p.row + dr, p.col + dc)) {
                    clear = false;
                    break;
                }
            }
            if (clear) candidates.push_back({dr, dc});
        }
    }

    rng.shuffle(candidates);
    for (const Offset& d : candidates) {
        double mean_i = 0.0;
        for (const Pixel& p : c_i) mean_i += image.at(p.row + d.drow, p.col + d.dcol);
        mean_i /= static_cast<double>(c_i.size());
        if (std::abs(mean_o - mean_i) < t_b) return d;
    }
    return std::nullopt;
}

void synthesize_discontinuity(GrayImage& image, const BinaryMask& s_a, Offset offset) {
    for (const Pixel& p : s_a.foreground()) {
        const Pixel q = p + offset;
        if (!image.in_bounds(q))
            throw std::invalid_argument("synthesize_discontinuity: offset leaves the image");
        image.set(p, image.at(q));
    }
}

AugmentResult augment_image(const GrayImage& image, const BinaryMask& mask,
                            const VesselGraph& graph, const AugmentParams& params, Rng& rng) {
    AugmentResult result{image, {}, {}};

    std::vector<double> segment_lengths;
    segment_lengths.reserve(graph.edges.size());
    for (const GraphEdge& e : graph.edges) segment_lengths.push_back(total_path_length(e.mas));
    std::vector<std::uint8_t> used(graph.edges.size(), 0);

    const int n = rng.uniform_int(params.n_range.lo, params.n_range.hi);
    int applied = 0, failures = 0;
    while (applied < n && failures < params.max_attempts) {
        const double l = rng.uniform_real(params.l_range.lo, params.l_range.hi);
        double l_d = rng.uniform_real(params.l_d_range.lo, params.l_d_range.hi);
        int redraws = 0;
        while (l_d >= l && ++redraws <= 64)
            l_d = rng.uniform_real(params.l_d_range.lo, params.l_d_range.hi);
        if (l_d >= l) {
            ++failures;
            result.skips.push_back({"discontinuity length kept exceeding segment length"});
            continue;
        }

        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < graph.edges.size(); ++i)
            if (!used[i] && segment_lengths[i] > l) eligible.push_back(i);
        if (eligible.empty()) {
            ++failures;
            result.skips.push_back({"no eligible segment"});
            continue;
        }
        const std::size_t edge_idx = eligible[rng.uniform_index(eligible.size())];
        const std::vector<Pixel>& mas = graph.edges[edge_idx].mas;

        const auto center = select_center(mas, l, rng);
        if (!center) {
            ++failures;
            result.skips.push_back({"segment too short"});
            continue;
        }
        const Pixel p_c = mas[*center];

        const auto i_m = local_background_mean(result.image, mask, p_c, l);
        if (!i_m) {
            ++failures;
            result.skips.push_back({"no background in window"});
            continue;
        }

        const ProfileWaypoints w = locate_waypoints(mas, *center, l, l_d);
        const std::vector<double> profile = preservation_profile(mas, w);

        std::vector<Pixel> extras;
        for (std::size_t i = 0; i < graph.edges.size(); ++i) {
            if (i == edge_idx) continue;
            extras.insert(extras.end(), graph.edges[i].mas.begin(), graph.edges[i].mas.end());
        }
        const PreservationField field = expand_profile(mas, profile, mask, extras);

        result.image = attenuate(result.image, mask, field, *i_m);

        const BinaryMask s_a = field.zero_set();
        std::optional<Offset> patch;
        if (s_a.count() > 0) {
            patch = find_background_patch(mask, s_a, result.image, params.t_b, rng);
            if (patch)
                synthesize_discontinuity(result.image, s_a, *patch);
            else
                result.skips.push_back({"no matching background patch; kept attenuation only"});
        }

        result.edits.push_back({static_cast<int>(edge_idx), p_c, l, l_d, patch});
        used[edge_idx] = 1;
        ++applied;
    }
    return result;
}

}  // namespace vsal
