#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vsal/raster.hpp"
#include "vsal/topology.hpp"

namespace vsal {

struct LvsParams {
    double r_b{4.0};  // background sampling disk radius
    int k{15};        // smoothing half-window along the medial axis
};

// Graph clean-up applied before per-edge salience estimation.
struct GraphParams {
    double min_branch_len{5.0};
    double merge_radius{3.0};
};

// Vessel cross-section through a medial-axis pixel: the two contour pixels
// roughly opposite each other plus the rasterized section s_v between them.
struct CrossSection {
    Pixel p_c1;
    Pixel p_c2;
    std::vector<Pixel> s_v;
};

// Per-edge salience series; entries are std::nullopt where the cross-section
// or background sampling failed.
struct MasSalience {
    std::vector<std::optional<double>> delta;  // relative local contrast
    std::vector<std::optional<double>> lvs;    // smoothed along the axis
};

// Finds the cross-section at p. contour_pixels must be the contour pixel set
// of p's connected component. p_c1 is the nearest contour pixel (ties by
// row-major order); p_c2 is the nearest one on the opposite side, i.e. with
// strictly negative dot product against p_c1 - p, found by scanning in
// increasing-distance order. When p itself lies on the contour, p_c1 = p and
// p_c2 is simply the nearest other contour pixel. Returns std::nullopt when
// no opposite pixel exists.
std::optional<CrossSection> find_cross_section(Pixel p,
                                               std::span<const Pixel> contour_pixels,
                                               const BinaryMask& mask);

// Background sample: pixels of the two disks of radius r_b around the
// cross-section endpoints, minus mask foreground. May be empty.
std::vector<Pixel> sample_background(const CrossSection& cs, const BinaryMask& mask,
                                     double r_b);

// Relative contrast (mean(s_v) - mean(s_b)) / max of the two means; 0 when
// both means are 0. Throws std::invalid_argument on an empty sample.
double local_contrast(const GrayImage& image, std::span<const Pixel> s_v,
                      std::span<const Pixel> s_b);

// Mean over the defined entries of the window [i-k, i+k] clipped to the
// series; std::nullopt where the window holds no defined entry. k = 0
// returns the input unchanged.
std::vector<std::optional<double>> smooth_along_mas(
    std::span<const std::optional<double>> delta, int k);

// Spreads per-axis-pixel values to every foreground pixel: each takes the
// value of its nearest defined source (ties by source row, col, then list
// order). Background stays invalid. Throws std::invalid_argument when
// `values` is empty.
ScalarField expand_to_vessel(std::span<const std::pair<Pixel, double>> values,
                             const BinaryMask& mask);

// Full pipeline: skeletonize, graph extraction with pruning and merging,
// per-edge contrast + smoothing, expansion to all vessel pixels. Pixels
// whose estimation failed take the nearest defined value; if nothing is
// defined anywhere (e.g. empty mask) the field is all-invalid.
ScalarField compute_lvs_map(const GrayImage& image, const BinaryMask& mask,
                            const LvsParams& params = {},
                            const GraphParams& graph_params = {});

}  // namespace vsal
