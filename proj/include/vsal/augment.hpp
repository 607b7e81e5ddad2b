#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsal/raster.hpp"
#include "vsal/rng.hpp"
#include "vsal/topology.hpp"

namespace vsal {

struct IntRange {
    int lo{0};
    int hi{0};
};

struct RealRange {
    double lo{0.0};
    double hi{0.0};
};

struct AugmentParams {
    IntRange n_range{50, 100};     // edits per image
    RealRange l_range{20.0, 100.0};   // attenuated stretch length
    RealRange l_d_range{0.0, 30.0};   // fully suppressed stretch length
    double t_b{5.0};               // background patch acceptance threshold
    int max_attempts{100};         // failed draws before giving up
};

// Per-axis-pixel intensity preservation factors for one segment edit.
struct ProfileWaypoints {
    std::size_t p_1, p_d1, p_c, p_d2, p_2;  // indices into the segment mas
};

// Preservation factor per vessel pixel; pixels outside the affected region
// implicitly keep factor 1 and are never touched.
class PreservationField {
  public:
    PreservationField() = default;
    PreservationField(int width, int height)
        : width_(width), height_(height),
          factor_(static_cast<std::size_t>(width) * height, 1.0),
          covered_(static_cast<std::size_t>(width) * height, 0) {}

    int width() const { return width_; }
    int height() const { return height_; }

    double factor(Pixel p) const {
        return covered_[index(p)] ? factor_[index(p)] : 1.0;
    }
    bool covered(Pixel p) const { return covered_[index(p)] != 0; }
    void set(Pixel p, double f) {
        factor_[index(p)] = f;
        covered_[index(p)] = 1;
    }

    // Pixels with factor exactly zero (the fully suppressed region).
    BinaryMask zero_set() const;

  private:
    std::size_t index(Pixel p) const {
        return static_cast<std::size_t>(p.row) * width_ + p.col;
    }

    int width_{0};
    int height_{0};
    std::vector<double> factor_;
    std::vector<std::uint8_t> covered_;
};

struct AppliedEdit {
    int segment{0};  // edge index in the graph
    Pixel p_c;
    double l{0.0};
    double l_d{0.0};
    std::optional<Offset> patch_offset;  // unset when no matching patch
};

struct SkippedAttempt {
    std::string reason;
};

struct AugmentResult {
    GrayImage image;
    std::vector<AppliedEdit> edits;
    std::vector<SkippedAttempt> skips;
};

// Uniform draw among mas indices whose path distance to both segment ends
// exceeds l/2; std::nullopt when no index qualifies.
std::optional<std::size_t> select_center(std::span<const Pixel> mas, double l, Rng& rng);

// Walks outward from the centre: p_1/p_2 are the first indices at path
// distance >= l/2, p_d1/p_d2 the first at >= l_d/2.
ProfileWaypoints locate_waypoints(std::span<const Pixel> mas, std::size_t p_c_idx,
                                  double l, double l_d);

// Factor per mas index: 1 outside [p_1, p_2], 0 on [p_d1, p_d2], linear
// ramps between. A zero-length ramp degenerates to the plateau value.
std::vector<double> preservation_profile(std::span<const Pixel> mas,
                                         const ProfileWaypoints& w);

// Spreads per-index factors to vessel pixels via nearest-axis-pixel
// assignment. extra_unit_sources act as additional factor-1 sites (the other
// segments), so only pixels closest to this segment's affected stretch are
// marked.
PreservationField expand_profile(std::span<const Pixel> mas,
                                 std::span<const double> factors,
                                 const BinaryMask& mask,
                                 std::span<const Pixel> extra_unit_sources = {});

// Mean background intensity in the (2l+1)^2 window centred at p_c, clipped
// to the image; std::nullopt when the window holds no background pixel.
std::optional<double> local_background_mean(const GrayImage& image, const BinaryMask& mask,
                                            Pixel p_c, double l);

// I'(p) = f(p) * (I(p) - i_m) + i_m on covered vessel pixels with f < 1;
// the result is clamped to [0, 255] as a safety net.
GrayImage attenuate(const GrayImage& image, const BinaryMask& mask,
                    const PreservationField& field, double i_m);

// Finds a translation that moves s_a onto pure background whose inner-ring
// intensities match the outer ring of the original site within t_b.
// Candidates are scanned in seeded-shuffle order; std::nullopt when none
// qualifies.
std::optional<Offset> find_background_patch(const BinaryMask& mask, const BinaryMask& s_a,
                                            const GrayImage& image, double t_b, Rng& rng);

// Copies the intensities of the translated region into s_a.
void synthesize_discontinuity(GrayImage& image, const BinaryMask& s_a, Offset offset);

// Full augmentation of one image: n edits on distinct graph segments, each
// attenuation plus (when a matching patch exists) discontinuity synthesis.
// The mask is never modified.
AugmentResult augment_image(const GrayImage& image, const BinaryMask& mask,
                            const VesselGraph& graph, const AugmentParams& params, Rng& rng);

}  // namespace vsal
