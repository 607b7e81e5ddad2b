#pragma once

#include <array>
#include <cassert>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace vsal {

// Integer pixel coordinate, row-major ordering (top-left origin).
struct Pixel {
    int row{0};
    int col{0};

    auto operator<=>(const Pixel&) const = default;
};

// Translation in pixel units.
struct Offset {
    int drow{0};
    int dcol{0};

    auto operator<=>(const Offset&) const = default;
};

inline Pixel operator+(Pixel p, Offset o) { return {p.row + o.drow, p.col + o.dcol}; }
inline Offset operator-(Pixel a, Pixel b) { return {a.row - b.row, a.col - b.col}; }

inline std::int64_t squared_distance(Pixel a, Pixel b) {
    const std::int64_t dr = a.row - b.row;
    const std::int64_t dc = a.col - b.col;
    return dr * dr + dc * dc;
}

// 8-neighbourhood offsets in row-major scan order.
inline constexpr std::array<Offset, 8> kNeighbors8 = {{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
}};

inline constexpr std::array<Offset, 4> kNeighbors4 = {{
    {-1, 0}, {0, -1}, {0, 1}, {1, 0},
}};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Grayscale raster on the canonical [0, 255] intensity scale.
class GrayImage {
  public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          values_(static_cast<std::size_t>(width) * height, fill) {
        assert(width >= 0 && height >= 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return values_.empty(); }

    bool in_bounds(Pixel p) const {
        return p.row >= 0 && p.row < height_ && p.col >= 0 && p.col < width_;
    }

    double at(Pixel p) const {
        assert(in_bounds(p));
        return values_[index(p)];
    }
    double at(int row, int col) const { return at(Pixel{row, col}); }

    void set(Pixel p, double v) {
        assert(in_bounds(p));
        assert(v >= 0.0 && v <= 255.0);
        values_[index(p)] = v;
    }
    void set(int row, int col, double v) { set(Pixel{row, col}, v); }

    const std::vector<double>& values() const { return values_; }

    bool operator==(const GrayImage&) const = default;

  private:
    std::size_t index(Pixel p) const {
        return static_cast<std::size_t>(p.row) * width_ + p.col;
    }

    int width_{0};
    int height_{0};
    std::vector<double> values_;
};

// Binary segmentation mask; true marks foreground (vessel).
class BinaryMask {
  public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          values_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {
        assert(width >= 0 && height >= 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return values_.empty(); }

    bool in_bounds(Pixel p) const {
        return p.row >= 0 && p.row < height_ && p.col >= 0 && p.col < width_;
    }

    bool at(Pixel p) const {
        assert(in_bounds(p));
        return values_[index(p)] != 0;
    }
    bool at(int row, int col) const { return at(Pixel{row, col}); }

    void set(Pixel p, bool v) {
        assert(in_bounds(p));
        values_[index(p)] = v ? 1 : 0;
    }
    void set(int row, int col, bool v) { set(Pixel{row, col}, v); }

    // Number of foreground pixels.
    std::int64_t count() const;

    // Foreground pixels in row-major order.
    std::vector<Pixel> foreground() const;

    bool operator==(const BinaryMask&) const = default;

  private:
    std::size_t index(Pixel p) const {
        return static_cast<std::size_t>(p.row) * width_ + p.col;
    }

    int width_{0};
    int height_{0};
    std::vector<std::uint8_t> values_;
};

// Per-pixel real-valued map with an explicit validity flag per pixel.
// Values are stored as float32 so persistence round-trips bit-exactly.
class ScalarField {
  public:
    ScalarField() = default;
    ScalarField(int width, int height)
        : width_(width), height_(height),
          values_(static_cast<std::size_t>(width) * height, 0.0f),
          valid_(static_cast<std::size_t>(width) * height, 0) {
        assert(width >= 0 && height >= 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(Pixel p) const {
        return p.row >= 0 && p.row < height_ && p.col >= 0 && p.col < width_;
    }

    bool valid(Pixel p) const {
        assert(in_bounds(p));
        return valid_[index(p)] != 0;
    }
    bool valid(int row, int col) const { return valid(Pixel{row, col}); }

    float value(Pixel p) const {
        assert(in_bounds(p));
        return values_[index(p)];
    }
    float value(int row, int col) const { return value(Pixel{row, col}); }

    void set(Pixel p, float v) {
        assert(in_bounds(p));
        values_[index(p)] = v;
        valid_[index(p)] = 1;
    }
    void set(int row, int col, float v) { set(Pixel{row, col}, v); }

    void set_invalid(Pixel p) {
        assert(in_bounds(p));
        values_[index(p)] = 0.0f;
        valid_[index(p)] = 0;
    }

    std::int64_t valid_count() const;

  private:
    std::size_t index(Pixel p) const {
        return static_cast<std::size_t>(p.row) * width_ + p.col;
    }

    int width_{0};
    int height_{0};
    std::vector<float> values_;
    std::vector<std::uint8_t> valid_;
};

// 8-connected Bresenham segment from a to b, both endpoints included.
// Reversing the endpoints yields the exact reversed pixel sequence.
std::vector<Pixel> rasterize_line(Pixel a, Pixel b);

// In-bounds pixels q with ||q - center||_2 <= radius, row-major order.
std::vector<Pixel> disk_pixels(Pixel center, double radius, int width, int height);

// Labels 8-connected foreground components 0..n-1 in row-major discovery
// order; background gets -1. Returns the label raster and component count.
std::pair<std::vector<std::int32_t>, int> label_components(const BinaryMask& mask);

// For every foreground pixel of `domain`, the index of the nearest source
// (squared Euclidean distance, ties by source row, col, then list position).
// Background pixels get -1. Sources must be non-empty.
std::vector<std::int32_t> nearest_source_index(std::span<const Pixel> sources,
                                               const BinaryMask& domain);

}  // namespace vsal
