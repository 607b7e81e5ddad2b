#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vsal/raster.hpp"
#include "vsal/rng.hpp"

namespace fixtures {

using namespace vsal;

inline GrayImage uniform_image(int width, int height, double v) {
    GrayImage img(width, height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) img.set(r, c, v);
    return img;
}

inline void paint_rect(GrayImage& img, int r0, int c0, int r1, int c1, double v) {
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) img.set(r, c, v);
}

inline void paint_rect(BinaryMask& mask, int r0, int c0, int r1, int c1, bool v = true) {
    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c) mask.set(r, c, v);
}

// Horizontal bar of constant intensity on a constant background.
struct BarSample {
    GrayImage image;
    BinaryMask mask;
};

inline BarSample bar_sample(int width, int height, int r0, int r1, int c0, int c1,
                            double vessel, double background) {
    BarSample s{uniform_image(width, height, background), BinaryMask(width, height)};
    paint_rect(s.image, r0, c0, r1, c1, vessel);
    paint_rect(s.mask, r0, c0, r1, c1);
    return s;
}

inline BinaryMask random_mask(int width, int height, double density, Rng& rng) {
    BinaryMask m(width, height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) m.set(r, c, rng.uniform_real(0.0, 1.0) < density);
    return m;
}

// ---- independent oracles -------------------------------------------------

inline int count_components8(const BinaryMask& m) {
    BinaryMask seen(m.width(), m.height());
    int comps = 0;
    for (int r = 0; r < m.height(); ++r) {
        for (int c = 0; c < m.width(); ++c) {
            if (!m.at(r, c) || seen.at(r, c)) continue;
            ++comps;
            std::vector<Pixel> stack{{r, c}};
            seen.set(r, c, true);
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                for (const Offset& o : kNeighbors8) {
                    const Pixel q = p + o;
                    if (m.in_bounds(q) && m.at(q) && !seen.at(q)) {
                        seen.set(q, true);
                        stack.push_back(q);
                    }
                }
            }
        }
    }
    return comps;
}

// 4-connected background components that do not touch the image border.
inline int count_holes4(const BinaryMask& m) {
    BinaryMask seen(m.width(), m.height());
    int holes = 0;
    for (int r = 0; r < m.height(); ++r) {
        for (int c = 0; c < m.width(); ++c) {
            if (m.at(r, c) || seen.at(r, c)) continue;
            bool touches_border = false;
            std::vector<Pixel> stack{{r, c}};
            seen.set(r, c, true);
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                if (p.row == 0 || p.row == m.height() - 1 || p.col == 0 ||
                    p.col == m.width() - 1)
                    touches_border = true;
                for (const Offset& o : kNeighbors4) {
                    const Pixel q = p + o;
                    if (m.in_bounds(q) && !m.at(q) && !seen.at(q)) {
                        seen.set(q, true);
                        stack.push_back(q);
                    }
                }
            }
            if (!touches_border) ++holes;
        }
    }
    return holes;
}

// Foreground pixels with a background 8-neighbour; outside the image counts
// as background.
inline std::set<Pixel> border_pixels(const BinaryMask& m) {
    std::set<Pixel> out;
    for (int r = 0; r < m.height(); ++r) {
        for (int c = 0; c < m.width(); ++c) {
            if (!m.at(r, c)) continue;
            for (const Offset& o : kNeighbors8) {
                const Pixel q = Pixel{r, c} + o;
                if (!m.in_bounds(q) || !m.at(q)) {
                    out.insert({r, c});
                    break;
                }
            }
        }
    }
    return out;
}

// Same tie-break contract as nearest_source_index: squared distance, then
// source row, col, then position in the list.
inline std::vector<std::int32_t> brute_nearest(std::span<const Pixel> sources,
                                               const BinaryMask& domain) {
    std::vector<std::int32_t> out(
        static_cast<std::size_t>(domain.width()) * domain.height(), -1);
    for (int r = 0; r < domain.height(); ++r) {
        for (int c = 0; c < domain.width(); ++c) {
            if (!domain.at(r, c)) continue;
            std::int32_t best = -1;
            std::int64_t best_d = 0;
            for (std::size_t i = 0; i < sources.size(); ++i) {
                const std::int64_t d = squared_distance({r, c}, sources[i]);
                if (best < 0 || d < best_d ||
                    (d == best_d && sources[i] < sources[best])) {
                    best = static_cast<std::int32_t>(i);
                    best_d = d;
                }
            }
            out[static_cast<std::size_t>(r) * domain.width() + c] = best;
        }
    }
    return out;
}

inline std::vector<Pixel> brute_disk(Pixel center, double radius, int width, int height) {
    std::vector<Pixel> out;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            if (static_cast<double>(squared_distance({r, c}, center)) <= radius * radius)
                out.push_back({r, c});
    return out;
}

// ---- filesystem helpers ----------------------------------------------------

class TempDir {
  public:
    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "vsal_test_XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline std::string read_file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

}  // namespace fixtures
