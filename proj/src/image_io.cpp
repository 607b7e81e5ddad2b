#include "vsal/image_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <string>

namespace vsal {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) throw IoError("cannot open " + path.string());
    return f;
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw IoError(path.string() + ": " + what);
}

// ---- PGM (binary P5) ----

int pgm_next_value(std::FILE* f, const std::filesystem::path& path) {
    // Skips whitespace and '#' comments, then reads one decimal number.
    int ch = std::fgetc(f);
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = std::fgetc(f);
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = std::fgetc(f);
    }
    if (ch == EOF || !std::isdigit(ch)) fail(path, "malformed PGM header");
    long v = 0;
    while (ch != EOF && std::isdigit(ch)) {
        v = v * 10 + (ch - '0');
        if (v > 1 << 30) fail(path, "malformed PGM header");
        ch = std::fgetc(f);
    }
    return static_cast<int>(v);
}

GrayImage load_pgm(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    char magic[2];
    if (std::fread(magic, 1, 2, f.get()) != 2 || magic[0] != 'P' || magic[1] != '5')
        fail(path, "not a binary PGM");
    const int w = pgm_next_value(f.get(), path);
    const int h = pgm_next_value(f.get(), path);
    const int maxval = pgm_next_value(f.get(), path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        fail(path, "malformed PGM header");
    // A single whitespace byte separates the header from the raster; the
    // header reader has already consumed it.
    const bool wide = maxval > 255;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<std::uint8_t> raw(n * (wide ? 2 : 1));
    if (std::fread(raw.data(), 1, raw.size(), f.get()) != raw.size())
        fail(path, "truncated PGM data");
    GrayImage img(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * w + c;
            long v = wide ? (raw[2 * i] << 8 | raw[2 * i + 1]) : raw[i];
            if (v > maxval) fail(path, "sample exceeds maxval");
            img.set(r, c, static_cast<double>(v) * 255.0 / maxval);
        }
    }
    return img;
}

// ---- PNG ----

GrayImage load_png_gray(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png init failed");
    }
    std::vector<png_bytep> row_ptrs;
    std::vector<std::uint8_t> data;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "png decode error");
    }
    png_init_io(png, f.get());
    png_read_info(png, info);

    const png_byte color = png_get_color_type(png, info);
    if (color != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported channel count");
    }
    if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    data.resize(stride * h);
    row_ptrs.resize(h);
    for (int r = 0; r < h; ++r) row_ptrs[r] = data.data() + stride * r;
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    GrayImage img(w, h);
    const long maxval = depth == 16 ? 65535 : 255;
    for (int r = 0; r < h; ++r) {
        const std::uint8_t* row = data.data() + stride * r;
        for (int c = 0; c < w; ++c) {
            long v = depth == 16 ? (row[2 * c] << 8 | row[2 * c + 1]) : row[c];
            img.set(r, c, static_cast<double>(v) * 255.0 / maxval);
        }
    }
    return img;
}

void save_png_bytes(const std::filesystem::path& path, int w, int h,
                    const std::vector<std::uint8_t>& bytes) {
    FilePtr f = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png init failed");
    }
    std::vector<png_bytep> row_ptrs(h);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "png encode error");
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int r = 0; r < h; ++r)
        row_ptrs[r] = const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(r) * w);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

bool has_png_magic(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    std::uint8_t magic[8] = {};
    const std::size_t n = std::fread(magic, 1, 8, f.get());
    return n == 8 && png_sig_cmp(magic, 0, 8) == 0;
}

}  // namespace

GrayImage load_gray(const std::filesystem::path& path) {
    if (has_png_magic(path)) return load_png_gray(path);
    return load_pgm(path);
}

BinaryMask load_mask(const std::filesystem::path& path) {
    const GrayImage img = load_gray(path);
    BinaryMask mask(img.width(), img.height());
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
            mask.set(r, c, img.at(r, c) > 0.0);
    return mask;
}

void save_gray_png(const GrayImage& image, const std::filesystem::path& path) {
    const int w = image.width(), h = image.height();
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            bytes[static_cast<std::size_t>(r) * w + c] =
                static_cast<std::uint8_t>(std::lround(image.at(r, c)));
    save_png_bytes(path, w, h, bytes);
}

void save_gray_pgm(const GrayImage& image, const std::filesystem::path& path, int maxval) {
    if (maxval != 255 && maxval != 65535)
        throw std::invalid_argument("save_gray_pgm: maxval must be 255 or 65535");
    FilePtr f = open_file(path, "wb");
    std::string header = "P5\n" + std::to_string(image.width()) + " " +
                         std::to_string(image.height()) + "\n" + std::to_string(maxval) + "\n";
    if (std::fwrite(header.data(), 1, header.size(), f.get()) != header.size())
        fail(path, "write failed");
    for (int r = 0; r < image.height(); ++r) {
        for (int c = 0; c < image.width(); ++c) {
            if (maxval == 255) {
                const std::uint8_t b = static_cast<std::uint8_t>(std::lround(image.at(r, c)));
                if (std::fwrite(&b, 1, 1, f.get()) != 1) fail(path, "write failed");
            } else {
                const long v = std::lround(image.at(r, c) * 257.0);
                const std::uint8_t b[2] = {static_cast<std::uint8_t>(v >> 8),
                                           static_cast<std::uint8_t>(v & 0xff)};
                if (std::fwrite(b, 1, 2, f.get()) != 2) fail(path, "write failed");
            }
        }
    }
}

void save_mask_png(const BinaryMask& mask, const std::filesystem::path& path) {
    const int w = mask.width(), h = mask.height();
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            bytes[static_cast<std::size_t>(r) * w + c] = mask.at(r, c) ? 255 : 0;
    save_png_bytes(path, w, h, bytes);
}

void save_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path) {
    GrayImage img(mask.width(), mask.height());
    for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c)
            img.set(r, c, mask.at(r, c) ? 255.0 : 0.0);
    save_gray_pgm(img, path);
}

void save_field_pfm(const ScalarField& field, const std::filesystem::path& path) {
    static_assert(std::endian::native == std::endian::little,
                  "PFM writer assumes a little-endian host");
    FilePtr f = open_file(path, "wb");
    std::string header = "Pf\n" + std::to_string(field.width()) + " " +
                         std::to_string(field.height()) + "\n-1.0\n";
    if (std::fwrite(header.data(), 1, header.size(), f.get()) != header.size())
        fail(path, "write failed");
    // PFM scanlines run bottom to top.
    std::vector<float> row(field.width());
    for (int r = field.height() - 1; r >= 0; --r) {
        for (int c = 0; c < field.width(); ++c)
            row[c] = field.valid(r, c) ? field.value(r, c)
                                       : std::numeric_limits<float>::quiet_NaN();
        if (std::fwrite(row.data(), sizeof(float), row.size(), f.get()) != row.size())
            fail(path, "write failed");
    }
}

ScalarField load_field_pfm(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    char magic[2];
    if (std::fread(magic, 1, 2, f.get()) != 2 || magic[0] != 'P' || magic[1] != 'f')
        fail(path, "not a grayscale PFM");
    const int w = pgm_next_value(f.get(), path);
    const int h = pgm_next_value(f.get(), path);
    // Scale line: sign gives byte order.
    double scale = 0.0;
    if (std::fscanf(f.get(), "%lf", &scale) != 1 || scale >= 0.0)
        fail(path, "unsupported PFM scale (expect negative / little-endian)");
    if (std::fgetc(f.get()) == EOF) fail(path, "truncated PFM");
    if (w <= 0 || h <= 0) fail(path, "malformed PFM header");

    ScalarField field(w, h);
    std::vector<float> row(w);
    for (int r = h - 1; r >= 0; --r) {
        if (std::fread(row.data(), sizeof(float), row.size(), f.get()) != row.size())
            fail(path, "truncated PFM data");
        for (int c = 0; c < w; ++c) {
            if (std::isfinite(row[c]))
                field.set(r, c, row[c]);
            else
                field.set_invalid({r, c});
        }
    }
    return field;
}

void save_field_viz_png(const ScalarField& field, const std::filesystem::path& path) {
    const int w = field.width(), h = field.height();
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h, 0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!field.valid(r, c)) continue;
            const double t = std::clamp((field.value(r, c) + 1.0) / 2.0, 0.0, 1.0);
            bytes[static_cast<std::size_t>(r) * w + c] =
                static_cast<std::uint8_t>(std::lround(t * 255.0));
        }
    }
    save_png_bytes(path, w, h, bytes);
}

}  // namespace vsal
