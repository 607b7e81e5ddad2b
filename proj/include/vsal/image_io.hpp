#pragma once

#include <filesystem>

#include "vsal/raster.hpp"

namespace vsal {

// Loads a single-channel 8- or 16-bit PNG or binary PGM (P5), dispatching on
// the file's magic bytes. Sample values are rescaled to [0, 255] by the
// format's maximum value, so 8-bit data loads unchanged. Multi-channel
// images are rejected.
GrayImage load_gray(const std::filesystem::path& path);

// Same formats as load_gray; any sample > 0 becomes foreground.
BinaryMask load_mask(const std::filesystem::path& path);

// 8-bit grayscale PNG; values are rounded to the nearest integer.
void save_gray_png(const GrayImage& image, const std::filesystem::path& path);

// Binary PGM (P5). maxval 255 stores round(v); maxval 65535 stores
// round(v * 257) big-endian, which is lossless for integer-valued images.
void save_gray_pgm(const GrayImage& image, const std::filesystem::path& path,
                   int maxval = 255);

// Foreground as 255, background as 0.
void save_mask_png(const BinaryMask& mask, const std::filesystem::path& path);
void save_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path);

// PFM ("Pf", scale -1.0, little-endian float32). Invalid pixels are stored
// as quiet NaN; everything else round-trips bit-exactly.
void save_field_pfm(const ScalarField& field, const std::filesystem::path& path);
ScalarField load_field_pfm(const std::filesystem::path& path);

// 8-bit PNG rendering of a field: v maps to clamp((v+1)/2, 0, 1)*255,
// invalid pixels map to 0.
void save_field_viz_png(const ScalarField& field, const std::filesystem::path& path);

}  // namespace vsal
