#pragma once

#include <string>

#include "hep2/data/records.hpp"

namespace hep2::data {

/// Reads a grayscale PNG or PGM (by extension). Color PNGs are converted by
/// luminance. Intensities are scaled to [0, 1] by the file's max value
/// unless scale_to_unit is false, in which case raw sample values are kept.
GrayImage load_image(const std::string& path, bool scale_to_unit = true);

/// Writes 8-bit grayscale; values are clamped to [0, 1] and quantized.
/// Format chosen by extension (.png or .pgm). Output bytes are a pure
/// function of the pixels.
void save_image(const std::string& path, const GrayImage& img);

/// Bilinear resize of a square image to side x side (half-pixel-center
/// sampling, so an identity resize is exact). Output intensities stay
/// within the input's [min, max].
GrayImage resize_bilinear(const GrayImage& img, int side = 60);

/// Exact counterclockwise quarter-turn rotation.
GrayImage rotate_quarter(const GrayImage& img, int quarter_turns);

/// Exact horizontal (left-right) flip.
GrayImage mirror_lr(const GrayImage& img);

/// Record-level wrappers; provenance composes (rotation adds quarter turns,
/// mirror marks the variant it was applied to).
CellRecord rotate(const CellRecord& cell, int quarter_turns);
CellRecord mirror(const CellRecord& cell);
CellRecord resize_bilinear(const CellRecord& cell, int side = 60);

}  // namespace hep2::data
