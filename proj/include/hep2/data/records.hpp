#pragma once

#include <array>
#include <string>
#include <vector>

#include "hep2/error.hpp"

namespace hep2::data {

/// Class order follows the reporting convention used throughout:
/// confusion matrices and CCR vectors are always in this order.
inline constexpr std::array<const char*, 6> kClassNames = {
    "Homogeneous", "Speckled", "Nucleolar", "Centromere", "NuMem", "Golgi"};

inline constexpr int kNumClasses = 6;

int label_from_name(const std::string& name);
std::string name_from_label(int label);

/// Single-channel image, intensities nominally in [0, 1], row-major.
struct GrayImage {
    int height = 0;
    int width = 0;
    std::vector<float> pixels;

    GrayImage() = default;
    GrayImage(int h, int w) : height(h), width(w), pixels(static_cast<std::size_t>(h) * w, 0.f) {}

    float& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    float at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool square() const { return height == width; }
};

/// Which geometric variant of the source cell this record is. Rotations are
/// counterclockwise quarter turns; mirrored variants record the rotation the
/// mirror was applied to.
struct Provenance {
    int quarter_turns = 0;  // 0..3
    bool mirrored = false;

    bool original() const { return quarter_turns == 0 && !mirrored; }
    bool operator==(const Provenance&) const = default;

    std::string str() const;
    static Provenance parse(const std::string& s);
};

/// One cell image with its label and source specimen — the unit of every
/// dataset in the toolkit.
struct CellRecord {
    GrayImage pixels;
    int label = 0;
    std::string specimen_id;
    Provenance provenance;
};

using Records = std::vector<CellRecord>;

/// Distinct specimen ids in order of first appearance.
std::vector<std::string> specimen_order(const Records& records);

/// Per-class record counts in class order.
std::array<std::int64_t, kNumClasses> class_counts(const Records& records);

}  // namespace hep2::data
