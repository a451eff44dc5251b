#pragma once

#include <string>
#include <vector>

#include "hep2/data/records.hpp"

namespace hep2::data {

/// Specimen slide image: many cells of one staining pattern.
struct SpecimenImage {
    GrayImage pixels;
    std::string specimen_id;
    int label = 0;
};

/// Binary foreground mask, same dimensions as its specimen image.
struct SegmentationMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> fg;

    bool at(int y, int x) const { return fg[static_cast<std::size_t>(y) * width + x] != 0; }
};

SegmentationMask mask_from_image(const GrayImage& img, float threshold = 0.5f);

/// 8-connected foreground components in row-major discovery order.
/// Exposed separately so tests can cross-check component counts.
struct Component {
    std::int64_t sum_y = 0, sum_x = 0;
    std::int64_t area = 0;
    int centroid_y() const;
    int centroid_x() const;
};

std::vector<Component> connected_components(const SegmentationMask& mask);

/// One box x box crop per mask component, centered on the component
/// centroid (rounded to nearest pixel). Crops that would cross the image
/// border are skipped. An empty mask yields an empty list.
Records extract_cells(const SpecimenImage& spec, const SegmentationMask& mask, int box = 77);

}  // namespace hep2::data
