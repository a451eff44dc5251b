#include "hep2/data/extract.hpp"

#include <cmath>
#include <utility>

namespace hep2::data {

SegmentationMask mask_from_image(const GrayImage& img, float threshold) {
    SegmentationMask m;
    m.height = img.height;
    m.width = img.width;
    m.fg.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        m.fg[i] = img.pixels[i] >= threshold ? 1 : 0;
    return m;
}

int Component::centroid_y() const {
    return static_cast<int>(std::llround(static_cast<double>(sum_y) / static_cast<double>(area)));
}

int Component::centroid_x() const {
    return static_cast<int>(std::llround(static_cast<double>(sum_x) / static_cast<double>(area)));
}

std::vector<Component> connected_components(const SegmentationMask& mask) {
    const int h = mask.height, w = mask.width;
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(h) * w, 0);
    std::vector<Component> comps;
    std::vector<std::pair<int, int>> stack;

    for (int sy = 0; sy < h; ++sy)
        for (int sx = 0; sx < w; ++sx) {
            const std::size_t si = static_cast<std::size_t>(sy) * w + sx;
            if (!mask.fg[si] || visited[si]) continue;

            Component comp;
            stack.clear();
            stack.emplace_back(sy, sx);
            visited[si] = 1;
            while (!stack.empty()) {
                const auto [y, x] = stack.back();
                stack.pop_back();
                comp.sum_y += y;
                comp.sum_x += x;
                ++comp.area;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dy == 0 && dx == 0) continue;
                        const int ny = y + dy, nx = x + dx;
                        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.fg[ni] && !visited[ni]) {
                            visited[ni] = 1;
                            stack.emplace_back(ny, nx);
                        }
                    }
            }
            comps.push_back(comp);
        }
    return comps;
}

Records extract_cells(const SpecimenImage& spec, const SegmentationMask& mask, int box) {
    if (mask.height != spec.pixels.height || mask.width != spec.pixels.width)
        throw DataError("mask " + std::to_string(mask.height) + "x" + std::to_string(mask.width) +
                        " does not match specimen " + std::to_string(spec.pixels.height) + "x" +
                        std::to_string(spec.pixels.width) + " (specimen '" + spec.specimen_id +
                        "')");
    if (box <= 0) throw DataError("crop box must be positive");

    Records out;
    const int half = box / 2;
    for (const Component& comp : connected_components(mask)) {
        const int cy = comp.centroid_y();
        const int cx = comp.centroid_x();
        const int top = cy - half;
        const int left = cx - half;
        if (top < 0 || left < 0 || top + box > spec.pixels.height ||
            left + box > spec.pixels.width)
            continue;  // border cells are skipped, not padded

        CellRecord rec;
        rec.pixels = GrayImage(box, box);
        for (int y = 0; y < box; ++y)
            for (int x = 0; x < box; ++x)
                rec.pixels.at(y, x) = spec.pixels.at(top + y, left + x);
        rec.label = spec.label;
        rec.specimen_id = spec.specimen_id;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace hep2::data
