#pragma once

// Localization scoring for synthetic blobs: binarize a heatmap at its
// top-fraction quantile and intersect with the ground-truth disk.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "common.hpp"
#include "dataset.hpp"

namespace ts::harness {

// The predicted mask is the ceil(fraction * N) hottest pixels, widened by
// value ties. Returns |mask AND disk| / |mask OR disk|.
inline double blob_iou(const std::vector<float>& heat, int size, const BlobTruth& truth,
                       double fraction = 0.2) {
    check_arg(size > 0 && heat.size() == static_cast<size_t>(size) * size, "blob_iou: bad heatmap");
    check_arg(fraction > 0.0 && fraction <= 1.0, "blob_iou: fraction must lie in (0, 1]");

    const size_t keep = std::max<size_t>(
        1, static_cast<size_t>(std::ceil(fraction * static_cast<double>(heat.size()))));
    std::vector<float> sorted(heat);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<ptrdiff_t>(keep - 1), sorted.end(),
                     std::greater<float>());
    const float threshold = sorted[keep - 1];

    const double radius2 = truth.mask_radius() * truth.mask_radius();
    int64_t inter = 0, uni = 0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const bool hot = heat[static_cast<size_t>(y) * size + x] >= threshold;
            const double dy = y - truth.cy, dx = x - truth.cx;
            const bool in_disk = dy * dy + dx * dx <= radius2;
            inter += hot && in_disk;
            uni += hot || in_disk;
        }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace ts::harness
