#pragma once

// Class activation maps: the gradient of one logit with respect to the last
// conv activation, averaged into per-channel weights, spread back over that
// activation, and resampled to input resolution.

#include <cstdint>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "model.hpp"

namespace ts {

// Nearest keeps the coarse cells visible for debugging; bilinear is the
// normal rendering.
enum class UpsampleMode { bilinear, nearest };

struct Heatmap {
    int extent = 0;  // spatial side of the conv activation the map came from
    int size = 0;    // output side, matches the model input
    int target_class = 0;
    double raw_min = 0.0;  // of the resampled map before normalization
    double raw_max = 0.0;
    bool degenerate = false;    // relu zeroed the whole map; values stay zero
    std::vector<float> alpha;   // per-channel means of the logit gradient
    std::vector<float> coarse;  // extent x extent weighted activation, already relu'd
    std::vector<float> values;  // size x size, min-max normalized to [0, 1]
};

// Computes the activation map of one image for one class. A nonzero map is
// min-max normalized so its peak is exactly 1; an all-zero map keeps its
// zeros and sets the degenerate flag instead of failing.
Heatmap gradcam(Model<float>& model, const LabeledImage& image, int target_class,
                UpsampleMode mode = UpsampleMode::bilinear);

// Gray heatmap scaled to [0, 255].
void write_heatmap_pgm(const std::string& path, const Heatmap& h);

// Jet-ramp overlay: each pixel blends the gray source toward the ramp color
// of its heat with weight alpha * heat, so alpha 0 reproduces the source.
std::vector<uint8_t> overlay_rgb(const LabeledImage& image, const Heatmap& h, double alpha);
void write_overlay_ppm(const std::string& path, const LabeledImage& image, const Heatmap& h,
                       double alpha);

std::string heatmap_sidecar_text(const Heatmap& h);
void write_heatmap_sidecar(const std::string& path, const Heatmap& h);

}  // namespace ts
