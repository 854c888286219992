#include "gradcam.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "image.hpp"
#include "ops.hpp"

namespace ts {

namespace {

std::vector<float> upsample_nearest(const std::vector<float>& src, int extent, int size) {
    std::vector<float> out(static_cast<size_t>(size) * size);
    for (int y = 0; y < size; ++y) {
        const int sy = std::min(extent - 1, y * extent / size);
        for (int x = 0; x < size; ++x) {
            const int sx = std::min(extent - 1, x * extent / size);
            out[static_cast<size_t>(y) * size + x] = src[static_cast<size_t>(sy) * extent + sx];
        }
    }
    return out;
}

std::vector<float> upsample_bilinear(const std::vector<float>& src, int extent, int size) {
    RawImage img;
    img.height = extent;
    img.width = extent;
    img.channels = 1;
    img.maxval = 1.0;
    img.samples = src;
    return resize_bilinear(img, size, size).samples;
}

std::array<float, 3> jet(float t) {
    auto seg = [](float v) { return std::clamp(v, 0.0f, 1.0f); };
    return {seg(std::min(4.0f * t - 1.5f, -4.0f * t + 4.5f)),
            seg(std::min(4.0f * t - 0.5f, -4.0f * t + 3.5f)),
            seg(std::min(4.0f * t + 0.5f, -4.0f * t + 2.5f))};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io(strformat("cannot open '%s' for writing", path.c_str()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail_io(strformat("short write to '%s'", path.c_str()));
}

}  // namespace

Heatmap gradcam(Model<float>& model, const LabeledImage& image, int target_class,
                UpsampleMode mode) {
    check_arg(target_class == 0 || target_class == 1,
              strformat("gradcam: target class must be 0 or 1, got %d", target_class));
    check_arg(image.size == model.spec.input_size,
              strformat("gradcam: image is %d px but the model expects %d", image.size,
                        model.spec.input_size));

    auto batch = batch_tensor<float>({&image});
    Tape<float> tape;
    auto fwd = forward(&tape, model, batch, Mode::eval);
    auto target = pick(&tape, fwd.logits, target_class);  // one row, so the flat index is the class
    tape.backward(target);

    const auto& conv = fwd.last_conv;  // [1, C, E, E]
    if (!conv.has_grad()) fail_runtime("gradcam: no gradient reached the last conv activation");
    const int channels = conv.dim(1), extent = conv.dim(2);
    const int hw = extent * extent;
    const auto acts = conv.data();
    const auto grads = conv.grad();

    Heatmap h;
    h.extent = extent;
    h.size = model.spec.input_size;
    h.target_class = target_class;
    h.alpha.resize(static_cast<size_t>(channels));
    for (int k = 0; k < channels; ++k) {
        double sum = 0.0;
        for (int i = 0; i < hw; ++i) sum += grads[static_cast<size_t>(k) * hw + i];
        h.alpha[static_cast<size_t>(k)] = static_cast<float>(sum / hw);
    }
    h.coarse.assign(static_cast<size_t>(hw), 0.0f);
    for (int k = 0; k < channels; ++k)
        for (int i = 0; i < hw; ++i)
            h.coarse[static_cast<size_t>(i)] +=
                h.alpha[static_cast<size_t>(k)] * acts[static_cast<size_t>(k) * hw + i];
    for (auto& v : h.coarse) v = std::max(0.0f, v);

    const auto raw = mode == UpsampleMode::bilinear ? upsample_bilinear(h.coarse, extent, h.size)
                                                    : upsample_nearest(h.coarse, extent, h.size);
    const auto [mn, mx] = std::minmax_element(raw.begin(), raw.end());
    h.raw_min = *mn;
    h.raw_max = *mx;
    h.values.assign(raw.size(), 0.0f);
    if (*mx <= 0.0f) {
        h.degenerate = true;
    } else if (*mx > *mn) {
        const float lo = *mn, range = *mx - *mn;
        for (size_t i = 0; i < raw.size(); ++i) h.values[i] = (raw[i] - lo) / range;
    } else {
        h.values.assign(raw.size(), 1.0f);  // constant positive map
    }
    return h;
}

void write_heatmap_pgm(const std::string& path, const Heatmap& h) {
    check_arg(h.size > 0 && h.values.size() == static_cast<size_t>(h.size) * h.size,
              "write_heatmap_pgm: empty heatmap");
    std::vector<uint8_t> gray(h.values.size());
    for (size_t i = 0; i < gray.size(); ++i)
        gray[i] = static_cast<uint8_t>(std::lround(h.values[i] * 255.0f));
    write_pgm(path, h.size, h.size, gray);
}

std::vector<uint8_t> overlay_rgb(const LabeledImage& image, const Heatmap& h, double alpha) {
    check_arg(alpha >= 0.0 && alpha <= 1.0, "overlay: alpha must lie in [0, 1]");
    check_arg(image.size == h.size,
              strformat("overlay: image is %d px but the heatmap is %d", image.size, h.size));
    check_arg(h.values.size() == image.pixels.size(), "overlay: heatmap size mismatch");

    std::vector<uint8_t> rgb(h.values.size() * 3);
    for (size_t i = 0; i < h.values.size(); ++i) {
        const float gray = image.pixels[i];
        const float heat = h.values[i];
        const float w = static_cast<float>(alpha) * heat;
        const auto ramp = jet(heat);
        for (int c = 0; c < 3; ++c) {
            const float mixed = (1.0f - w) * gray + w * ramp[static_cast<size_t>(c)];
            rgb[i * 3 + static_cast<size_t>(c)] =
                static_cast<uint8_t>(std::lround(std::clamp(mixed, 0.0f, 1.0f) * 255.0f));
        }
    }
    return rgb;
}

void write_overlay_ppm(const std::string& path, const LabeledImage& image, const Heatmap& h,
                       double alpha) {
    write_ppm(path, h.size, h.size, overlay_rgb(image, h, alpha));
}

std::string heatmap_sidecar_text(const Heatmap& h) {
    std::string out = "tumorscope-heatmap v1\n";
    out += strformat("target_class %d\n", h.target_class);
    out += strformat("extent %d\n", h.extent);
    out += strformat("size %d\n", h.size);
    out += strformat("raw_min %s\n", fmt_g9(h.raw_min).c_str());
    out += strformat("raw_max %s\n", fmt_g9(h.raw_max).c_str());
    out += strformat("degenerate %d\n", h.degenerate ? 1 : 0);
    return out;
}

void write_heatmap_sidecar(const std::string& path, const Heatmap& h) {
    write_text(path, heatmap_sidecar_text(h));
}

}  // namespace ts
