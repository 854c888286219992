#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ts {

// Decoded raster with samples still in the source domain [0, maxval].
// maxval travels with the pixels so normalization knows the divisor and
// renormalizing an already-unit image is a no-op.
struct RawImage {
    int height = 0;
    int width = 0;
    int channels = 0;  // 1 (gray) or 3 (rgb)
    double maxval = 255.0;
    std::vector<float> samples;  // row-major, interleaved channels

    float at(int y, int x, int c) const {
        return samples[(static_cast<size_t>(y) * width + x) * channels + c];
    }
};

// PGM/PPM, ASCII (P2/P3) and binary (P5/P6), with header comments and
// 1- or 2-byte samples depending on maxval.
RawImage decode_pnm(const std::string& path);
RawImage decode_pnm_bytes(const std::vector<uint8_t>& bytes, const std::string& origin);

RawImage to_grayscale(const RawImage& img);
RawImage resize_bilinear(const RawImage& img, int out_h, int out_w);
RawImage normalize_unit(const RawImage& img);

void write_pgm(const std::string& path, int height, int width, const std::vector<uint8_t>& gray);
void write_ppm(const std::string& path, int height, int width, const std::vector<uint8_t>& rgb);

}  // namespace ts
