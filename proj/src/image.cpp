#include "image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "common.hpp"

namespace ts {

namespace {

class PnmReader {
  public:
    PnmReader(const std::vector<uint8_t>& bytes, const std::string& origin)
        : bytes_(bytes), origin_(origin) {}

    // Next whitespace-delimited token, skipping '#' comments to end of line.
    std::string token() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size()) fail_format(strformat("%s: truncated header", origin_.c_str()));
        std::string t;
        while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) t.push_back(static_cast<char>(bytes_[pos_++]));
        return t;
    }

    int int_token(const char* what, int lo, int hi) {
        const std::string t = token();
        int v = 0;
        for (char ch : t) {
            if (ch < '0' || ch > '9') fail_format(strformat("%s: bad %s '%s'", origin_.c_str(), what, t.c_str()));
            v = v * 10 + (ch - '0');
            if (v > hi) fail_format(strformat("%s: %s %s out of range", origin_.c_str(), what, t.c_str()));
        }
        if (t.empty() || v < lo) fail_format(strformat("%s: bad %s '%s'", origin_.c_str(), what, t.c_str()));
        return v;
    }

    // Binary raster starts after exactly one whitespace byte following maxval.
    void start_raster() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            fail_format(strformat("%s: missing raster separator", origin_.c_str()));
        ++pos_;
    }

    uint8_t byte() {
        if (pos_ >= bytes_.size()) fail_format(strformat("%s: truncated raster", origin_.c_str()));
        return bytes_[pos_++];
    }

    uint16_t sample16() {
        const uint16_t hi = byte();
        return static_cast<uint16_t>((hi << 8) | byte());  // PNM 2-byte samples are big-endian
    }

  private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<uint8_t>& bytes_;
    std::string origin_;
    size_t pos_ = 0;
};

}  // namespace

RawImage decode_pnm_bytes(const std::vector<uint8_t>& bytes, const std::string& origin) {
    PnmReader r(bytes, origin);
    const std::string magic = r.token();
    int channels;
    bool ascii;
    if (magic == "P2") channels = 1, ascii = true;
    else if (magic == "P3") channels = 3, ascii = true;
    else if (magic == "P5") channels = 1, ascii = false;
    else if (magic == "P6") channels = 3, ascii = false;
    else fail_format(strformat("%s: unsupported magic '%s' (need P2/P3/P5/P6)", origin.c_str(), magic.c_str()));

    RawImage img;
    img.width = r.int_token("width", 1, 1 << 20);
    img.height = r.int_token("height", 1, 1 << 20);
    const int maxval = r.int_token("maxval", 1, 65535);
    img.channels = channels;
    img.maxval = maxval;
    const int64_t count = static_cast<int64_t>(img.width) * img.height * channels;
    if (count > (int64_t(1) << 30)) fail_format(strformat("%s: image too large", origin.c_str()));
    img.samples.resize(static_cast<size_t>(count));

    if (ascii) {
        for (int64_t i = 0; i < count; ++i) {
            const int v = r.int_token("sample", 0, 65535);
            if (v > maxval) fail_format(strformat("%s: sample %d exceeds maxval %d", origin.c_str(), v, maxval));
            img.samples[static_cast<size_t>(i)] = static_cast<float>(v);
        }
    } else {
        r.start_raster();
        if (maxval < 256) {
            for (int64_t i = 0; i < count; ++i) img.samples[static_cast<size_t>(i)] = r.byte();
        } else {
            for (int64_t i = 0; i < count; ++i) {
                const uint16_t v = r.sample16();
                if (v > maxval) fail_format(strformat("%s: sample %u exceeds maxval %d", origin.c_str(), v, maxval));
                img.samples[static_cast<size_t>(i)] = v;
            }
        }
    }
    return img;
}

RawImage decode_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io(strformat("cannot open image '%s'", path.c_str()));
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.empty()) fail_format(strformat("%s: empty file", path.c_str()));
    return decode_pnm_bytes(bytes, path);
}

RawImage to_grayscale(const RawImage& img) {
    check_arg(img.channels == 1 || img.channels == 3,
              strformat("to_grayscale: unsupported channel count %d", img.channels));
    if (img.channels == 1) return img;
    RawImage out;
    out.height = img.height;
    out.width = img.width;
    out.channels = 1;
    out.maxval = img.maxval;
    out.samples.resize(static_cast<size_t>(img.height) * img.width);
    for (size_t i = 0; i < out.samples.size(); ++i) {
        const float* px = &img.samples[i * 3];
        out.samples[i] = 0.299f * px[0] + 0.587f * px[1] + 0.114f * px[2];
    }
    return out;
}

// Bilinear with the half-pixel (align_corners=false) convention:
// src = (dst + 0.5) * in/out - 0.5, clamped to the valid range.
RawImage resize_bilinear(const RawImage& img, int out_h, int out_w) {
    check_arg(out_h >= 1 && out_w >= 1, "resize_bilinear: target must be at least 1x1");
    check_arg(img.height >= 1 && img.width >= 1, "resize_bilinear: empty source");
    if (out_h == img.height && out_w == img.width) return img;

    RawImage out;
    out.height = out_h;
    out.width = out_w;
    out.channels = img.channels;
    out.maxval = img.maxval;
    out.samples.resize(static_cast<size_t>(out_h) * out_w * img.channels);

    const double sy = static_cast<double>(img.height) / out_h;
    const double sx = static_cast<double>(img.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            for (int c = 0; c < img.channels; ++c) {
                const double top = (1.0 - wx) * img.at(y0, x0, c) + wx * img.at(y0, x1, c);
                const double bot = (1.0 - wx) * img.at(y1, x0, c) + wx * img.at(y1, x1, c);
                out.samples[(static_cast<size_t>(y) * out_w + x) * img.channels + c] =
                    static_cast<float>((1.0 - wy) * top + wy * bot);
            }
        }
    }
    return out;
}

RawImage normalize_unit(const RawImage& img) {
    for (float v : img.samples)
        check_arg(v >= 0.0f && v <= static_cast<float>(img.maxval),
                  strformat("normalize_unit: sample %g outside [0,%g]", v, img.maxval));
    RawImage out = img;
    const float inv = static_cast<float>(1.0 / img.maxval);
    for (float& v : out.samples) v = std::min(1.0f, v * inv);
    out.maxval = 1.0;
    return out;
}

namespace {
void write_pnm(const std::string& path, const char* magic, int height, int width, int channels,
               const std::vector<uint8_t>& pixels) {
    check_arg(height >= 1 && width >= 1, "write_pnm: empty image");
    check_arg(pixels.size() == static_cast<size_t>(height) * width * channels,
              "write_pnm: pixel buffer size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io(strformat("cannot open '%s' for writing", path.c_str()));
    out << magic << "\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (!out) fail_io(strformat("short write to '%s'", path.c_str()));
}
}  // namespace

void write_pgm(const std::string& path, int height, int width, const std::vector<uint8_t>& gray) {
    write_pnm(path, "P5", height, width, 1, gray);
}

void write_ppm(const std::string& path, int height, int width, const std::vector<uint8_t>& rgb) {
    write_pnm(path, "P6", height, width, 3, rgb);
}

}  // namespace ts
