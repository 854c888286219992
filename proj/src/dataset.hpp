#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "image.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace ts {

enum class Split { train, val };

inline const char* split_name(Split s) { return s == Split::train ? "train" : "val"; }

// Preprocessed sample: single channel, square, values in [0,1].
struct LabeledImage {
    std::string id;
    int label = 0;  // 0 = negative, 1 = positive (tumor)
    Split split = Split::train;
    int size = 0;
    std::vector<float> pixels;  // size*size, row-major
};

// Ground truth for a synthesized positive. The reference mask is the disk
// where the gaussian blob is at least half its peak value.
struct BlobTruth {
    double cy = 0;
    double cx = 0;
    double sigma = 0;
    double mask_radius() const { return 1.1774 * sigma; }  // sqrt(2 ln 2) * sigma
};

struct Dataset {
    int target_size = 0;
    std::string source;
    double split_fraction = 0.0;
    uint64_t split_seed = 0;
    std::vector<LabeledImage> images;  // sorted by id
    std::map<std::string, BlobTruth> blob_truth;  // synthetic positives only

    int count(int label, Split split) const {
        int n = 0;
        for (const auto& im : images) n += im.label == label && im.split == split;
        return n;
    }

    std::vector<const LabeledImage*> members(Split split) const {
        std::vector<const LabeledImage*> out;
        for (const auto& im : images)
            if (im.split == split) out.push_back(&im);
        return out;
    }
};

struct RawRecord {
    std::string id;
    int label = 0;
    RawImage image;
};

struct LoadReport {
    int decoded = 0;
    std::vector<std::string> warnings;  // one per skipped undecodable file
};

// Reads <root>/<positive_subdir> and <root>/<negative_subdir>. Undecodable
// files are skipped with a warning unless they exceed 10% of all files.
std::vector<RawRecord> load_directory(const std::string& root, const std::string& positive_subdir,
                                      const std::string& negative_subdir, LoadReport* report = nullptr);

// grayscale -> bilinear resize -> normalize to [0,1]
LabeledImage preprocess(const RawRecord& rec, int target_size);

// Stratified shuffle-split: per class, floor(n*fraction) train, rest val.
Dataset assemble(std::vector<LabeledImage> images, double fraction, uint64_t seed, std::string source,
                 int target_size);

Dataset load_dataset(const std::string& root, int target_size, double fraction, uint64_t seed,
                     const std::string& positive_subdir = "yes", const std::string& negative_subdir = "no",
                     LoadReport* report = nullptr);

// Paired synthetic data: index i yields a negative (smooth elliptical
// texture) and a positive (the same texture plus one bright gaussian blob,
// recorded in blob_truth). Images come back unsplit; run assemble() after.
std::vector<LabeledImage> synthesize(int per_class, int size, uint64_t seed,
                                     std::map<std::string, BlobTruth>* truth = nullptr);

Dataset synthesize_dataset(int per_class, int size, uint64_t seed, double fraction);

std::string manifest_text(const Dataset& ds);
void write_manifest(const std::string& path, const Dataset& ds);

template <typename T>
Tensor<T> batch_tensor(const std::vector<const LabeledImage*>& images) {
    check_arg(!images.empty(), "batch_tensor: empty batch");
    const int s = images[0]->size;
    for (const auto* im : images) {
        check_arg(im->size == s, "batch_tensor: mixed image sizes");
        check_arg(im->pixels.size() == static_cast<size_t>(s) * s, "batch_tensor: pixel count mismatch");
    }
    Tensor<T> t({static_cast<int>(images.size()), 1, s, s});
    auto* p = t.mutable_data().data();
    for (size_t n = 0; n < images.size(); ++n)
        for (size_t i = 0; i < images[n]->pixels.size(); ++i) {
            const float v = images[n]->pixels[i];
            check_arg(v >= 0.0f && v <= 1.0f, "batch_tensor: pixel outside [0,1]");
            p[n * images[n]->pixels.size() + i] = static_cast<T>(v);
        }
    return t;
}

inline std::vector<int> batch_labels(const std::vector<const LabeledImage*>& images) {
    std::vector<int> labels(images.size());
    for (size_t i = 0; i < images.size(); ++i) labels[i] = images[i]->label;
    return labels;
}

}  // namespace ts
