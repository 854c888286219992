#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "common.hpp"

namespace fs = std::filesystem;

namespace ts {

namespace {

void scan_class_dir(const fs::path& dir, int label, std::vector<RawRecord>& records,
                    LoadReport& report, int& attempted) {
    if (!fs::is_directory(dir))
        fail_io(strformat("dataset directory '%s' does not exist", dir.string().c_str()));
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        ++attempted;
        try {
            RawRecord rec;
            rec.id = f.parent_path().filename().string() + "/" + f.filename().string();
            rec.label = label;
            rec.image = decode_pnm(f.string());
            records.push_back(std::move(rec));
            ++report.decoded;
        } catch (const Error& e) {
            report.warnings.push_back(e.what());
        }
    }
}

}  // namespace

std::vector<RawRecord> load_directory(const std::string& root, const std::string& positive_subdir,
                                      const std::string& negative_subdir, LoadReport* report) {
    LoadReport local;
    LoadReport& rep = report ? *report : local;
    std::vector<RawRecord> records;
    int attempted = 0;
    scan_class_dir(fs::path(root) / negative_subdir, 0, records, rep, attempted);
    scan_class_dir(fs::path(root) / positive_subdir, 1, records, rep, attempted);
    if (attempted == 0) fail_io(strformat("dataset '%s' contains no files", root.c_str()));
    const bool has_pos = std::any_of(records.begin(), records.end(), [](const RawRecord& r) { return r.label == 1; });
    const bool has_neg = std::any_of(records.begin(), records.end(), [](const RawRecord& r) { return r.label == 0; });
    if (!has_pos || !has_neg)
        fail_format(strformat("dataset '%s' has no decodable images for the '%s' class", root.c_str(),
                              has_pos ? negative_subdir.c_str() : positive_subdir.c_str()));
    if (10 * static_cast<int>(rep.warnings.size()) > attempted)
        fail_format(strformat("dataset '%s': %zu of %d files failed to decode", root.c_str(),
                              rep.warnings.size(), attempted));
    return records;
}

LabeledImage preprocess(const RawRecord& rec, int target_size) {
    check_arg(target_size >= 1, "preprocess: target size must be positive");
    const RawImage unit = normalize_unit(resize_bilinear(to_grayscale(rec.image), target_size, target_size));
    LabeledImage out;
    out.id = rec.id;
    out.label = rec.label;
    out.size = target_size;
    out.pixels = unit.samples;
    for (float& v : out.pixels) v = std::clamp(v, 0.0f, 1.0f);
    return out;
}

Dataset assemble(std::vector<LabeledImage> images, double fraction, uint64_t seed, std::string source,
                 int target_size) {
    check_arg(fraction > 0.0 && fraction < 1.0,
              strformat("split fraction must be in (0,1), got %g", fraction));
    std::sort(images.begin(), images.end(),
              [](const LabeledImage& a, const LabeledImage& b) { return a.id < b.id; });
    for (size_t i = 1; i < images.size(); ++i)
        check_arg(images[i].id != images[i - 1].id, "duplicate image id '" + images[i].id + "'");

    for (int label = 0; label < 2; ++label) {
        std::vector<size_t> idx;
        for (size_t i = 0; i < images.size(); ++i)
            if (images[i].label == label) idx.push_back(i);
        check_arg(!idx.empty(), strformat("class %d has no records", label));
        Rng rng(derive_seed(seed, static_cast<uint64_t>(label)));
        rng.shuffle(idx);
        const size_t n_train = static_cast<size_t>(std::floor(static_cast<double>(idx.size()) * fraction));
        for (size_t i = 0; i < idx.size(); ++i)
            images[idx[i]].split = i < n_train ? Split::train : Split::val;
    }

    Dataset ds;
    ds.target_size = target_size;
    ds.source = std::move(source);
    ds.split_fraction = fraction;
    ds.split_seed = seed;
    ds.images = std::move(images);
    return ds;
}

Dataset load_dataset(const std::string& root, int target_size, double fraction, uint64_t seed,
                     const std::string& positive_subdir, const std::string& negative_subdir,
                     LoadReport* report) {
    auto records = load_directory(root, positive_subdir, negative_subdir, report);
    std::vector<LabeledImage> images;
    images.reserve(records.size());
    for (const auto& rec : records) images.push_back(preprocess(rec, target_size));
    return assemble(std::move(images), fraction, seed, root, target_size);
}

namespace {

struct Ellipse {
    double cy, cx, ry, rx;
    // normalized radius: <=1 inside
    double rho(double y, double x) const {
        const double dy = (y - cy) / ry;
        const double dx = (x - cx) / rx;
        return std::sqrt(dy * dy + dx * dx);
    }
};

// Smooth low-frequency texture inside an elliptical mask: coarse uniform
// noise bilinearly upsampled, with a soft edge falloff.
std::vector<float> render_base(int s, Rng& rng, Ellipse& shape) {
    shape.cy = s * (0.5 + rng.uniform(-0.02, 0.02));
    shape.cx = s * (0.5 + rng.uniform(-0.02, 0.02));
    shape.ry = s * (0.42 + rng.uniform(0.0, 0.05));
    shape.rx = s * (0.36 + rng.uniform(0.0, 0.05));

    const int grid = std::max(3, s / 8);
    RawImage coarse;
    coarse.height = grid;
    coarse.width = grid;
    coarse.channels = 1;
    coarse.maxval = 1.0;
    coarse.samples.resize(static_cast<size_t>(grid) * grid);
    // per-image brightness offset: global mean alone must not separate the
    // classes, otherwise localization would never need the blob
    const double level = rng.uniform(0.12, 0.38);
    for (auto& v : coarse.samples) v = static_cast<float>(level + rng.uniform(0.0, 0.28));
    const RawImage smooth = resize_bilinear(coarse, s, s);

    std::vector<float> px(static_cast<size_t>(s) * s, 0.0f);
    for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x) {
            const double rho = shape.rho(y + 0.5, x + 0.5);
            if (rho >= 1.0) continue;
            const double edge = std::clamp((1.0 - rho) * 6.0, 0.0, 1.0);
            px[static_cast<size_t>(y) * s + x] =
                static_cast<float>(smooth.samples[static_cast<size_t>(y) * s + x] * edge);
        }
    return px;
}

BlobTruth add_blob(std::vector<float>& px, int s, Rng& rng, const Ellipse& shape) {
    BlobTruth truth;
    truth.sigma = s * rng.uniform(0.12, 0.20);
    do {
        truth.cy = shape.cy + rng.uniform(-0.55, 0.55) * shape.ry;
        truth.cx = shape.cx + rng.uniform(-0.55, 0.55) * shape.rx;
    } while (shape.rho(truth.cy, truth.cx) > 0.5);
    const double amp = rng.uniform(0.45, 0.65);
    const double two_sigma_sq = 2.0 * truth.sigma * truth.sigma;
    for (int y = 0; y < s; ++y)
        for (int x = 0; x < s; ++x) {
            const double dy = y + 0.5 - truth.cy;
            const double dx = x + 0.5 - truth.cx;
            const double g = amp * std::exp(-(dy * dy + dx * dx) / two_sigma_sq);
            auto& v = px[static_cast<size_t>(y) * s + x];
            v = static_cast<float>(std::min(1.0, v + g));
        }
    return truth;
}

}  // namespace

std::vector<LabeledImage> synthesize(int per_class, int size, uint64_t seed,
                                     std::map<std::string, BlobTruth>* truth) {
    check_arg(per_class >= 1, "synthesize: count must be at least 1");
    check_arg(size >= 8, "synthesize: size must be at least 8");
    std::vector<LabeledImage> images;
    images.reserve(static_cast<size_t>(per_class) * 2);
    for (int i = 0; i < per_class; ++i) {
        Ellipse shape;
        Rng base_rng(derive_seed(seed, static_cast<uint64_t>(2 * i)));
        auto base = render_base(size, base_rng, shape);

        LabeledImage neg;
        neg.id = strformat("neg-%05d", i);
        neg.label = 0;
        neg.size = size;
        neg.pixels = base;
        images.push_back(std::move(neg));

        LabeledImage pos;
        pos.id = strformat("pos-%05d", i);
        pos.label = 1;
        pos.size = size;
        pos.pixels = std::move(base);
        Rng blob_rng(derive_seed(seed, static_cast<uint64_t>(2 * i + 1)));
        const BlobTruth t = add_blob(pos.pixels, size, blob_rng, shape);
        if (truth) (*truth)[pos.id] = t;
        images.push_back(std::move(pos));
    }
    return images;
}

Dataset synthesize_dataset(int per_class, int size, uint64_t seed, double fraction) {
    std::map<std::string, BlobTruth> truth;
    auto images = synthesize(per_class, size, seed, &truth);
    Dataset ds = assemble(std::move(images), fraction, seed, "synthetic", size);
    ds.blob_truth = std::move(truth);
    return ds;
}

std::string manifest_text(const Dataset& ds) {
    std::string out = "tumorscope-manifest v1\n";
    for (const auto& im : ds.images) {
        out += im.id;
        out += '\t';
        out += std::to_string(im.label);
        out += '\t';
        out += split_name(im.split);
        out += '\n';
    }
    return out;
}

void write_manifest(const std::string& path, const Dataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io(strformat("cannot open '%s' for writing", path.c_str()));
    const std::string text = manifest_text(ds);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail_io(strformat("short write to '%s'", path.c_str()));
}

}  // namespace ts
