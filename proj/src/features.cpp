#include "features.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ts {

void FeatureMatrix::append(const std::string& id, int label, std::span<const double> row) {
    check_arg(dim > 0, "feature matrix: dim must be set before appending");
    check_arg(static_cast<int>(row.size()) == dim,
              strformat("feature matrix: row has %zu values, expected %d", row.size(), dim));
    check_arg(label == 0 || label == 1, strformat("feature matrix: label must be 0 or 1, got %d", label));
    ids.push_back(id);
    labels.push_back(label);
    values.insert(values.end(), row.begin(), row.end());
}

FeatureMatrix extract_features(Model<float>& model, const std::vector<const LabeledImage*>& images,
                               int batch_size) {
    check_arg(model.trained_epochs > 0, "extract_features: model has not been trained");
    check_arg(batch_size >= 1, "extract_features: batch size must be positive");
    check_arg(!images.empty(), "extract_features: no images given");

    FeatureMatrix fm;
    fm.dim = model.spec.feature_dim();
    fm.ids.reserve(images.size());
    fm.labels.reserve(images.size());
    fm.values.reserve(images.size() * static_cast<size_t>(fm.dim));

    for (size_t start = 0; start < images.size(); start += static_cast<size_t>(batch_size)) {
        const size_t stop = std::min(images.size(), start + static_cast<size_t>(batch_size));
        std::vector<const LabeledImage*> chunk(images.begin() + static_cast<ptrdiff_t>(start),
                                               images.begin() + static_cast<ptrdiff_t>(stop));
        Tape<float> tape;
        auto result = forward(&tape, model, batch_tensor<float>(chunk), Mode::eval);
        const auto rows = result.features.data();
        for (size_t i = 0; i < chunk.size(); ++i) {
            fm.ids.push_back(chunk[i]->id);
            fm.labels.push_back(chunk[i]->label);
            const float* r = rows.data() + i * static_cast<size_t>(fm.dim);
            fm.values.insert(fm.values.end(), r, r + fm.dim);
        }
    }
    return fm;
}

std::string features_csv_text(const FeatureMatrix& fm) {
    check_arg(fm.dim > 0, "features csv: empty matrix");
    check_arg(fm.labels.size() == fm.ids.size() &&
                  fm.values.size() == fm.ids.size() * static_cast<size_t>(fm.dim),
              "features csv: inconsistent matrix");
    std::string out = "id,label";
    for (int d = 0; d < fm.dim; ++d) out += strformat(",f%d", d);
    out += "\n";
    for (int i = 0; i < fm.rows(); ++i) {
        const std::string& id = fm.ids[static_cast<size_t>(i)];
        check_arg(id.find_first_of(",\n\r") == std::string::npos,
                  strformat("features csv: id '%s' contains a delimiter", id.c_str()));
        out += id;
        out += strformat(",%d", fm.labels[static_cast<size_t>(i)]);
        for (double v : fm.row(i)) {
            out += ',';
            out += fmt_g9(v);
        }
        out += "\n";
    }
    return out;
}

void write_features_csv(const std::string& path, const FeatureMatrix& fm) {
    const std::string text = features_csv_text(fm);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io(strformat("cannot open %s for writing", path.c_str()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail_io(strformat("short write to %s", path.c_str()));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

FeatureMatrix read_features_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io(strformat("cannot open %s", path.c_str()));
    std::string line;
    if (!std::getline(in, line)) fail_format(strformat("%s: empty feature file", path.c_str()));

    auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "id" || header[1] != "label")
        fail_format(strformat("%s: header must start with id,label,f0", path.c_str()));
    FeatureMatrix fm;
    fm.dim = static_cast<int>(header.size()) - 2;
    for (int d = 0; d < fm.dim; ++d) {
        if (header[static_cast<size_t>(d) + 2] != strformat("f%d", d))
            fail_format(strformat("%s: feature column %d is misnamed", path.c_str(), d));
    }

    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            fail_format(strformat("%s:%zu: expected %zu fields, got %zu", path.c_str(), lineno,
                                  header.size(), fields.size()));
        fm.ids.push_back(fields[0]);
        if (fields[1] != "0" && fields[1] != "1")
            fail_format(strformat("%s:%zu: label must be 0 or 1", path.c_str(), lineno));
        fm.labels.push_back(fields[1] == "1" ? 1 : 0);
        for (int d = 0; d < fm.dim; ++d) {
            const std::string& f = fields[static_cast<size_t>(d) + 2];
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (end == f.c_str() || *end != '\0' || !std::isfinite(v))
                fail_format(strformat("%s:%zu: bad value '%s'", path.c_str(), lineno, f.c_str()));
            fm.values.push_back(v);
        }
    }
    if (fm.ids.empty()) fail_format(strformat("%s: no feature rows", path.c_str()));
    return fm;
}

}  // namespace ts
