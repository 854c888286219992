#pragma once

// Feature rows extracted from the CNN's flatten layer, plus the CSV format
// they travel in. The same format ingests externally produced backbone
// features, so the reader validates rather than trusts.

#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "model.hpp"

namespace ts {

struct FeatureMatrix {
    std::vector<std::string> ids;
    std::vector<int> labels;
    int dim = 0;
    std::vector<double> values;  // row-major, rows() x dim

    int rows() const { return static_cast<int>(ids.size()); }
    std::span<const double> row(int i) const {
        check_arg(i >= 0 && i < rows(), strformat("feature row %d out of range", i));
        return {values.data() + static_cast<size_t>(i) * dim, static_cast<size_t>(dim)};
    }
    void append(const std::string& id, int label, std::span<const double> row);
};

// Eval-mode flatten output, one row per image, in input order.
FeatureMatrix extract_features(Model<float>& model, const std::vector<const LabeledImage*>& images,
                               int batch_size = 32);

std::string features_csv_text(const FeatureMatrix& fm);
void write_features_csv(const std::string& path, const FeatureMatrix& fm);
FeatureMatrix read_features_csv(const std::string& path);

}  // namespace ts
