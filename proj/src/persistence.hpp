#pragma once

// Checkpoint container for models: a little-endian TSCK file carrying the
// architecture block, named float32 tensors, training counters, and a
// trailing crc32 so corruption is caught before any weight is trusted.

#include <cstdint>
#include <string>
#include <vector>

#include "model.hpp"

namespace ts {

std::vector<uint8_t> serialize_model(const Model<float>& model);
Model<float> deserialize_model(const std::vector<uint8_t>& bytes, const std::string& origin);

void save_model(const std::string& path, const Model<float>& model);
Model<float> load_model(const std::string& path);

}  // namespace ts
