#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace ts {

// Reflected crc32 with polynomial 0xEDB88320, the zlib/png variant;
// crc32("123456789") == 0xCBF43926.
inline uint32_t crc32(const uint8_t* data, size_t n, uint32_t seed = 0) {
    static const auto table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    uint32_t c = ~seed;
    for (size_t i = 0; i < n; ++i) c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
    return ~c;
}

}  // namespace ts
