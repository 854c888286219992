#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "common.hpp"

namespace ts {

// splitmix64, used to expand seeds and derive independent sub-streams.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive a child seed from (seed, stream id); gives every consumer of
// randomness its own reproducible stream.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
    return splitmix64(s);
}

// xoshiro256**: the repo-wide generator. All randomness flows through this
// class so runs reproduce bit-for-bit across platforms; std:: distributions
// are deliberately avoided (their output is implementation-defined).
class Rng {
  public:
    explicit Rng(uint64_t seed = 0) {
        uint64_t sm = seed;
        for (auto& s : s_) s = splitmix64(sm);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0,1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, n), rejection sampled
    uint64_t below(uint64_t n) {
        check_arg(n > 0, "Rng::below requires n > 0");
        const uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    int64_t range(int64_t lo, int64_t hi_inclusive) {
        return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi_inclusive - lo + 1)));
    }

    // standard normal via Box-Muller (deterministic, no cached spare)
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

}  // namespace ts
