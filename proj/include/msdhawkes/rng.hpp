#pragma once

#include <cmath>
#include <cstdint>

namespace msdhawkes {

// Splittable counter-free PRNG. The base algorithm is xoshiro256++ seeded
// through splitmix64, so identical (seed, stream) pairs reproduce identical
// draws on every platform. Parallel workers each take their own stream id.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) { seed_state(seed); }

    // Derives an independent stream from a root seed and a stream index.
    static RngStream split(std::uint64_t seed, std::uint64_t stream) {
        return RngStream(mix(mix(seed) ^ (0x9e3779b97f4a7c15ULL * (stream + 1))));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Exponential with the given rate; uses 1 - U so the argument of log is
    // never zero.
    double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    void seed_state(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& s : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            s = mix(z);
        }
    }

    std::uint64_t s_[4];
};

}  // namespace msdhawkes
