#pragma once

#include <cstdint>

namespace pcgt {

// Counter-based generator: output i of stream (seed, stream) is
// mix64(seed ^ mix64(stream) ^ mix64(i)) where mix64 is the SplitMix64
// finalizer.  Streams derived from distinct (seed, stream) pairs are
// independent for our purposes, and any output can be recomputed from its
// index, so parallel runs are reproducible and worker-count independent.
struct Rng {
    std::uint64_t key = 0;
    std::uint64_t ctr = 0;

    static constexpr std::uint64_t mix64(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    Rng() = default;
    Rng(std::uint64_t seed, std::uint64_t stream)
        : key(mix64(seed ^ 0xa02bdbf7bb3c0a7full) ^ mix64(stream)) {}

    std::uint64_t next() { return mix64(key ^ mix64(++ctr)); }

    // Unbiased integer in [0, n) by rejection from the top of the range.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        for (;;) {
            std::uint64_t v = next();
            if (v < limit) return v % n;
        }
    }

    // Uniform in [0,1) with 53 significant bits.
    double real() { return double(next() >> 11) * 0x1.0p-53; }

    bool coin() { return next() & 1; }
};

} // namespace pcgt
