#pragma once

#include <cstdint>

namespace pb {

// splitmix64; the project-wide source of pseudo-randomness. Streams are
// derived by hashing (master_seed, phi index, sample index, voter index),
// so every (phi, sample, voter) cell draws from its own stream and parallel
// execution is order-independent and bit-reproducible.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53-bit mantissa
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    uint64_t next_below(uint64_t bound) {
        // modulo is fine here: bounds are tiny relative to 2^64
        return next() % bound;
    }
};

inline uint64_t hash_mix(uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

inline uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t h = hash_mix(master ^ 0x6a09e667f3bcc909ULL);
    h = hash_mix(h ^ (a + 0x9e3779b97f4a7c15ULL));
    h = hash_mix(h ^ (b + 0xbb67ae8584caa73bULL));
    h = hash_mix(h ^ (c + 0x3c6ef372fe94f82bULL));
    return h;
}

}  // namespace pb
