#pragma once

// Seeded deterministic randomness. splitmix64 is a counter-style generator
// (output i is a fixed mix of seed + i*gamma), so streams are reproducible
// across platforms; field elements come out by rejection sampling.

#include <cstdint>

#include "tspir/field.hpp"

namespace tspir {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound) with rejection of the tail bias zone.
    std::uint64_t uniform_below(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            std::uint64_t v = next();
            if (v >= threshold) return v % bound;
        }
    }

    Felem field_element(const PrimeField& f) {
        return Felem(uniform_below(f.modulus()));
    }

    // Independent child stream keyed by a small label.
    SplitMix64 fork(std::uint64_t label) {
        return SplitMix64(next() ^ (label * 0xD1B54A32D192ED03ull));
    }

private:
    std::uint64_t state_;
};

}  // namespace tspir
