#pragma once

#include <cstdint>

namespace chattersim {

/// Deterministic 64-bit PRNG (splitmix64 state advance).
///
/// Every random decision in a session comes from generators seeded through
/// `derive`, so a (config, seed) pair replays bit-identically. The channel
/// contracts pin exactly how many draws each operation consumes; keep that
/// in mind before reordering calls.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 bits of mantissa.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// One draw per call, even for p = 0 or p = 1.
    bool bernoulli(double p) { return next_double() < p; }

    /// Seed for an independent stream (forward channel, ack channel, ...).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        Rng mixer(seed ^ (0xD1B54A32D192ED03ull * (stream + 1)));
        return mixer.next_u64();
    }

private:
    std::uint64_t state_;
};

} // namespace chattersim
