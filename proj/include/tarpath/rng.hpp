#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace tarpath {

/// Seeded random source. The standard distributions are implementation-defined,
/// so every draw is derived from the raw 64-bit engine output here to keep
/// artifacts byte-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform on {0, ..., n-1}; unbiased via rejection.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (one draw per call, the pair partner is discarded).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Derives an independent child stream; used to give each sub-task its own source.
    Rng split() { return Rng(engine_() ^ 0x9e3779b97f4a7c15ULL); }

private:
    std::mt19937_64 engine_;
};

}  // namespace tarpath
