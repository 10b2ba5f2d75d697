#pragma once

#include <cstdint>

namespace phifun {

// Deterministic, platform-independent generator (splitmix64). Used for
// corpus generation and the estimator's random start columns, so results
// are reproducible from the seed alone regardless of standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [-1, 1).
    double symmetric() noexcept { return 2.0 * uniform() - 1.0; }

    // +1 or -1 with equal probability.
    double rademacher() noexcept { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

private:
    std::uint64_t state_;
};

} // namespace phifun
