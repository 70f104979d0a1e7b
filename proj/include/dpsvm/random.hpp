#pragma once

#include <cstdint>
#include <random>

namespace dpsvm {

/// Derives the seed of trial `index` from `base`.
///
/// mix64(base, t) = splitmix64(base + (t + 1) * 0x9E3779B97F4A7C15), where
/// splitmix64 is the finalizer of Steele, Lea and Flood's SplitMix64. Distinct
/// trial indices give distinct, well-mixed child seeds.
[[nodiscard]] std::uint64_t mix64(std::uint64_t base, std::uint64_t index) noexcept;

/// Seedable uniform source used by every randomized operation.
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the C++
/// standard, so a seed reproduces the same stream on every platform.
/// Continuous variates are derived here by explicit formulas rather than
/// std::*_distribution, whose algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1): (k + 1/2) / 2^52 for a 52-bit k.
    double uniform_open();

    /// Uniform on the open interval (-1/2, 1/2); exactly uniform_open() - 1/2.
    double uniform_centered();

    /// Standard normal via the Box-Muller transform (cosine branch only).
    double normal();

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace dpsvm
