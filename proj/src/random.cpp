#include "dpsvm/random.hpp"

#include <cmath>
#include <numbers>

namespace dpsvm {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix64(std::uint64_t base, std::uint64_t index) noexcept {
    return splitmix64(base + (index + 1) * kGolden);
}

double Rng::uniform_open() {
    const std::uint64_t k = engine_() >> 12;
    // k + 0.5 needs 53 bits, so the scaled value is exact.
    return (static_cast<double>(k) + 0.5) * 0x1.0p-52;
}

double Rng::uniform_centered() { return uniform_open() - 0.5; }

double Rng::normal() {
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dpsvm
