#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dpsvm/random.hpp"

namespace dpsvm {

/// Additive noise vector mu drawn i.i.d. from Laplace(0, scale).
struct NoiseDraw {
    std::vector<double> mu;
    double scale = 0.0;
    std::uint64_t seed = 0;
};

/// -scale * sgn(u) * ln(1 - 2|u|) for centered u in (-1/2, 1/2); 0 at u = 0.
[[nodiscard]] double laplace_inverse_cdf(double u_centered, double scale);

/// `count` i.i.d. Laplace(0, scale) draws by inverse CDF, one uniform each.
[[nodiscard]] std::vector<double> sample_laplace(double scale, std::size_t count, Rng& rng);

/// Fresh generator seeded with `seed`, then sample_laplace.
[[nodiscard]] NoiseDraw draw_noise(double scale, std::size_t count, std::uint64_t seed);

/// Pr(X > threshold) for X ~ Erlang(q, scale), the law of ||mu||_1 for q
/// Laplace(0, scale) coordinates:  exp(-t/scale) * sum_{j<q} (t/scale)^j / j!.
[[nodiscard]] double erlang_tail_probability(std::size_t q, double scale, double threshold);

}  // namespace dpsvm
