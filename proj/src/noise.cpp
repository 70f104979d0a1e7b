#include "dpsvm/noise.hpp"

#include <cmath>

#include "dpsvm/error.hpp"

namespace dpsvm {

double laplace_inverse_cdf(double u, double scale) {
    if (u == 0.0) return 0.0;
    const double sgn = u > 0.0 ? 1.0 : -1.0;
    return -scale * sgn * std::log1p(-2.0 * std::abs(u));
}

std::vector<double> sample_laplace(double scale, std::size_t count, Rng& rng) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ParameterError("laplace scale must be > 0");
    std::vector<double> out(count);
    for (auto& v : out) v = laplace_inverse_cdf(rng.uniform_centered(), scale);
    return out;
}

NoiseDraw draw_noise(double scale, std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    return NoiseDraw{sample_laplace(scale, count, rng), scale, seed};
}

double erlang_tail_probability(std::size_t q, double scale, double threshold) {
    if (q == 0) throw ParameterError("erlang shape q must be >= 1");
    if (!(scale > 0.0)) throw ParameterError("erlang scale must be > 0");
    if (!(threshold >= 0.0)) throw ParameterError("threshold must be >= 0");
    if (std::isinf(threshold)) return 0.0;
    const double z = threshold / scale;
    if (z == 0.0) return 1.0;
    // Poisson(z) CDF at q - 1, terms formed in log space to avoid overflow.
    const double log_z = std::log(z);
    double p = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
        const auto jj = static_cast<double>(j);
        p += std::exp(jj * log_z - std::lgamma(jj + 1.0) - z);
    }
    return p > 1.0 ? 1.0 : p;
}

}  // namespace dpsvm
