#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dpsvm/kernels.hpp"

namespace dpsvm {

/// Random Fourier feature map built from d_hat spectral draws rho_1..rho_dhat:
///
///   phi(x) = d_hat^{-1/2} [cos<rho_1,x>, sin<rho_1,x>, ..., cos<rho_dhat,x>, sin<rho_dhat,x>]
///
/// Feature dimension is 2 * d_hat; ||phi(x)||_2 = 1 for every x.
class RandomFeatureMap {
public:
    /// Draws d_hat vectors from the spectral density of `kernel` using a
    /// generator seeded with `seed`. The same arguments always give the same map.
    static RandomFeatureMap draw(const KernelSpec& kernel, std::size_t dim, std::size_t d_hat,
                                 std::uint64_t seed);

    /// Map with explicit frequencies (row-major, d_hat rows of length dim).
    RandomFeatureMap(KernelSpec kernel, std::size_t dim, std::vector<double> omegas,
                     std::uint64_t seed);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t d_hat() const noexcept { return omegas_.size() / dim_; }
    [[nodiscard]] std::size_t feature_dim() const noexcept { return 2 * d_hat(); }
    [[nodiscard]] const KernelSpec& source_kernel() const noexcept { return kernel_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::span<const double> omega(std::size_t i) const {
        return {omegas_.data() + i * dim_, dim_};
    }
    /// All frequencies, row-major d_hat x dim.
    [[nodiscard]] const std::vector<double>& omegas() const noexcept { return omegas_; }

    [[nodiscard]] std::vector<double> features(std::span<const double> x) const;
    /// <phi(x), phi(y)> = (1/d_hat) sum_i cos<rho_i, x - y>.
    [[nodiscard]] double kernel(std::span<const double> x, std::span<const double> y) const;

    friend bool operator==(const RandomFeatureMap&, const RandomFeatureMap&) = default;

private:
    KernelSpec kernel_;
    std::size_t dim_;
    std::vector<double> omegas_;
    std::uint64_t seed_;
};

/// Smallest d_hat with
///   d_hat >= 4(d+2)/eps^2 * ln(2^8 (sigma_p diam)^2 / (delta eps^2)),
/// which makes sup|k_hat - k| < eps over a set of diameter `diam` with
/// probability at least 1 - delta. Infinite sigma_p throws
/// CalibrationUnsupportedError; pick d_hat manually for such kernels.
[[nodiscard]] std::size_t calibrate_rff_dim(double eps, double delta, std::size_t d,
                                            double sigma_p, double diam);

/// Inverse of calibrate_rff_dim: the failure probability guaranteed at a given
/// d_hat, 2^8 (sigma_p diam / eps)^2 exp(-d_hat eps^2 / (4(d+2))). May exceed 1.
[[nodiscard]] double rff_failure_probability(double eps, std::size_t d_hat, std::size_t d,
                                             double sigma_p, double diam);

}  // namespace dpsvm
