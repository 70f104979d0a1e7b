#include "dpsvm/rff.hpp"

#include <cmath>
#include <limits>

#include "dpsvm/error.hpp"

namespace dpsvm {

RandomFeatureMap RandomFeatureMap::draw(const KernelSpec& kernel, std::size_t dim,
                                        std::size_t d_hat, std::uint64_t seed) {
    if (d_hat == 0) throw ParameterError("d_hat must be >= 1");
    Rng rng(seed);
    const auto draws = sample_spectral(kernel, dim, d_hat, rng);
    std::vector<double> flat;
    flat.reserve(d_hat * dim);
    for (const auto& w : draws) flat.insert(flat.end(), w.begin(), w.end());
    return RandomFeatureMap(kernel, dim, std::move(flat), seed);
}

RandomFeatureMap::RandomFeatureMap(KernelSpec kernel, std::size_t dim, std::vector<double> omegas,
                                   std::uint64_t seed)
    : kernel_(kernel), dim_(dim), omegas_(std::move(omegas)), seed_(seed) {
    if (!kernel_.translation_invariant()) {
        throw UnsupportedKernelError("random features need a translation-invariant kernel");
    }
    if (dim_ == 0) throw DimensionError("feature map dimension must be >= 1");
    if (omegas_.empty() || omegas_.size() % dim_ != 0) {
        throw DimensionError("omegas must hold d_hat >= 1 rows of length dim");
    }
    for (double w : omegas_) {
        if (!std::isfinite(w)) throw ParameterError("non-finite frequency");
    }
}

std::vector<double> RandomFeatureMap::features(std::span<const double> x) const {
    if (x.size() != dim_) throw DimensionError("feature map input has wrong dimension");
    const std::size_t m = d_hat();
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<double> out(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto w = omega(i);
        double t = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) t += w[j] * x[j];
        out[2 * i] = scale * std::cos(t);
        out[2 * i + 1] = scale * std::sin(t);
    }
    return out;
}

double RandomFeatureMap::kernel(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != dim_ || y.size() != dim_) {
        throw DimensionError("feature map input has wrong dimension");
    }
    const std::size_t m = d_hat();
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto w = omega(i);
        double t = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) t += w[j] * (x[j] - y[j]);
        s += std::cos(t);
    }
    return s / static_cast<double>(m);
}

namespace {

void check_calibration_args(double eps, double delta, std::size_t d, double sigma_p, double diam) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("eps must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
    if (d == 0) throw ParameterError("d must be >= 1");
    if (std::isinf(sigma_p)) {
        throw CalibrationUnsupportedError(
            "spectral second moment is infinite (laplacian kernel); choose d_hat manually");
    }
    if (!(sigma_p > 0.0)) throw ParameterError("sigma_p must be > 0");
    if (!(diam > 0.0) || !std::isfinite(diam)) throw ParameterError("diam must be > 0");
}

}  // namespace

std::size_t calibrate_rff_dim(double eps, double delta, std::size_t d, double sigma_p,
                              double diam) {
    check_calibration_args(eps, delta, d, sigma_p, diam);
    const double e2 = eps * eps;
    const double spread = sigma_p * diam;
    const double bound = 4.0 * static_cast<double>(d + 2) / e2 *
                         std::log(256.0 * spread * spread / (delta * e2));
    if (bound <= 1.0) return 1;
    return static_cast<std::size_t>(std::ceil(bound));
}

double rff_failure_probability(double eps, std::size_t d_hat, std::size_t d, double sigma_p,
                               double diam) {
    if (!(eps > 0.0) || d == 0 || d_hat == 0) throw ParameterError("invalid arguments");
    if (std::isinf(sigma_p)) return std::numeric_limits<double>::infinity();
    const double r = sigma_p * diam / eps;
    return 256.0 * r * r *
           std::exp(-static_cast<double>(d_hat) * eps * eps / (4.0 * static_cast<double>(d + 2)));
}

}  // namespace dpsvm
