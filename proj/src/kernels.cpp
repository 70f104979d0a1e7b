#include "dpsvm/kernels.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dpsvm/error.hpp"
#include "dpsvm/noise.hpp"

namespace dpsvm {

namespace {

void require_translation_invariant(const KernelSpec& k, const char* op) {
    if (!k.translation_invariant()) {
        throw UnsupportedKernelError(std::string(op) + " requires a translation-invariant kernel, got " +
                                     k.name());
    }
}

}  // namespace

KernelSpec KernelSpec::rbf(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("rbf kernel needs sigma > 0");
    }
    return KernelSpec(KernelFamily::Rbf, sigma);
}

KernelSpec KernelSpec::from_name(const std::string& name, double sigma) {
    if (name == "linear") return linear();
    if (name == "rbf") return rbf(sigma);
    if (name == "laplacian") return laplacian();
    if (name == "cauchy") return cauchy();
    throw ParameterError("unknown kernel family '" + name + "'");
}

std::string KernelSpec::name() const {
    switch (family_) {
        case KernelFamily::Linear: return "linear";
        case KernelFamily::Rbf: return "rbf";
        case KernelFamily::Laplacian: return "laplacian";
        case KernelFamily::Cauchy: return "cauchy";
    }
    return "unknown";
}

double kernel_eval(const KernelSpec& k, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("kernel arguments differ in dimension");
    switch (k.family()) {
        case KernelFamily::Linear: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
            return s;
        }
        case KernelFamily::Rbf: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double d = x[i] - y[i];
                s += d * d;
            }
            return std::exp(-s / (2.0 * k.sigma() * k.sigma()));
        }
        case KernelFamily::Laplacian: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
            return std::exp(-s);
        }
        case KernelFamily::Cauchy: {
            double p = 1.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double d = x[i] - y[i];
                p /= 1.0 + d * d;
            }
            return p;
        }
    }
    return 0.0;
}

double cauchy_inverse_cdf(double u_centered) { return std::tan(std::numbers::pi * u_centered); }

std::vector<std::vector<double>> sample_spectral(const KernelSpec& k, std::size_t d,
                                                 std::size_t count, Rng& rng) {
    require_translation_invariant(k, "sample_spectral");
    if (d == 0 || count == 0) throw ParameterError("sample_spectral needs d >= 1 and count >= 1");
    std::vector<std::vector<double>> out(count, std::vector<double>(d));
    for (auto& omega : out) {
        for (auto& w : omega) {
            switch (k.family()) {
                case KernelFamily::Rbf: w = rng.normal() / k.sigma(); break;
                case KernelFamily::Laplacian: w = cauchy_inverse_cdf(rng.uniform_centered()); break;
                case KernelFamily::Cauchy: w = laplace_inverse_cdf(rng.uniform_centered(), 1.0); break;
                case KernelFamily::Linear: break;
            }
        }
    }
    return out;
}

double spectral_second_moment(const KernelSpec& k, std::size_t d) {
    require_translation_invariant(k, "spectral_second_moment");
    if (d == 0) throw ParameterError("dimension must be >= 1");
    const auto dd = static_cast<double>(d);
    switch (k.family()) {
        case KernelFamily::Rbf: return dd / (k.sigma() * k.sigma());
        case KernelFamily::Cauchy: return 2.0 * dd;
        case KernelFamily::Laplacian: return std::numeric_limits<double>::infinity();
        case KernelFamily::Linear: break;
    }
    return 0.0;
}

}  // namespace dpsvm
