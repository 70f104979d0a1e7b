#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dpsvm/random.hpp"

namespace dpsvm {

enum class KernelFamily { Linear, Rbf, Laplacian, Cauchy };

/// Kernel family tag plus its bandwidth.
///
/// Translation-invariant families are normalized so that g(0) = 1:
///   Rbf(s):    exp(-||x - y||_2^2 / (2 s^2))
///   Laplacian: exp(-||x - y||_1)
///   Cauchy:    prod_i 1 / (1 + (x_i - y_i)^2)
/// With this normalization each spectral density is a probability density.
class KernelSpec {
public:
    static KernelSpec linear() { return KernelSpec(KernelFamily::Linear, 0.0); }
    static KernelSpec rbf(double sigma);
    static KernelSpec laplacian() { return KernelSpec(KernelFamily::Laplacian, 0.0); }
    static KernelSpec cauchy() { return KernelSpec(KernelFamily::Cauchy, 0.0); }

    /// Parses "linear" | "rbf" | "laplacian" | "cauchy"; sigma is used by rbf only.
    static KernelSpec from_name(const std::string& name, double sigma = 1.0);

    [[nodiscard]] KernelFamily family() const noexcept { return family_; }
    /// RBF bandwidth; 0 for other families.
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] bool translation_invariant() const noexcept {
        return family_ != KernelFamily::Linear;
    }
    [[nodiscard]] std::string name() const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

private:
    KernelSpec(KernelFamily family, double sigma) : family_(family), sigma_(sigma) {}

    KernelFamily family_;
    double sigma_;
};

[[nodiscard]] double kernel_eval(const KernelSpec& k, std::span<const double> x,
                                 std::span<const double> y);

/// `count` i.i.d. draws from the spectral density of `k` in R^d, in draw order.
///   Rbf(s)    -> Normal(0, s^-2) per coordinate
///   Laplacian -> standard Cauchy per coordinate, tan(pi * u), u in (-1/2, 1/2)
///   Cauchy    -> Laplace(0, 1) per coordinate
[[nodiscard]] std::vector<std::vector<double>> sample_spectral(const KernelSpec& k, std::size_t d,
                                                               std::size_t count, Rng& rng);

/// E<w, w> under the spectral density; +infinity for the Laplacian kernel.
[[nodiscard]] double spectral_second_moment(const KernelSpec& k, std::size_t d);

/// Inverse CDF of the standard Cauchy distribution at centered u in (-1/2, 1/2).
[[nodiscard]] double cauchy_inverse_cdf(double u_centered);

}  // namespace dpsvm
