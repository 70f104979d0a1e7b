#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dpsvm/data.hpp"
#include "dpsvm/kernels.hpp"
#include "dpsvm/random.hpp"
#include "dpsvm/rff.hpp"
#include "dpsvm/solver.hpp"

namespace dpsvm {

enum class Mechanism { Finite, Rff };

/// Guarantees claimed for a release and the inputs they were computed from.
struct Claim {
    std::optional<double> beta;
    std::optional<double> epsilon;
    std::optional<double> delta;
    double lipschitz = 1.0;
    std::optional<double> kappa;  // finite map: sup sqrt(k(x, x))
    std::optional<double> phi;    // finite map: sup |phi(x)_i|
    std::size_t features = 0;     // F, or d_hat for random features
    std::size_t n = 0;

    friend bool operator==(const Claim&, const Claim&) = default;
};

/// The released artifact. Holds noisy primal weights and the feature map
/// description only; dual coefficients and training entries never appear here.
struct PrivateModel {
    Mechanism mechanism = Mechanism::Finite;
    std::vector<double> w_hat;
    std::optional<RandomFeatureMap> feature_map;  // set iff mechanism == Rff
    KernelSpec kernel = KernelSpec::linear();
    double C = 0.0;
    double lambda = 0.0;
    Claim claimed;
    std::size_t n = 0;
    std::size_t dim = 0;

    [[nodiscard]] std::vector<double> features(std::span<const double> x) const;
    /// <w_hat, phi(x)>.
    [[nodiscard]] double decision(std::span<const double> x) const;

    friend bool operator==(const PrivateModel&, const PrivateModel&) = default;
};

/// Exact hinge-loss SVM with default solver tolerances.
[[nodiscard]] SvmModel train_svm(const Database& db, const KernelSpec& k, double C);

/// Output perturbation on the identity feature map phi(x) = x (F = d):
/// w_hat = sum_i a_i y_i x_i + mu, mu i.i.d. Laplace(0, lambda).
[[nodiscard]] PrivateModel train_private_finite(const Database& db, double C, double lambda,
                                                Rng& rng);

/// Output perturbation in a random Fourier feature space of dimension
/// 2 * d_hat. The map seed is the first value taken from `rng`; the noise
/// follows from the same stream.
[[nodiscard]] PrivateModel train_private_rff(const Database& db, const KernelSpec& k, double C,
                                             double lambda, std::size_t d_hat, Rng& rng);

/// Non-noisy weights w_tilde = sum_i a_i y_i phi(x_i) for a fixed feature map.
[[nodiscard]] std::vector<double> exact_weights_finite(const Database& db, double C);
[[nodiscard]] std::vector<double> exact_weights_rff(const Database& db, const RandomFeatureMap& map,
                                                    double C);

// Closed-form calibration. All return the exact formula value; choosing
// lambda is left to the caller.

/// Privacy floor for the finite map: 4 L C kappa sqrt(F) / (beta n).
[[nodiscard]] double calibrate_noise_privacy_finite(double L, double C, double kappa, std::size_t F,
                                                    double beta, std::size_t n);
/// Privacy floor for random features: 2^{2.5} L C sqrt(d_hat) / (beta n).
[[nodiscard]] double calibrate_noise_privacy_rff(double L, double C, std::size_t d_hat, double beta,
                                                 std::size_t n);
/// Utility ceiling for the finite map: eps / (2 Phi (F ln 2 + ln(1/delta))).
[[nodiscard]] double calibrate_noise_utility_finite(double eps, double delta, double Phi,
                                                    std::size_t F);
/// Utility ceiling for random features:
/// min{eps / (2^4 ln2 sqrt(d_hat)), eps sqrt(d_hat) / (8 ln(2/delta))}.
[[nodiscard]] double calibrate_noise_utility_rff(double eps, double delta, std::size_t d_hat);

/// theta(eps) = min{1, eps^4 / (2^12 C^4)} for hinge loss.
[[nodiscard]] double hinge_theta(double eps, double C);

/// Smallest d_hat >= 4(d+2)/theta ln(2^9 (sigma_p diam)^2 / (delta theta)).
[[nodiscard]] std::size_t calibrate_rff_dim_hinge(double eps, double delta, double C, std::size_t d,
                                                  double sigma_p, double diam);

struct CalibrationReport {
    double lambda_min_privacy = 0.0;
    double lambda_max_utility = 0.0;
    std::optional<std::size_t> d_hat;
    bool feasible = false;
    /// Smallest beta whose privacy floor fits under lambda_max_utility.
    double beta_achievable = 0.0;
};

/// Privacy floor and utility ceiling for the finite mechanism at one parameter set.
[[nodiscard]] CalibrationReport calibrate_finite(double L, double C, double kappa, std::size_t F,
                                                 double beta, std::size_t n, double eps,
                                                 double delta, double Phi);
/// Same for random features at a given d_hat.
[[nodiscard]] CalibrationReport calibrate_rff(double L, double C, std::size_t d_hat, double beta,
                                              std::size_t n, double eps, double delta);

/// Upper bound on optimal differential privacy for hinge SVM with a
/// translation-invariant kernel: d_hat from calibrate_rff_dim_hinge, lambda at
/// the random-feature utility ceiling, beta = 2^{2.5} C sqrt(d_hat) / (lambda n).
[[nodiscard]] CalibrationReport optimal_dp_upper_bound_hinge(double eps, double delta, double C,
                                                             std::size_t n, std::size_t d,
                                                             double sigma_p, double diam);

/// ln((1 - delta) / delta): no (eps, delta)-useful mechanism for the linear
/// hinge SVM does better than this for small eps.
[[nodiscard]] double optimal_dp_lower_bound_linear(double delta);

/// Upper limit on the RBF bandwidth for the packing construction, sqrt(1 / (2 ln 2)).
[[nodiscard]] double rbf_lower_bound_sigma_limit();

/// N = floor((2/sigma) sqrt(2/ln 2)).
[[nodiscard]] std::size_t rbf_packing_size(double sigma);

struct RbfLowerBound {
    std::size_t N;
    double bound;
};

/// N as above and ln((1 - delta)(N - 1) / delta).
[[nodiscard]] RbfLowerBound optimal_dp_lower_bound_rbf(double delta, double sigma);

}  // namespace dpsvm
