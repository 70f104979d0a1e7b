#include "dpsvm/mechanisms.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dpsvm/error.hpp"
#include "dpsvm/noise.hpp"
#include "testing_hooks.hpp"

namespace dpsvm {

#ifdef DPSVM_TEST_HOOKS
namespace testing {
namespace {
thread_local bool g_zero_noise = false;
}
ScopedZeroNoise::ScopedZeroNoise() : previous_(g_zero_noise) { g_zero_noise = true; }
ScopedZeroNoise::~ScopedZeroNoise() { g_zero_noise = previous_; }
bool zero_noise_active() noexcept { return g_zero_noise; }
}  // namespace testing
#endif

namespace {

const double kLn2 = std::numbers::ln2;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ParameterError(std::string(name) + " must be a positive finite number");
    }
}

void require_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
}

void require_n(std::size_t n) {
    if (n <= 1) throw ParameterError("n must be > 1");
}

std::vector<double> add_noise(std::vector<double> w, double lambda, Rng& rng) {
    require_positive(lambda, "lambda");
    const auto mu = sample_laplace(lambda, w.size(), rng);
#ifdef DPSVM_TEST_HOOKS
    if (testing::zero_noise_active()) return w;
#endif
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += mu[k];
    return w;
}

std::vector<int> labels_of(const Database& db) {
    std::vector<int> y;
    y.reserve(db.size());
    for (const auto& e : db) y.push_back(e.y);
    return y;
}

}  // namespace

std::vector<double> PrivateModel::features(std::span<const double> x) const {
    if (x.size() != dim) throw DimensionError("input has wrong dimension for model");
    if (mechanism == Mechanism::Rff) return feature_map->features(x);
    return {x.begin(), x.end()};
}

double PrivateModel::decision(std::span<const double> x) const {
    const auto phi = features(x);
    if (phi.size() != w_hat.size()) throw DimensionError("model weights and features disagree");
    double s = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) s += w_hat[k] * phi[k];
    return s;
}

SvmModel train_svm(const Database& db, const KernelSpec& k, double C) {
    return solve_svm_dual(db, k, C);
}

std::vector<double> exact_weights_finite(const Database& db, double C) {
    const auto model = solve_svm_dual(db, KernelSpec::linear(), C);
    return primal_weights(model, identity_features());
}

std::vector<double> exact_weights_rff(const Database& db, const RandomFeatureMap& map, double C) {
    if (map.dim() != db.dim()) throw DimensionError("feature map and database differ in dimension");
    const FeatureFn phi = [&map](std::span<const double> x) { return map.features(x); };
    const auto sol = solve_dual(gram_matrix(db, phi), labels_of(db), C);
    return primal_weights(sol.alphas, db, phi);
}

PrivateModel train_private_finite(const Database& db, double C, double lambda, Rng& rng) {
    require_positive(lambda, "lambda");
    PrivateModel m;
    m.mechanism = Mechanism::Finite;
    m.w_hat = add_noise(exact_weights_finite(db, C), lambda, rng);
    m.kernel = KernelSpec::linear();
    m.C = C;
    m.lambda = lambda;
    m.n = db.size();
    m.dim = db.dim();
    m.claimed.features = db.dim();
    m.claimed.n = db.size();
    return m;
}

PrivateModel train_private_rff(const Database& db, const KernelSpec& k, double C, double lambda,
                               std::size_t d_hat, Rng& rng) {
    if (!k.translation_invariant()) {
        throw UnsupportedKernelError("private random-feature training needs a translation-invariant kernel");
    }
    require_positive(lambda, "lambda");
    if (d_hat == 0) throw ParameterError("d_hat must be >= 1");
    auto map = RandomFeatureMap::draw(k, db.dim(), d_hat, rng.next_u64());
    PrivateModel m;
    m.mechanism = Mechanism::Rff;
    m.w_hat = add_noise(exact_weights_rff(db, map, C), lambda, rng);
    m.feature_map = std::move(map);
    m.kernel = k;
    m.C = C;
    m.lambda = lambda;
    m.n = db.size();
    m.dim = db.dim();
    m.claimed.features = d_hat;
    m.claimed.n = db.size();
    return m;
}

double calibrate_noise_privacy_finite(double L, double C, double kappa, std::size_t F, double beta,
                                      std::size_t n) {
    require_positive(L, "L");
    require_positive(C, "C");
    require_positive(kappa, "kappa");
    require_positive(beta, "beta");
    if (F == 0) throw ParameterError("F must be >= 1");
    require_n(n);
    return 4.0 * L * C * kappa * std::sqrt(static_cast<double>(F)) / (beta * static_cast<double>(n));
}

double calibrate_noise_privacy_rff(double L, double C, std::size_t d_hat, double beta,
                                   std::size_t n) {
    require_positive(L, "L");
    require_positive(C, "C");
    require_positive(beta, "beta");
    if (d_hat == 0) throw ParameterError("d_hat must be >= 1");
    require_n(n);
    return std::pow(2.0, 2.5) * L * C * std::sqrt(static_cast<double>(d_hat)) /
           (beta * static_cast<double>(n));
}

double calibrate_noise_utility_finite(double eps, double delta, double Phi, std::size_t F) {
    require_positive(eps, "eps");
    require_delta(delta);
    require_positive(Phi, "Phi");
    if (F == 0) throw ParameterError("F must be >= 1");
    return eps / (2.0 * Phi * (static_cast<double>(F) * kLn2 + std::log(1.0 / delta)));
}

double calibrate_noise_utility_rff(double eps, double delta, std::size_t d_hat) {
    require_positive(eps, "eps");
    require_delta(delta);
    if (d_hat == 0) throw ParameterError("d_hat must be >= 1");
    const double root = std::sqrt(static_cast<double>(d_hat));
    const double first = eps / (16.0 * kLn2 * root);
    const double second = eps * root / (8.0 * std::log(2.0 / delta));
    return std::min(first, second);
}

double hinge_theta(double eps, double C) {
    require_positive(eps, "eps");
    require_positive(C, "C");
    const double r = eps / C;
    return std::min(1.0, (r * r) * (r * r) / 4096.0);
}

std::size_t calibrate_rff_dim_hinge(double eps, double delta, double C, std::size_t d,
                                    double sigma_p, double diam) {
    require_delta(delta);
    if (d == 0) throw ParameterError("d must be >= 1");
    if (std::isinf(sigma_p)) {
        throw CalibrationUnsupportedError(
            "spectral second moment is infinite (laplacian kernel); choose d_hat manually");
    }
    require_positive(sigma_p, "sigma_p");
    require_positive(diam, "diam");
    const double theta = hinge_theta(eps, C);
    const double spread = sigma_p * diam;
    const double bound = 4.0 * static_cast<double>(d + 2) / theta *
                         std::log(512.0 * spread * spread / (delta * theta));
    if (bound <= 1.0) return 1;
    return static_cast<std::size_t>(std::ceil(bound));
}

CalibrationReport calibrate_finite(double L, double C, double kappa, std::size_t F, double beta,
                                   std::size_t n, double eps, double delta, double Phi) {
    CalibrationReport r;
    r.lambda_min_privacy = calibrate_noise_privacy_finite(L, C, kappa, F, beta, n);
    r.lambda_max_utility = calibrate_noise_utility_finite(eps, delta, Phi, F);
    r.feasible = r.lambda_min_privacy <= r.lambda_max_utility;
    r.beta_achievable = beta * r.lambda_min_privacy / r.lambda_max_utility;
    return r;
}

CalibrationReport calibrate_rff(double L, double C, std::size_t d_hat, double beta, std::size_t n,
                                double eps, double delta) {
    CalibrationReport r;
    r.lambda_min_privacy = calibrate_noise_privacy_rff(L, C, d_hat, beta, n);
    r.lambda_max_utility = calibrate_noise_utility_rff(eps, delta, d_hat);
    r.d_hat = d_hat;
    r.feasible = r.lambda_min_privacy <= r.lambda_max_utility;
    r.beta_achievable = beta * r.lambda_min_privacy / r.lambda_max_utility;
    return r;
}

CalibrationReport optimal_dp_upper_bound_hinge(double eps, double delta, double C, std::size_t n,
                                               std::size_t d, double sigma_p, double diam) {
    require_n(n);
    const std::size_t d_hat = calibrate_rff_dim_hinge(eps, delta, C, d, sigma_p, diam);
    CalibrationReport r;
    r.d_hat = d_hat;
    r.lambda_max_utility = calibrate_noise_utility_rff(eps, delta, d_hat);
    r.beta_achievable = std::pow(2.0, 2.5) * C * std::sqrt(static_cast<double>(d_hat)) /
                        (r.lambda_max_utility * static_cast<double>(n));
    r.lambda_min_privacy = calibrate_noise_privacy_rff(1.0, C, d_hat, r.beta_achievable, n);
    r.feasible = true;
    return r;
}

double optimal_dp_lower_bound_linear(double delta) {
    require_delta(delta);
    return std::log((1.0 - delta) / delta);
}

double rbf_lower_bound_sigma_limit() { return std::sqrt(1.0 / (2.0 * kLn2)); }

std::size_t rbf_packing_size(double sigma) {
    if (!(sigma > 0.0) || !(sigma < rbf_lower_bound_sigma_limit())) {
        throw ParameterError("sigma must lie in (0, sqrt(1/(2 ln 2)) ~ 0.8493)");
    }
    return static_cast<std::size_t>(std::floor(2.0 / sigma * std::sqrt(2.0 / kLn2)));
}

RbfLowerBound optimal_dp_lower_bound_rbf(double delta, double sigma) {
    require_delta(delta);
    const std::size_t N = rbf_packing_size(sigma);
    return {N, std::log((1.0 - delta) * static_cast<double>(N - 1) / delta)};
}

}  // namespace dpsvm
