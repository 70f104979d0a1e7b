#include "dpsvm/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpsvm/error.hpp"
#include "dpsvm/noise.hpp"
#include "dpsvm/random.hpp"
#include "dpsvm/rff.hpp"
#include "dpsvm/solver.hpp"

namespace dpsvm {

namespace {

bool judge(double statistic, double bound, AuditReport::Direction dir) {
    return dir == AuditReport::Direction::AtMost ? statistic <= bound : statistic >= bound;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

std::vector<double> uniform_point(const DomainBox& box, Rng& rng) {
    std::vector<double> x(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
        x[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * rng.uniform_open();
    }
    return x;
}

int uniform_label(Rng& rng) { return (rng.next_u64() >> 63) != 0 ? 1 : -1; }

double mean_hinge(const Database& db, const DecisionFn& f) {
    double s = 0.0;
    for (const auto& e : db) s += std::max(0.0, 1.0 - e.y * f(e.x));
    return s / static_cast<double>(db.size());
}

// Per-axis offsets {k * h : |k| <= resolution - 1}: every difference of two
// points of box_grid(box, resolution), as a product grid.
std::vector<std::vector<double>> difference_grid(const DomainBox& box, std::size_t resolution) {
    const auto r = static_cast<long>(resolution) - 1;
    std::vector<std::vector<double>> axes(box.dim());
    for (std::size_t a = 0; a < box.dim(); ++a) {
        const double width = box.upper[a] - box.lower[a];
        if (width == 0.0) {
            axes[a] = {0.0};
            continue;
        }
        for (long k = -r; k <= r; ++k) axes[a].push_back(width * static_cast<double>(k) / static_cast<double>(r));
    }
    std::vector<std::vector<double>> out{{}};
    for (const auto& axis : axes) {
        std::vector<std::vector<double>> next;
        next.reserve(out.size() * axis.size());
        for (const auto& prefix : out) {
            for (double v : axis) {
                auto p = prefix;
                p.push_back(v);
                next.push_back(std::move(p));
            }
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace

bool are_neighbors(const Database& a, const Database& b) {
    if (a.size() != b.size() || a.dim() != b.dim()) return false;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        if (!(a[i] == b[i])) return false;
    }
    return true;
}

LowerBoundFamily build_lemma17_pair(double C, std::size_t n, double eps) {
    if (!(C > 0.0) || !std::isfinite(C)) throw ParameterError("C must be > 0");
    if (n <= 1) throw ParameterError("n must be > 1");
    const double limit = std::sqrt(C) / (2.0 * static_cast<double>(n));
    if (!(eps > 0.0 && eps < limit)) {
        throw ParameterError("eps must satisfy 0 < eps < sqrt(C)/(2n) = " + std::to_string(limit));
    }
    const auto nn = static_cast<double>(n);
    const double M = 2.0 * nn * eps / C;
    const double m = nn * eps / C;

    std::vector<Example> shared;
    const std::size_t negatives = n / 2;
    for (std::size_t i = 0; i < negatives; ++i) shared.push_back({{-M}, -1});
    for (std::size_t i = negatives; i + 1 < n; ++i) shared.push_back({{M}, 1});

    auto first = shared;
    first.push_back({{M - m}, -1});
    auto second = shared;
    second.push_back({{M - m}, 1});

    LowerBoundFamily fam;
    fam.construction = "lemma17";
    fam.databases.emplace_back(std::move(first));
    fam.databases.emplace_back(std::move(second));
    fam.expected_separation = 2.0 * eps;
    fam.expected_weights = {C * (M * (nn - 2.0) + m) / nn, C * (M * nn - m) / nn};
    fam.parameters = {{"C", C}, {"n", nn}, {"eps", eps}, {"M", M}, {"m", m}};
    return fam;
}

LowerBoundFamily build_lemma19_family(double C, std::size_t n, double sigma) {
    if (!(C > 0.0) || !std::isfinite(C)) throw ParameterError("C must be > 0");
    if (!(static_cast<double>(n) > C)) throw ParameterError("construction requires n > C");
    if (n <= 1) throw ParameterError("n must be > 1");
    const std::size_t N = rbf_packing_size(sigma);

    LowerBoundFamily fam;
    fam.construction = "lemma19";
    for (std::size_t i = 1; i <= N; ++i) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(N);
        std::vector<Example> entries(n - 1, Example{{0.0, 0.0}, -1});
        entries.push_back({{std::cos(theta), std::sin(theta)}, 1});
        fam.databases.emplace_back(std::move(entries));
    }
    fam.expected_separation = C / (2.0 * static_cast<double>(n));
    fam.parameters = {{"C", C},
                      {"n", static_cast<double>(n)},
                      {"sigma", sigma},
                      {"N", static_cast<double>(N)},
                      {"gamma", std::exp(-1.0 / (2.0 * sigma * sigma))}};
    return fam;
}

std::vector<std::vector<double>> box_grid(const DomainBox& box, std::size_t resolution) {
    if (resolution < 2) throw ParameterError("grid resolution must be >= 2");
    std::vector<std::vector<double>> out{{}};
    for (std::size_t a = 0; a < box.dim(); ++a) {
        std::vector<std::vector<double>> next;
        next.reserve(out.size() * resolution);
        for (const auto& prefix : out) {
            for (std::size_t k = 0; k < resolution; ++k) {
                const double t = static_cast<double>(k) / static_cast<double>(resolution - 1);
                auto p = prefix;
                p.push_back(k + 1 == resolution ? box.upper[a]
                                                : box.lower[a] + t * (box.upper[a] - box.lower[a]));
                next.push_back(std::move(p));
            }
        }
        out = std::move(next);
    }
    return out;
}

double sup_norm_distance(const DecisionFn& f, const DecisionFn& g, const DomainBox& box,
                         std::size_t grid_resolution) {
    double best = 0.0;
    for (const auto& x : box_grid(box, grid_resolution)) best = std::max(best, std::abs(f(x) - g(x)));
    return best;
}

double weight_sensitivity(const Database& db, const Example& replacement, double C) {
    const auto neighbor = neighbor_replace_last(db, replacement);
    return l1_distance(exact_weights_finite(db, C), exact_weights_finite(neighbor, C));
}

AuditReport sensitivity_audit(const SensitivityConfig& config, std::size_t trials, double C,
                              const DomainBox& box, std::uint64_t seed) {
    if (trials == 0) throw ParameterError("trials must be >= 1");
    if (box.dim() != config.dim) throw DimensionError("box dimension differs from config");
    if (config.n <= 1) throw ParameterError("n must be > 1");

    const double kappa = box.max_norm();
    const double bound = 4.0 * C * kappa * std::sqrt(static_cast<double>(config.dim)) /
                         static_cast<double>(config.n);
    double worst = 0.0;
    std::size_t violations = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(mix64(seed, t));
        std::vector<Example> entries;
        entries.reserve(config.n);
        for (std::size_t i = 0; i < config.n; ++i) {
            auto x = uniform_point(box, rng);
            entries.push_back({std::move(x), uniform_label(rng)});
        }
        const Database db(std::move(entries));
        auto x = uniform_point(box, rng);
        const Example replacement{std::move(x), uniform_label(rng)};
        const std::size_t position = rng.next_u64() % config.n;
        const double diff = weight_sensitivity(db.rotated(position), replacement, C);
        if (diff > bound) ++violations;
        worst = std::max(worst, diff);
    }

    AuditReport r;
    r.name = "sensitivity";
    r.trials = trials;
    r.statistic = worst;
    r.bound = bound;
    r.direction = AuditReport::Direction::AtMost;
    r.pass = judge(worst, bound, r.direction);
    r.seed = seed;
    r.details = {{"kappa", kappa},
                 {"C", C},
                 {"n", static_cast<double>(config.n)},
                 {"dim", static_cast<double>(config.dim)},
                 {"violations", static_cast<double>(violations)}};
    return r;
}

AuditReport lemma17_audit(double C, std::size_t n, double eps, double tol) {
    const auto fam = build_lemma17_pair(C, n, eps);
    const auto w1 = exact_weights_finite(fam.databases[0], C);
    const auto w2 = exact_weights_finite(fam.databases[1], C);
    const double sep = std::abs(w1[0] - w2[0]);

    AuditReport r;
    r.name = "lemma17";
    r.trials = 1;
    r.statistic = sep;
    r.bound = fam.expected_separation;
    r.direction = AuditReport::Direction::AtLeast;
    const double err1 = std::abs(w1[0] - fam.expected_weights[0]);
    const double err2 = std::abs(w2[0] - fam.expected_weights[1]);
    r.pass = std::abs(sep - fam.expected_separation) <= tol && err1 <= tol && err2 <= tol;
    const double M = fam.parameters.at("M");
    const double kappa = M;
    r.details = {{"w1", w1[0]},
                 {"w2", w2[0]},
                 {"w1_expected", fam.expected_weights[0]},
                 {"w2_expected", fam.expected_weights[1]},
                 {"M", M},
                 {"m", fam.parameters.at("m")},
                 {"inverse_M", 1.0 / M},
                 {"sensitivity_bound", 4.0 * C * kappa / static_cast<double>(n)}};
    return r;
}

AuditReport utility_audit(const Database& db, const MechanismParams& params, double eps,
                          double delta, std::size_t trials, std::size_t grid_resolution,
                          std::uint64_t seed, std::optional<DomainBox> box) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("eps must be a positive finite number");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("delta must lie in (0, 1)");
    if (trials == 0) throw ParameterError("trials must be >= 1");
    const DomainBox region = box ? *box : bounding_box(db);
    if (region.dim() != db.dim()) throw DimensionError("box dimension differs from data");

    auto points = box_grid(region, grid_resolution);
    for (const auto& e : db) points.push_back(e.x);

    // Non-private reference on the target kernel.
    std::vector<double> reference(points.size());
    DecisionFn reference_fn;
    std::vector<double> w_star;
    std::optional<SvmModel> svm;
    if (params.mechanism == Mechanism::Finite) {
        w_star = exact_weights_finite(db, params.C);
        reference_fn = [&w_star](std::span<const double> x) {
            double s = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) s += w_star[k] * x[k];
            return s;
        };
    } else {
        if (params.d_hat == 0) throw ParameterError("random-feature audit needs d_hat >= 1");
        svm = solve_svm_dual(db, params.kernel, params.C);
        reference_fn = [&svm](std::span<const double> x) { return dual_decision(*svm, x); };
    }
    for (std::size_t p = 0; p < points.size(); ++p) reference[p] = reference_fn(points[p]);
    const double reference_hinge = mean_hinge(db, reference_fn);

    std::size_t failures = 0;
    std::size_t hinge_violations = 0;
    double max_sup = 0.0;
    double sum_sup = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(mix64(seed, t));
        const PrivateModel model =
            params.mechanism == Mechanism::Finite
                ? train_private_finite(db, params.C, params.lambda, rng)
                : train_private_rff(db, params.kernel, params.C, params.lambda, params.d_hat, rng);
        double sup = 0.0;
        for (std::size_t p = 0; p < points.size(); ++p) {
            sup = std::max(sup, std::abs(model.decision(points[p]) - reference[p]));
        }
        if (sup > eps) ++failures;
        const DecisionFn private_fn = [&model](std::span<const double> x) { return model.decision(x); };
        if (std::abs(mean_hinge(db, private_fn) - reference_hinge) > sup + 1e-12) ++hinge_violations;
        max_sup = std::max(max_sup, sup);
        sum_sup += sup;
    }

    AuditReport r;
    r.name = params.mechanism == Mechanism::Finite ? "utility_finite" : "utility_rff";
    r.trials = trials;
    r.statistic = static_cast<double>(failures) / static_cast<double>(trials);
    r.bound = delta;
    r.direction = AuditReport::Direction::AtMost;
    r.pass = judge(r.statistic, r.bound, r.direction) && hinge_violations == 0;
    r.seed = seed;
    r.details = {{"eps", eps},
                 {"lambda", params.lambda},
                 {"C", params.C},
                 {"grid_resolution", static_cast<double>(grid_resolution)},
                 {"max_sup_distance", max_sup},
                 {"mean_sup_distance", sum_sup / static_cast<double>(trials)},
                 {"hinge_transfer_violations", static_cast<double>(hinge_violations)}};
    if (params.mechanism == Mechanism::Rff) r.details["d_hat"] = static_cast<double>(params.d_hat);
    return r;
}

AuditReport kernel_approx_audit(const KernelSpec& k, std::size_t d_hat, const DomainBox& box,
                                double eps, std::size_t trials, std::size_t grid_resolution,
                                std::uint64_t seed) {
    if (!k.translation_invariant()) {
        throw UnsupportedKernelError("kernel approximation audit needs a translation-invariant kernel");
    }
    if (!(eps > 0.0)) throw ParameterError("eps must be > 0");
    if (trials == 0 || d_hat == 0) throw ParameterError("trials and d_hat must be >= 1");
    if (grid_resolution < 2) throw ParameterError("grid resolution must be >= 2");

    // Both kernels depend on x - y only, so the sup over grid pairs equals the
    // max over the grid of pairwise differences.
    const auto deltas = difference_grid(box, grid_resolution);
    const std::vector<double> origin(box.dim(), 0.0);
    std::vector<double> exact(deltas.size());
    for (std::size_t p = 0; p < deltas.size(); ++p) exact[p] = kernel_eval(k, deltas[p], origin);

    std::size_t failures = 0;
    double max_err = 0.0;
    double sum_err = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto map = RandomFeatureMap::draw(k, box.dim(), d_hat, mix64(seed, t));
        double sup = 0.0;
        for (std::size_t p = 0; p < deltas.size(); ++p) {
            sup = std::max(sup, std::abs(map.kernel(deltas[p], origin) - exact[p]));
        }
        if (sup >= eps) ++failures;
        max_err = std::max(max_err, sup);
        sum_err += sup;
    }

    const double sigma_p = std::sqrt(spectral_second_moment(k, box.dim()));
    const double guaranteed = rff_failure_probability(eps, d_hat, box.dim(), sigma_p, box.diameter());

    AuditReport r;
    r.name = "kernel_approx";
    r.trials = trials;
    r.statistic = static_cast<double>(failures) / static_cast<double>(trials);
    r.bound = std::min(1.0, guaranteed);
    r.direction = AuditReport::Direction::AtMost;
    r.pass = judge(r.statistic, r.bound, r.direction);
    r.seed = seed;
    r.details = {{"d_hat", static_cast<double>(d_hat)},
                 {"eps", eps},
                 {"grid_resolution", static_cast<double>(grid_resolution)},
                 {"max_sup_error", max_err},
                 {"mean_sup_error", sum_err / static_cast<double>(trials)},
                 {"guaranteed_failure_probability", guaranteed}};
    if (!(guaranteed < 1.0)) r.notes.push_back("guarantee is vacuous at this d_hat (bound >= 1)");
    return r;
}

AuditReport privacy_ratio_audit(const Database& d1, const Database& d2,
                                const MechanismParams& params, double beta, std::size_t trials,
                                std::size_t bins, std::size_t coordinate, std::uint64_t seed) {
    if (!are_neighbors(d1, d2)) throw ParameterError("privacy audit needs neighboring databases");
    if (!(beta > 0.0)) throw ParameterError("beta must be > 0");
    if (!(params.lambda > 0.0)) throw ParameterError("lambda must be > 0");
    if (trials == 0 || bins == 0) throw ParameterError("trials and bins must be >= 1");

    // The released weights are w_tilde(D) + mu; only mu is random once the
    // feature map is fixed, so each w_tilde is computed once.
    std::vector<double> w1;
    std::vector<double> w2;
    if (params.mechanism == Mechanism::Finite) {
        w1 = exact_weights_finite(d1, params.C);
        w2 = exact_weights_finite(d2, params.C);
    } else {
        if (params.d_hat == 0) throw ParameterError("random-feature audit needs d_hat >= 1");
        Rng map_rng(seed);
        const auto map = RandomFeatureMap::draw(params.kernel, d1.dim(), params.d_hat, map_rng.next_u64());
        w1 = exact_weights_rff(d1, map, params.C);
        w2 = exact_weights_rff(d2, map, params.C);
    }
    if (coordinate >= w1.size()) throw ParameterError("coordinate index out of range");

    std::vector<double> s1(trials);
    std::vector<double> s2(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        Rng r1(mix64(seed, 2 * t));
        Rng r2(mix64(seed, 2 * t + 1));
        s1[t] = w1[coordinate] + sample_laplace(params.lambda, w1.size(), r1)[coordinate];
        s2[t] = w2[coordinate] + sample_laplace(params.lambda, w2.size(), r2)[coordinate];
    }
    const auto [lo1, hi1] = std::minmax_element(s1.begin(), s1.end());
    const auto [lo2, hi2] = std::minmax_element(s2.begin(), s2.end());
    const double lo = std::min(*lo1, *lo2);
    const double hi = std::max(*hi1, *hi2);
    const double width = (hi - lo) / static_cast<double>(bins);

    std::vector<std::size_t> c1(bins, 0);
    std::vector<std::size_t> c2(bins, 0);
    const auto bin_of = [&](double v) {
        if (width <= 0.0) return std::size_t{0};
        const auto b = static_cast<std::size_t>((v - lo) / width);
        return std::min(b, bins - 1);
    };
    for (double v : s1) ++c1[bin_of(v)];
    for (double v : s2) ++c2[bin_of(v)];

    constexpr std::size_t kMinCount = 20;
    double worst = 0.0;
    std::size_t min_count = std::numeric_limits<std::size_t>::max();
    std::size_t used = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        if (c1[b] < kMinCount || c2[b] < kMinCount) continue;
        ++used;
        worst = std::max(worst, std::abs(std::log(static_cast<double>(c1[b]) / static_cast<double>(c2[b]))));
        min_count = std::min({min_count, c1[b], c2[b]});
    }

    AuditReport r;
    r.name = "privacy_ratio";
    r.trials = trials;
    r.statistic = worst;
    r.direction = AuditReport::Direction::AtMost;
    r.seed = seed;
    if (used == 0) {
        r.bound = beta;
        r.notes.push_back("inconclusive: no bin reached the minimum count in both histograms");
    } else {
        const double slack = 3.0 * std::sqrt(2.0 / static_cast<double>(min_count));
        r.bound = beta + slack;
        r.details["slack"] = slack;
        r.details["min_bin_count"] = static_cast<double>(min_count);
    }
    r.pass = used > 0 && judge(r.statistic, r.bound, r.direction);
    r.details["beta"] = beta;
    r.details["lambda"] = params.lambda;
    r.details["bins"] = static_cast<double>(bins);
    r.details["bins_used"] = static_cast<double>(used);
    r.details["coordinate"] = static_cast<double>(coordinate);
    r.notes.push_back("smoke test only; finite samples cannot certify differential privacy");
    return r;
}

AuditReport lemma19_separation_audit(double C, std::size_t n, double sigma) {
    const auto fam = build_lemma19_family(C, n, sigma);
    const auto kernel = KernelSpec::rbf(sigma);
    const std::size_t N = fam.databases.size();

    std::vector<SvmModel> models;
    models.reserve(N);
    double alpha_dev = 0.0;
    const double alpha_target = C / static_cast<double>(n);
    for (const auto& db : fam.databases) {
        models.push_back(solve_svm_dual(db, kernel, C));
        alpha_dev = std::max(alpha_dev, std::abs(models.back().alphas.back() - alpha_target));
    }

    const double s = std::sin(std::numbers::pi / static_cast<double>(N));
    const double pair_bound = (1.0 - std::exp(-(2.0 / (sigma * sigma)) * s * s)) * alpha_target;
    double min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
        const auto& xi = fam.databases[i][n - 1].x;
        const double fi = dual_decision(models[i], xi);
        for (std::size_t j = 0; j < N; ++j) {
            if (i == j) continue;
            min_sep = std::min(min_sep, std::abs(fi - dual_decision(models[j], xi)));
        }
    }

    AuditReport r;
    r.name = "lemma19";
    r.trials = N;
    r.statistic = min_sep;
    r.bound = fam.expected_separation - 1e-6;
    r.direction = AuditReport::Direction::AtLeast;
    r.pass = judge(r.statistic, r.bound, r.direction) && min_sep >= pair_bound - 1e-9;
    r.details = {{"N", static_cast<double>(N)},
                 {"pairs", static_cast<double>(N * (N - 1) / 2)},
                 {"alpha_n_expected", alpha_target},
                 {"alpha_n_max_deviation", alpha_dev},
                 {"pair_bound", pair_bound},
                 {"gamma", fam.parameters.at("gamma")}};
    return r;
}

}  // namespace dpsvm
