#include "dpsvm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpsvm/error.hpp"

namespace dpsvm {

namespace {

constexpr double kDegenerateDiagonal = 1e-15;

// f_i = sum_j a_j y_j K_ij, summed in index order.
void margins(const GramMatrix& gram, std::span<const int> labels, std::span<const double> alphas,
             std::vector<double>& f) {
    const std::size_t n = gram.size();
    f.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = gram.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += alphas[j] * labels[j] * row[j];
        f[i] = s;
    }
}

double residual_from_margins(std::span<const int> labels, std::span<const double> alphas,
                             const std::vector<double>& f, double upper) {
    double r = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const double g = 1.0 - labels[i] * f[i];
        double v;
        if (alphas[i] <= 0.0) {
            v = std::max(g, 0.0);
        } else if (alphas[i] >= upper) {
            v = std::max(-g, 0.0);
        } else {
            v = std::abs(g);
        }
        r = std::max(r, v);
    }
    return r;
}

double objective_from_margins(std::span<const int> labels, std::span<const double> alphas,
                              const std::vector<double>& f) {
    double lin = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        lin += alphas[i];
        quad += alphas[i] * labels[i] * f[i];
    }
    return lin - 0.5 * quad;
}

void check_inputs(const GramMatrix& gram, std::span<const int> labels, double C) {
    if (gram.size() != labels.size()) throw DimensionError("gram matrix and labels differ in size");
    if (gram.size() <= 1) throw SizeError("solver needs n > 1");
    if (!(C > 0.0) || !std::isfinite(C)) throw ParameterError("C must be > 0");
}

}  // namespace

GramMatrix gram_matrix(const Database& db, const KernelSpec& k) {
    const std::size_t n = db.size();
    GramMatrix g(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = kernel_eval(k, db[i].x, db[j].x);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

GramMatrix gram_matrix(const Database& db, const FeatureFn& features) {
    const std::size_t n = db.size();
    std::vector<std::vector<double>> phi;
    phi.reserve(n);
    for (const auto& e : db) phi.push_back(features(e.x));
    GramMatrix g(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < phi[i].size(); ++k) s += phi[i][k] * phi[j][k];
            g(i, j) = s;
            g(j, i) = s;
        }
    }
    return g;
}

double kkt_residual(const GramMatrix& gram, std::span<const int> labels,
                    std::span<const double> alphas, double C) {
    check_inputs(gram, labels, C);
    std::vector<double> f;
    margins(gram, labels, alphas, f);
    return residual_from_margins(labels, alphas, f, C / static_cast<double>(gram.size()));
}

double dual_objective(const GramMatrix& gram, std::span<const int> labels,
                      std::span<const double> alphas) {
    std::vector<double> f;
    margins(gram, labels, alphas, f);
    return objective_from_margins(labels, alphas, f);
}

DualSolution solve_dual(const GramMatrix& gram, std::span<const int> labels, double C,
                        const SolverOptions& options) {
    check_inputs(gram, labels, C);
    const std::size_t n = gram.size();
    const double upper = C / static_cast<double>(n);

    std::vector<double> alpha(n, 0.0);
    std::vector<double> f(n, 0.0);
    double residual = residual_from_margins(labels, alpha, f, upper);

    std::size_t sweep = 0;
    while (residual > options.tol) {
        if (sweep == options.max_sweeps) {
            throw ConvergenceError("dual solver did not reach KKT residual " +
                                       std::to_string(options.tol) + " in " +
                                       std::to_string(options.max_sweeps) + " sweeps (residual " +
                                       std::to_string(residual) + ")",
                                   alpha, residual);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double g = 1.0 - labels[i] * f[i];
            const double kii = gram(i, i);
            double next;
            if (kii <= kDegenerateDiagonal) {
                // Objective is linear along this coordinate.
                next = g > 0.0 ? upper : (g < 0.0 ? 0.0 : alpha[i]);
            } else {
                next = std::clamp(alpha[i] + g / kii, 0.0, upper);
            }
            const double step = next - alpha[i];
            if (step != 0.0) {
                alpha[i] = next;
                const auto row = gram.row(i);
                const double s = step * labels[i];
                for (std::size_t j = 0; j < n; ++j) f[j] += s * row[j];
            }
        }
        ++sweep;
        // Resynchronize margins so the stopping test sees no accumulated drift.
        margins(gram, labels, alpha, f);
        residual = residual_from_margins(labels, alpha, f, upper);
        if (options.on_sweep) {
            options.on_sweep(SweepInfo{sweep, objective_from_margins(labels, alpha, f), alpha});
        }
    }

    DualSolution out;
    out.objective = objective_from_margins(labels, alpha, f);
    out.alphas = std::move(alpha);
    out.kkt_residual = residual;
    out.sweeps = sweep;
    return out;
}

SvmModel solve_svm_dual(const Database& db, const KernelSpec& k, double C, double tol,
                        std::size_t max_sweeps) {
    if (!(tol > 0.0)) throw ParameterError("tol must be > 0");
    if (max_sweeps == 0) throw ParameterError("max_sweeps must be >= 1");
    std::vector<int> labels;
    labels.reserve(db.size());
    for (const auto& e : db) labels.push_back(e.y);
    SolverOptions options;
    options.tol = tol;
    options.max_sweeps = max_sweeps;
    auto sol = solve_dual(gram_matrix(db, k), labels, C, options);
    return SvmModel{std::move(sol.alphas), db, k, C, sol.objective, sol.kkt_residual};
}

std::vector<double> primal_weights(std::span<const double> alphas, const Database& db,
                                   const FeatureFn& features) {
    if (alphas.size() != db.size()) throw DimensionError("alphas and database differ in size");
    std::vector<double> w;
    for (std::size_t i = 0; i < db.size(); ++i) {
        const auto phi = features(db[i].x);
        if (w.empty()) w.assign(phi.size(), 0.0);
        if (phi.size() != w.size()) throw DimensionError("feature map changed dimension");
        const double c = alphas[i] * db[i].y;
        for (std::size_t k = 0; k < w.size(); ++k) w[k] += c * phi[k];
    }
    return w;
}

std::vector<double> primal_weights(const SvmModel& model, const FeatureFn& features) {
    return primal_weights(model.alphas, model.support, features);
}

double dual_decision(const SvmModel& model, std::span<const double> x) {
    if (x.size() != model.support.dim()) throw DimensionError("input has wrong dimension");
    double s = 0.0;
    for (std::size_t i = 0; i < model.alphas.size(); ++i) {
        if (model.alphas[i] == 0.0) continue;
        s += model.alphas[i] * model.support[i].y * kernel_eval(model.kernel, x, model.support[i].x);
    }
    return s;
}

double primal_decision(std::span<const double> w, const FeatureFn& features,
                       std::span<const double> x) {
    const auto phi = features(x);
    if (phi.size() != w.size()) throw DimensionError("weights and features differ in dimension");
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * phi[k];
    return s;
}

FeatureFn identity_features() {
    return [](std::span<const double> x) { return std::vector<double>(x.begin(), x.end()); };
}

}  // namespace dpsvm
