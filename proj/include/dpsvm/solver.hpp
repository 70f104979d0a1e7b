#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dpsvm/data.hpp"
#include "dpsvm/kernels.hpp"

namespace dpsvm {

/// Dense symmetric n x n kernel matrix.
class GramMatrix {
public:
    explicit GramMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

private:
    std::size_t n_;
    std::vector<double> data_;
};

using FeatureFn = std::function<std::vector<double>(std::span<const double>)>;

[[nodiscard]] GramMatrix gram_matrix(const Database& db, const KernelSpec& k);
/// K_ij = <features(x_i), features(x_j)>.
[[nodiscard]] GramMatrix gram_matrix(const Database& db, const FeatureFn& features);

struct SweepInfo {
    std::size_t sweep;
    double objective;
    std::span<const double> alphas;
};

struct SolverOptions {
    double tol = 1e-8;
    std::size_t max_sweeps = 1'000'000;
    /// Called after every completed sweep.
    std::function<void(const SweepInfo&)> on_sweep;
};

struct DualSolution {
    std::vector<double> alphas;
    double objective = 0.0;
    double kkt_residual = 0.0;
    std::size_t sweeps = 0;
};

/// Maximizes sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij over 0 <= a_i <= C/n
/// (hinge-loss SVM dual without bias) by cyclic projected coordinate ascent in
/// index order 1..n. Each coordinate step is the exact maximizer along that
/// coordinate, so the objective never decreases and every iterate is feasible.
///
/// Throws ConvergenceError carrying the last iterate when the KKT residual is
/// still above `tol` after `max_sweeps` sweeps.
[[nodiscard]] DualSolution solve_dual(const GramMatrix& gram, std::span<const int> labels, double C,
                                      const SolverOptions& options = {});

/// Largest violation of the KKT conditions of the box-constrained dual, with
/// g_i = 1 - y_i sum_j a_j y_j K_ij:
///   a_i = 0     -> max(g_i, 0)
///   a_i = C/n   -> max(-g_i, 0)
///   otherwise   -> |g_i|
[[nodiscard]] double kkt_residual(const GramMatrix& gram, std::span<const int> labels,
                                  std::span<const double> alphas, double C);

[[nodiscard]] double dual_objective(const GramMatrix& gram, std::span<const int> labels,
                                    std::span<const double> alphas);

/// Trained non-private SVM: dual coefficients plus the data they refer to.
struct SvmModel {
    std::vector<double> alphas;
    Database support;
    KernelSpec kernel;
    double C;
    double objective;
    double kkt_residual;
};

[[nodiscard]] SvmModel solve_svm_dual(const Database& db, const KernelSpec& k, double C,
                                      double tol = 1e-8, std::size_t max_sweeps = 1'000'000);

/// w = sum_i a_i y_i features(x_i).
[[nodiscard]] std::vector<double> primal_weights(std::span<const double> alphas, const Database& db,
                                                 const FeatureFn& features);
[[nodiscard]] std::vector<double> primal_weights(const SvmModel& model, const FeatureFn& features);

/// f(x) = sum_i a_i y_i k(x, x_i).
[[nodiscard]] double dual_decision(const SvmModel& model, std::span<const double> x);

/// <w, features(x)>.
[[nodiscard]] double primal_decision(std::span<const double> w, const FeatureFn& features,
                                     std::span<const double> x);

/// Identity map, the built-in finite feature map.
[[nodiscard]] FeatureFn identity_features();

}  // namespace dpsvm
