#include <gtest/gtest.h>

#include <cmath>

#include "dpsvm/error.hpp"
#include "dpsvm/random.hpp"
#include "dpsvm/solver.hpp"
#include "oracles.hpp"

using namespace dpsvm;

namespace {

Database random_db(Rng& rng, std::size_t n, std::size_t d) {
    std::vector<Example> e;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x(d);
        for (auto& v : x) v = 2.0 * rng.uniform_open() - 1.0;
        e.push_back({x, rng.uniform_open() < 0.5 ? -1 : 1});
    }
    return Database(std::move(e));
}

std::vector<int> labels_of(const Database& db) {
    std::vector<int> y;
    for (const auto& e : db) y.push_back(e.y);
    return y;
}

}  // namespace

TEST(Solver, MatchesBruteForceGridOnThreePoints) {
    Rng rng(2718);
    for (int t = 0; t < 20; ++t) {
        const auto db = random_db(rng, 3, 2);
        const double C = 0.15 + 2.85 * rng.uniform_open();
        const auto k = t % 2 ? KernelSpec::linear() : KernelSpec::rbf(0.8);
        const auto gram = gram_matrix(db, k);
        const auto y = labels_of(db);
        const auto sol = solve_dual(gram, y, C);
        std::vector<std::vector<double>> Q(3, std::vector<double>(3));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) Q[i][j] = y[i] * y[j] * gram(i, j);
        EXPECT_GE(sol.objective, oracle::brute_force_dual_max_3(Q, C / 3.0, 1e-3) - 1e-4);
        EXPECT_LE(sol.kkt_residual, 1e-8);
        EXPECT_NEAR(sol.objective, oracle::dual_objective(Q, sol.alphas), 1e-12);
    }
}

TEST(Solver, TwoPointClosedForm) {
    // Points (1,0)/+1 and (-1,0)/-1: objective s - s^2/2 in s = a_1 + a_2, so
    // any split with s = 1 is optimal; the weights are unique.
    const Database db({{{1.0, 0.0}, 1}, {{-1.0, 0.0}, -1}});
    const auto m = solve_svm_dual(db, KernelSpec::linear(), 4.0);
    EXPECT_NEAR(m.alphas[0] + m.alphas[1], 1.0, 1e-9);
    EXPECT_NEAR(m.objective, 0.5, 1e-12);
    const auto w = primal_weights(m, identity_features());
    EXPECT_NEAR(w[0], 1.0, 1e-9);
    EXPECT_NEAR(w[1], 0.0, 1e-12);
    const std::vector<double> x{2.0, 0.0};
    EXPECT_NEAR(dual_decision(m, x), 2.0, 1e-8);
}

TEST(Solver, BoxConstraintBinds) {
    // Same points with C = 0.5: a_i <= C/n = 0.25, so s = 1/2 < 1 forces both to the bound.
    const Database db({{{1.0, 0.0}, 1}, {{-1.0, 0.0}, -1}});
    const auto m = solve_svm_dual(db, KernelSpec::linear(), 0.5);
    EXPECT_EQ(m.alphas[0], 0.25);
    EXPECT_EQ(m.alphas[1], 0.25);
    EXPECT_EQ(m.kkt_residual, 0.0);
}

TEST(Solver, ObjectiveNeverDecreasesAndIteratesFeasible) {
    Rng rng(4);
    const auto db = random_db(rng, 30, 3);
    const auto gram = gram_matrix(db, KernelSpec::rbf(0.5));
    const auto y = labels_of(db);
    const double C = 10.0;
    double prev = 0.0;
    bool monotone = true, feasible = true;
    SolverOptions opt;
    opt.on_sweep = [&](const SweepInfo& s) {
        monotone = monotone && s.objective >= prev - 1e-12;
        prev = s.objective;
        for (double a : s.alphas) feasible = feasible && a >= 0.0 && a <= C / 30.0;
    };
    const auto sol = solve_dual(gram, y, C, opt);
    EXPECT_TRUE(monotone);
    EXPECT_TRUE(feasible);
    EXPECT_LE(sol.kkt_residual, 1e-8);
    EXPECT_GT(sol.sweeps, 0u);
}

TEST(Solver, PrimalAndDualDecisionsAgreeForLinear) {
    Rng rng(6);
    const auto db = random_db(rng, 25, 4);
    const auto m = solve_svm_dual(db, KernelSpec::linear(), 2.0);
    const auto w = primal_weights(m, identity_features());
    const std::vector<double> x{0.1, -0.2, 0.3, 0.9};
    EXPECT_NEAR(primal_decision(w, identity_features(), x), dual_decision(m, x), 1e-12);
}

TEST(Solver, ConvergenceErrorCarriesIterate) {
    Rng rng(8);
    const auto db = random_db(rng, 40, 2);
    const auto gram = gram_matrix(db, KernelSpec::rbf(0.3));
    SolverOptions opt;
    opt.tol = 1e-15;
    opt.max_sweeps = 1;
    try {
        (void)solve_dual(gram, labels_of(db), 100.0, opt);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.best_alphas().size(), 40u);
        EXPECT_GT(e.residual(), 1e-15);
    }
}

TEST(Solver, KktResidualDefinition) {
    // Two orthogonal unit points: g_i = 1 - a_i, C/n = 1 with C = 2.
    GramMatrix g(2);
    g(0, 0) = g(1, 1) = 1.0;
    const std::vector<int> y{1, -1};
    // a = 0 -> max(g, 0) = 1.
    EXPECT_DOUBLE_EQ(kkt_residual(g, y, std::vector<double>{0.0, 1.0}, 2.0), 1.0);
    // a = C/n with g = 0 -> satisfied.
    EXPECT_DOUBLE_EQ(kkt_residual(g, y, std::vector<double>{1.0, 1.0}, 2.0), 0.0);
    // interior a = 0.25 -> |g| = 0.75.
    EXPECT_DOUBLE_EQ(kkt_residual(g, y, std::vector<double>{0.25, 1.0}, 2.0), 0.75);
}

TEST(Solver, RejectsBadArguments) {
    GramMatrix g(2);
    g(0, 0) = g(1, 1) = 1.0;
    const std::vector<int> y{1, -1};
    EXPECT_THROW((void)solve_dual(g, y, 0.0), ParameterError);
    EXPECT_THROW((void)solve_dual(g, std::vector<int>{1}, 1.0), DimensionError);
}

TEST(Solver, DuplicatePointsDoNotBreakConvergence) {
    const Database db({{{0.0, 0.0}, -1}, {{0.0, 0.0}, -1}, {{0.0, 0.0}, 1}});
    const auto m = solve_svm_dual(db, KernelSpec::linear(), 1.0);
    EXPECT_LE(m.kkt_residual, 1e-8);
}
