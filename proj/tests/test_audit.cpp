#include <gtest/gtest.h>

#include <cmath>

#include "dpsvm/audit.hpp"
#include "dpsvm/error.hpp"
#include "oracles.hpp"

using namespace dpsvm;

TEST(TwoDatabaseConstruction, PairLayout) {
    const auto fam = build_lemma17_pair(1.0, 10, 0.04);
    ASSERT_EQ(fam.databases.size(), 2u);
    EXPECT_TRUE(are_neighbors(fam.databases[0], fam.databases[1]));
    EXPECT_EQ(fam.databases[0][9].y, -1);
    EXPECT_EQ(fam.databases[1][9].y, 1);
    EXPECT_DOUBLE_EQ(fam.databases[0][9].x[0], 0.8 - 0.4);
    ASSERT_EQ(fam.expected_weights.size(), 2u);
    EXPECT_NEAR(fam.expected_weights[0], oracle::lemma17_w1(1.0, 10, 0.04), 1e-15);
    EXPECT_NEAR(fam.expected_weights[1], oracle::lemma17_w2(1.0, 10, 0.04), 1e-15);
    EXPECT_THROW((void)build_lemma17_pair(1.0, 10, 0.06), ParameterError);
}

TEST(TwoDatabaseConstruction, SolverReproducesClosedForm) {
    const auto r = lemma17_audit(1.0, 10, 0.04);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.details.at("w1"), 0.68, 1e-6);
    EXPECT_NEAR(r.details.at("w2"), 0.76, 1e-6);
    EXPECT_NEAR(r.statistic, 0.08, 1e-6);
}

TEST(TwoDatabaseConstruction, OtherParameters) {
    for (std::size_t n : {4u, 7u, 20u}) {
        const double C = 2.0, eps = 0.5 * std::sqrt(C) / (2.0 * n);
        const auto r = lemma17_audit(C, n, eps);
        EXPECT_TRUE(r.pass) << n;
        EXPECT_NEAR(r.details.at("w1"), oracle::lemma17_w1(C, n, eps), 1e-6);
        EXPECT_NEAR(r.details.at("w2"), oracle::lemma17_w2(C, n, eps), 1e-6);
    }
}

TEST(PackingFamily, FamilyAndSeparation) {
    const auto fam = build_lemma19_family(1.0, 8, 0.3);
    ASSERT_EQ(fam.databases.size(), 11u);
    for (std::size_t i = 1; i < fam.databases.size(); ++i) {
        EXPECT_TRUE(are_neighbors(fam.databases[0], fam.databases[i]));
    }
    const auto r = lemma19_separation_audit(1.0, 8, 0.3);
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.details.at("alpha_n_max_deviation"), 1e-6);
    EXPECT_GE(r.statistic, 0.0625 - 1e-6);
    EXPECT_THROW((void)build_lemma19_family(10.0, 8, 0.3), ParameterError);
    EXPECT_THROW((void)build_lemma19_family(1.0, 8, 0.85), ParameterError);
}

TEST(Grid, CornersAndCount) {
    const auto g = box_grid(DomainBox::cube(2, 1.0), 3);
    ASSERT_EQ(g.size(), 9u);
    EXPECT_EQ(g.front(), (std::vector<double>{-1.0, -1.0}));
    EXPECT_EQ(g.back(), (std::vector<double>{1.0, 1.0}));
    const DecisionFn f = [](std::span<const double> x) { return x[0]; };
    const DecisionFn z = [](std::span<const double>) { return 0.0; };
    EXPECT_DOUBLE_EQ(sup_norm_distance(f, z, DomainBox::cube(2, 1.0), 5), 1.0);
}

TEST(Sensitivity, NeverExceedsBound) {
    const auto r = sensitivity_audit({20, 2}, 100, 1.0, DomainBox::cube(2, 1.0), 17);
    EXPECT_TRUE(r.pass);
    EXPECT_DOUBLE_EQ(r.bound, 4.0 * std::sqrt(2.0) * std::sqrt(2.0) / 20.0);
    EXPECT_LE(r.statistic, r.bound);
}

TEST(Sensitivity, IsReproducible) {
    const auto a = sensitivity_audit({10, 3}, 30, 2.0, DomainBox::cube(3, 0.5), 4);
    const auto b = sensitivity_audit({10, 3}, 30, 2.0, DomainBox::cube(3, 0.5), 4);
    EXPECT_EQ(a.statistic, b.statistic);
}

TEST(KernelApprox, FailureRateWithinGuarantee) {
    const auto box = DomainBox::cube(1, 1.0);
    const auto r = kernel_approx_audit(KernelSpec::rbf(1.0), 500, box, 0.25, 40, 21, 3);
    EXPECT_LE(r.bound, 1.0);
    EXPECT_TRUE(r.pass);
}

TEST(Utility, FiniteMechanismAtCalibratedNoise) {
    Rng rng(10);
    std::vector<Example> e;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> x{2.0 * rng.uniform_open() - 1.0, 2.0 * rng.uniform_open() - 1.0};
        e.push_back({x, x[0] > 0.0 ? 1 : -1});
    }
    const Database db(std::move(e));
    MechanismParams p;
    p.lambda = calibrate_noise_utility_finite(0.5, 0.1, 1.0, 2);
    const auto r = utility_audit(db, p, 0.5, 0.1, 100, 11, 21, DomainBox::cube(2, 1.0));
    EXPECT_TRUE(r.pass);
    EXPECT_LE(r.statistic, 0.1);
}

TEST(Privacy, SmokeTestOnTwoDatabasePair) {
    const auto fam = build_lemma17_pair(1.0, 10, 0.04);
    MechanismParams p;
    p.lambda = calibrate_noise_privacy_finite(1, 1, 0.8, 1, 1.0, 10);
    const auto r = privacy_ratio_audit(fam.databases[0], fam.databases[1], p, 1.0, 20000, 20, 0, 5);
    EXPECT_TRUE(r.pass);
    EXPECT_GT(r.details.at("bins_used"), 0.0);
}

TEST(Privacy, DetectsNoiseFarTooSmall) {
    const auto fam = build_lemma17_pair(1.0, 10, 0.04);
    MechanismParams p;
    p.lambda = 0.02;  // separation 0.08 is 4 scale units
    const auto r = privacy_ratio_audit(fam.databases[0], fam.databases[1], p, 1.0, 20000, 40, 0, 5);
    EXPECT_FALSE(r.pass);
}

TEST(Neighbors, Definition) {
    const Database a({{{1.0}, 1}, {{2.0}, -1}});
    const Database b({{{1.0}, 1}, {{5.0}, 1}});
    const Database c({{{0.0}, 1}, {{2.0}, -1}});
    EXPECT_TRUE(are_neighbors(a, b));
    EXPECT_FALSE(are_neighbors(a, c));
}
