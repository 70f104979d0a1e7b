// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "dpsvm/audit.hpp"
#include "dpsvm/mechanisms.hpp"
#include "dpsvm/model_io.hpp"
#include "dpsvm/noise.hpp"
#include "dpsvm/rff.hpp"
#include "dpsvm/solver.hpp"
#include "oracles.hpp"

using namespace dpsvm;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Outcome lemma17() {
    const auto r = lemma17_audit(1.0, 10, 0.04, 1e-6);
    const double w1 = r.details.at("w1"), w2 = r.details.at("w2");
    const bool ok = std::abs(w1 - oracle::lemma17_w1(1, 10, 0.04)) <= 1e-6 && std::abs(w1 - 0.68) <= 1e-6 &&
                    std::abs(w2 - oracle::lemma17_w2(1, 10, 0.04)) <= 1e-6 && std::abs(w2 - 0.76) <= 1e-6 &&
                    std::abs(std::abs(w1 - w2) - 0.08) <= 1e-6;
    return {ok, fmt("w1=%.9f w2=%.9f |w1-w2|=%.9f", w1, w2, std::abs(w1 - w2))};
}

Outcome sensitivity() {
    const auto r = sensitivity_audit({20, 2}, 500, 1.0, DomainBox::cube(2, 1.0), 20240601);
    return {r.pass && r.trials == 500, fmt("max L1 change %.6f <= bound %.6f over 500 pairs", r.statistic, r.bound)};
}

Outcome calibration() {
    const double a = calibrate_noise_privacy_finite(1, 1, 1, 4, 1, 100);
    const double b = calibrate_noise_privacy_rff(1, 1, 4, 1, 100);
    const double c = calibrate_noise_utility_rff(1, 0.2, 4);
    const auto d = calibrate_rff_dim(0.5, 0.5, 1, 1, 1);
    const bool ok = rel_err(a, 0.08) <= 1e-12 && rel_err(b, std::pow(2.0, 3.5) / 100.0) <= 1e-12 &&
                    rel_err(c, 1.0 / (32.0 * std::log(2.0))) <= 1e-12 && d == 366;
    return {ok, fmt("%.17g %.17g %.17g", a, b, c) + " d_hat=" + std::to_string(d)};
}

Outcome rff() {
    Rng rng(4040);
    bool unit = true;
    for (int t = 0; t < 100; ++t) {
        const auto map = RandomFeatureMap::draw(KernelSpec::rbf(1.0), 1 + t % 3, 1 + t, rng.next_u64());
        std::vector<double> x(map.dim());
        for (auto& v : x) v = 10.0 * rng.normal();
        unit = unit && map.kernel(x, x) == 1.0;
    }
    const double sigma_p = std::sqrt(spectral_second_moment(KernelSpec::rbf(1.0), 1));
    const auto d_hat = calibrate_rff_dim(0.25, 0.25, 1, sigma_p, 2.0);
    const auto r = kernel_approx_audit(KernelSpec::rbf(1.0), d_hat, DomainBox::cube(1, 1.0), 0.25, 200, 51, 777);
    const double rate = r.statistic;
    return {unit && rate <= 0.25,
            fmt("k(x,x)=1 for 100 maps; d_hat=%.0f failure rate %.3f (limit 0.25)", double(d_hat), rate)};
}

Database fixed_dataset_40() {
    Rng rng(40);
    std::vector<Example> e;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> x{2.0 * rng.uniform_open() - 1.0, 2.0 * rng.uniform_open() - 1.0};
        const double margin = x[0] - 0.5 * x[1] + 0.1;
        e.push_back({x, margin > 0.0 ? 1 : -1});
    }
    return Database(std::move(e));
}

Outcome utility() {
    const auto db = fixed_dataset_40();
    const auto box = DomainBox::cube(2, 1.0);
    MechanismParams p;
    p.C = 1.0;
    p.lambda = calibrate_noise_utility_finite(0.5, 0.1, box.max_abs_coordinate(), 2);
    const auto r = utility_audit(db, p, 0.5, 0.1, 500, 51, 5050, box);
    return {r.pass && r.statistic <= 0.1, fmt("lambda=%.6f failure rate %.4f (limit 0.1)", p.lambda, r.statistic)};
}

Outcome noise() {
    Rng rng(6060);
    const auto v = sample_laplace(2.0, 100000, rng);
    const double var = oracle::sample_variance(v);
    bool ok = var >= 7.6 && var <= 8.4;
    double worst = 0.0;
    const double scale = 1.0;
    for (std::size_t q : {1u, 2u, 8u}) {
        const double mean = static_cast<double>(q) * scale;
        const std::vector<double> thr{0.5 * mean, mean, 2.0 * mean};
        std::vector<int> hits(3, 0);
        const int trials = 100000;
        for (int t = 0; t < trials; ++t) {
            const auto mu = sample_laplace(scale, q, rng);
            double l1 = 0.0;
            for (double m : mu) l1 += std::abs(m);
            for (int k = 0; k < 3; ++k) hits[k] += l1 > thr[k];
        }
        for (int k = 0; k < 3; ++k) {
            worst = std::max(worst, std::abs(hits[k] / double(trials) - erlang_tail_probability(q, scale, thr[k])));
        }
    }
    ok = ok && worst <= 0.01;
    return {ok, fmt("variance %.4f; max Erlang tail gap %.4f", var, worst)};
}

Outcome lemma19() {
    const auto r = lemma19_separation_audit(1.0, 8, 0.3);
    const bool ok = r.details.at("N") == 11.0 && r.details.at("alpha_n_max_deviation") <= 1e-6 &&
                    r.statistic >= 0.0625 - 1e-6;
    return {ok, fmt("N=%.0f max |alpha_n - 0.125|=%.2e min separation %.6f", r.details.at("N"),
                    r.details.at("alpha_n_max_deviation"), r.statistic)};
}

Outcome lower_bounds() {
    const double lin = optimal_dp_lower_bound_linear(0.05);
    const auto rbf = optimal_dp_lower_bound_rbf(0.05, 0.3);
    const bool ok = rel_err(lin, std::log(19.0)) <= 1e-12 && rbf.N == 11 && rel_err(rbf.bound, std::log(190.0)) <= 1e-12;
    return {ok, fmt("linear %.15f rbf N=%.0f bound %.15f", lin, double(rbf.N), rbf.bound)};
}

Outcome solver_oracle() {
    Rng rng(9090);
    double worst_gap = -INFINITY, worst_kkt = 0.0;
    int interior = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<Example> e;
        for (int i = 0; i < 3; ++i) {
            e.push_back({{2.0 * rng.uniform_open() - 1.0, 2.0 * rng.uniform_open() - 1.0},
                         rng.uniform_open() < 0.5 ? -1 : 1});
        }
        const Database db(std::move(e));
        const double C = 0.15 + 2.85 * rng.uniform_open();
        const auto k = t % 2 ? KernelSpec::linear() : KernelSpec::rbf(0.3 + rng.uniform_open());
        const auto gram = gram_matrix(db, k);
        std::vector<int> y;
        for (const auto& ex : db) y.push_back(ex.y);
        const auto sol = solve_dual(gram, y, C);
        std::vector<std::vector<double>> Q(3, std::vector<double>(3));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) Q[i][j] = y[i] * y[j] * gram(i, j);
        worst_gap = std::max(worst_gap, oracle::brute_force_dual_max_3(Q, C / 3.0, 1e-3) - sol.objective);
        worst_kkt = std::max(worst_kkt, sol.kkt_residual);
        for (double a : sol.alphas) interior += a > 0.0 && a < C / 3.0;
    }
    return {worst_gap <= 1e-4 && worst_kkt <= 1e-8,
            fmt("max (grid max - solver objective) %.3e; max KKT residual %.3e; %.0f interior coefficients",
                worst_gap, worst_kkt, interior)};
}

bool contains_key(const nlohmann::json& j, const std::string& key) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) {
            if (k == key || contains_key(v, key)) return true;
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (contains_key(v, key)) return true;
        }
    }
    return false;
}

Outcome release_contract() {
    const auto db = fixed_dataset_40();
    Rng rng(1010);
    const auto fin = train_private_finite(db, 1.0, 0.2, rng);
    const auto rff = train_private_rff(db, KernelSpec::rbf(0.7), 1.0, 0.2, 25, rng);
    const auto dir = std::filesystem::temp_directory_path();
    bool ok = true;
    int idx = 0;
    for (const auto& m : {fin, rff}) {
        const auto path = dir / ("dpsvm_acceptance_" + std::to_string(idx++) + ".json");
        save_model(m, path);
        const auto back = load_model(path);
        std::ifstream in(path);
        const auto doc = nlohmann::json::parse(in);
        ok = ok && !contains_key(doc, "alphas") && !contains_key(doc, "entries") &&
             std::holds_alternative<PrivateModel>(back) && std::get<PrivateModel>(back) == m;
        std::filesystem::remove(path);
    }
    return {ok, "finite and rff files: no alphas/entries keys, load(save(m)) == m"};
}

Outcome privacy() {
    const auto fam = build_lemma17_pair(1.0, 10, 0.04);
    double kappa = 0.0;
    for (const auto& db : fam.databases)
        for (const auto& e : db) kappa = std::max(kappa, std::abs(e.x[0]));
    MechanismParams p;
    p.C = 1.0;
    p.lambda = calibrate_noise_privacy_finite(1.0, 1.0, kappa, 1, 1.0, 10);
    const auto r = privacy_ratio_audit(fam.databases[0], fam.databases[1], p, 1.0, 100000, 40, 0, 1111);
    return {r.pass, fmt("lambda=%.4f max |log ratio| %.4f <= 1 + slack = %.4f (smoke test)", p.lambda, r.statistic,
                        r.bound)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> all = {
        {1, "two-database closed form", 1.0, lemma17},
        {2, "sensitivity bound", 30.0, sensitivity},
        {3, "calibration arithmetic", INFINITY, calibration},
        {4, "random feature identity and approximation", 120.0, rff},
        {5, "utility monte carlo", 120.0, utility},
        {6, "noise distribution", INFINITY, noise},
        {7, "packing family separation", 30.0, lemma19},
        {8, "lower-bound formulas", INFINITY, lower_bounds},
        {9, "solver oracle equivalence", INFINITY, solver_oracle},
        {10, "release contract", INFINITY, release_contract},
        {11, "privacy smoke test", 120.0, privacy},
    };
    int failures = 0;
    for (const auto& c : all) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.limit_seconds;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("%s %2d %s: %s [%.2fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    in_time ? "" : ", over time limit");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failures, all.size());
    return failures == 0 ? 0 : 1;
}
