#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpsvm/data.hpp"
#include "dpsvm/kernels.hpp"
#include "dpsvm/mechanisms.hpp"

namespace dpsvm {

/// Outcome of one audit. `pass` compares statistic with bound in the audit's
/// direction (at most for rates and sensitivities, at least for separations).
struct AuditReport {
    enum class Direction { AtMost, AtLeast };

    std::string name;
    std::size_t trials = 0;
    double statistic = 0.0;
    double bound = 0.0;
    Direction direction = Direction::AtMost;
    bool pass = false;
    std::uint64_t seed = 0;
    std::map<std::string, double> details;
    std::vector<std::string> notes;
};

/// Neighboring databases with provably separated SVM solutions.
struct LowerBoundFamily {
    std::string construction;  // "lemma17" or "lemma19"
    std::vector<Database> databases;
    double expected_separation = 0.0;
    std::map<std::string, double> parameters;
    /// Closed-form primal weights of each database (1-D linear construction only).
    std::vector<double> expected_weights;
};

/// Two 1-D databases on n entries: floor(n/2) points at -M labeled -1, the
/// next n-1-floor(n/2) at +M labeled +1, and entry n at M - m labeled -1 (first)
/// or +1 (second), with M = 2 n eps / C and m = n eps / C. Requires
/// 0 < eps < sqrt(C)/(2n). Linear hinge SVM weights are C(M(n-2)+m)/n and
/// C(Mn-m)/n, which differ by exactly 2 eps.
[[nodiscard]] LowerBoundFamily build_lemma17_pair(double C, std::size_t n, double eps);

/// N = floor((2/sigma) sqrt(2/ln2)) 2-D databases on n entries: n-1 copies of
/// the origin labeled -1 and entry n at (cos t_i, sin t_i), t_i = 2 pi i / N,
/// labeled +1. Requires n > C and 0 < sigma < sqrt(1/(2 ln 2)).
[[nodiscard]] LowerBoundFamily build_lemma19_family(double C, std::size_t n, double sigma);

using DecisionFn = std::function<double(std::span<const double>)>;

/// Regular grid with `resolution` points per axis over `box` (corners included).
[[nodiscard]] std::vector<std::vector<double>> box_grid(const DomainBox& box, std::size_t resolution);

/// max over the grid of |f(x) - g(x)|, estimating the sup-norm over the box.
[[nodiscard]] double sup_norm_distance(const DecisionFn& f, const DecisionFn& g,
                                       const DomainBox& box, std::size_t grid_resolution);

struct SensitivityConfig {
    std::size_t n = 20;
    std::size_t dim = 2;
};

/// L1 distance between exact linear-map weights on `db` and on `db` with its
/// last entry replaced.
[[nodiscard]] double weight_sensitivity(const Database& db, const Example& replacement, double C);

/// Random neighboring pairs inside `box` (uniform points and labels, a random
/// differing position): max ||w_D - w_D'||_1 against 4 C kappa sqrt(F) / n
/// with kappa = max ||x||_2 over the box.
[[nodiscard]] AuditReport sensitivity_audit(const SensitivityConfig& config, std::size_t trials,
                                            double C, const DomainBox& box, std::uint64_t seed);

/// The two-database linear construction: statistic |w_1 - w_2| of the solver,
/// pass if it matches 2 eps and both closed-form weights within `tol`.
[[nodiscard]] AuditReport lemma17_audit(double C, std::size_t n, double eps, double tol = 1e-6);

struct MechanismParams {
    Mechanism mechanism = Mechanism::Finite;
    KernelSpec kernel = KernelSpec::linear();
    double C = 1.0;
    double lambda = 1.0;
    std::size_t d_hat = 0;  // random features only
};

/// Fraction of trials whose private decision function is more than `eps`
/// away (sup-norm over grid and training points) from the non-private SVM on
/// the same kernel. Finite: exact linear SVM. Random features: exact kernel
/// SVM with the source kernel. Pass if the fraction is at most delta. Also
/// checks per trial that the mean hinge loss moves by no more than the
/// measured sup distance.
[[nodiscard]] AuditReport utility_audit(const Database& db, const MechanismParams& params,
                                        double eps, double delta, std::size_t trials,
                                        std::size_t grid_resolution, std::uint64_t seed,
                                        std::optional<DomainBox> box = std::nullopt);

/// Fraction of independent maps with grid sup |k_hat - k| >= eps over the box,
/// against the failure probability guaranteed at this d_hat (capped at 1).
[[nodiscard]] AuditReport kernel_approx_audit(const KernelSpec& k, std::size_t d_hat,
                                              const DomainBox& box, double eps, std::size_t trials,
                                              std::size_t grid_resolution, std::uint64_t seed);

/// Smoke test of the density-ratio condition on one output coordinate.
/// Histograms the coordinate over `trials` releases on each database with
/// shared bin edges; the statistic is the largest |ln(p1/p2)| over bins holding
/// at least 20 samples from both. Pass if it is at most beta + slack with
/// slack = 3 sqrt(2 / min_count), failing when no bin qualifies. This cannot
/// certify privacy.
[[nodiscard]] AuditReport privacy_ratio_audit(const Database& d1, const Database& d2,
                                              const MechanismParams& params, double beta,
                                              std::size_t trials, std::size_t bins,
                                              std::size_t coordinate, std::uint64_t seed);

/// Trains the exact RBF SVM on every database of the packing family. Statistic
/// is min over i != j of |f_i(x_{i,n}) - f_j(x_{i,n})|; pass if at least C/(2n) - 1e-6.
[[nodiscard]] AuditReport lemma19_separation_audit(double C, std::size_t n, double sigma);

/// true iff same size and dimension and the first n - 1 entries agree.
[[nodiscard]] bool are_neighbors(const Database& a, const Database& b);

}  // namespace dpsvm
