#include "dpsvm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "dpsvm/audit.hpp"
#include "dpsvm/data.hpp"
#include "dpsvm/error.hpp"
#include "dpsvm/mechanisms.hpp"
#include "dpsvm/model_io.hpp"
#include "dpsvm/random.hpp"

namespace dpsvm::cli {

namespace {

using nlohmann::ordered_json;

// Flag validation failure detected after CLI11 parsing; maps to exit 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string> kKernels = {"linear", "rbf", "laplacian", "cauchy"};

struct DataArgs {
    std::string path;
    bool has_header = false;
};

struct Options {
    DataArgs data;
    std::string data2;
    std::string kernel;  // empty: per-command default
    double sigma = 1.0;
    double C = 1.0;
    double lambda = 0.0;
    std::size_t d_hat = 0;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::optional<double> kappa;
    std::optional<double> phi;
    std::optional<double> eps;
    std::optional<double> delta;
    std::optional<double> beta;
    double tol = 1e-8;
    std::size_t max_sweeps = 1'000'000;

    // calibrate / bounds
    std::string mechanism;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::optional<double> diam;
    double lipschitz = 1.0;
    std::string lower;
    std::string upper;

    // predict
    std::string model_path;
    bool unlabeled = false;

    // audit
    std::string kind;
    std::size_t trials = 0;
    std::size_t grid = 0;
    double half_width = 1.0;
    std::size_t bins = 40;
    std::size_t coordinate = 0;
};

Database read_database(const std::string& path, bool has_header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    return load_csv(in, has_header);
}

std::string rff_kernel_name(const Options& o) { return o.kernel.empty() ? "rbf" : o.kernel; }

void emit(std::ostream& out, const ordered_json& doc) { out << dump_json(doc) << '\n'; }

void require_seed(const Options& o, const std::string& what) {
    if (!o.seed) {
        throw UsageError(what + " is randomized and requires an explicit --seed");
    }
}

template <typename T>
T need(const std::optional<T>& v, const std::string& flag) {
    if (!v) throw UsageError("missing required flag " + flag);
    return *v;
}

double sigma_p_of(const KernelSpec& k, std::size_t dim) {
    return std::sqrt(spectral_second_moment(k, dim));
}

int cmd_train(const Options& o, std::ostream& out) {
    const auto db = read_database(o.data.path, o.data.has_header);
    const auto kernel = KernelSpec::from_name(o.kernel.empty() ? "linear" : o.kernel, o.sigma);
    const auto model = solve_svm_dual(db, kernel, o.C, o.tol, o.max_sweeps);
    save_model(model, o.out_path);
    ordered_json r;
    r["mechanism"] = "svm";
    r["kernel"] = to_json(kernel);
    r["n"] = db.size();
    r["dim"] = db.dim();
    r["objective"] = model.objective;
    r["kkt_residual"] = model.kkt_residual;
    r["support_vectors"] = std::count_if(model.alphas.begin(), model.alphas.end(),
                                         [](double a) { return a > 0.0; });
    r["out"] = o.out_path;
    emit(out, ordered_json{{"trained", r}});
    return kExitOk;
}

ordered_json release_summary(const PrivateModel& m, const std::string& path) {
    ordered_json r;
    r["mechanism"] = m.mechanism == Mechanism::Finite ? "private_finite" : "private_rff";
    r["kernel"] = to_json(m.kernel);
    r["lambda"] = m.lambda;
    r["n"] = m.n;
    r["dim"] = m.dim;
    r["weights"] = m.w_hat.size();
    ordered_json claimed = ordered_json::object();
    if (m.claimed.beta) claimed["beta"] = *m.claimed.beta;
    if (m.claimed.epsilon) claimed["epsilon"] = *m.claimed.epsilon;
    if (m.claimed.delta) claimed["delta"] = *m.claimed.delta;
    r["claimed"] = claimed;
    r["out"] = path;
    return ordered_json{{"released", r}};
}

int cmd_private_finite(const Options& o, std::ostream& out, std::ostream& err) {
    require_seed(o, "private-train-finite");
    if (!(o.lambda > 0.0)) throw UsageError("--lambda must be > 0");
    const auto db = read_database(o.data.path, o.data.has_header);
    Rng rng(*o.seed);
    auto model = train_private_finite(db, o.C, o.lambda, rng);

    const auto box = bounding_box(db);
    const double kappa = o.kappa.value_or(box.max_norm());
    const double phi = o.phi.value_or(box.max_abs_coordinate());
    const auto F = db.dim();
    const auto n = static_cast<double>(db.size());
    auto& claim = model.claimed;
    claim.kappa = kappa;
    claim.phi = phi;
    if (kappa > 0.0) {
        // Largest beta the chosen lambda guarantees.
        claim.beta = 4.0 * claim.lipschitz * o.C * kappa * std::sqrt(static_cast<double>(F)) / (o.lambda * n);
    }
    if (o.delta) {
        claim.delta = *o.delta;
        // Smallest eps whose utility ceiling admits this lambda.
        claim.epsilon = 2.0 * phi * o.lambda *
                        (static_cast<double>(F) * std::log(2.0) + std::log(1.0 / *o.delta));
        if (o.eps && *o.eps < *claim.epsilon) {
            err << "warning: lambda too large for eps=" << *o.eps << "; claiming eps=" << *claim.epsilon
                << " instead\n";
        }
    }
    save_model(model, o.out_path);
    emit(out, release_summary(model, o.out_path));
    return kExitOk;
}

int cmd_private_rff(const Options& o, std::ostream& out, std::ostream& err) {
    require_seed(o, "private-train-rff");
    if (!(o.lambda > 0.0)) throw UsageError("--lambda must be > 0");
    if (o.d_hat == 0) throw UsageError("--d-hat must be >= 1");
    const auto db = read_database(o.data.path, o.data.has_header);
    const auto kernel = KernelSpec::from_name(rff_kernel_name(o), o.sigma);
    Rng rng(*o.seed);
    auto model = train_private_rff(db, kernel, o.C, o.lambda, o.d_hat, rng);
    auto& claim = model.claimed;
    claim.beta = calibrate_noise_privacy_rff(claim.lipschitz, o.C, o.d_hat, 1.0, db.size()) / o.lambda;
    if (o.eps && o.delta) {
        // The usefulness claim holds only if both d_hat and lambda meet the hinge calibration.
        const double sigma_p = sigma_p_of(kernel, db.dim());
        const double diam = o.diam.value_or(bounding_box(db).diameter());
        bool ok = std::isfinite(sigma_p) && diam > 0.0;
        if (ok) {
            ok = o.d_hat >= calibrate_rff_dim_hinge(*o.eps, *o.delta, o.C, db.dim(), sigma_p, diam) &&
                 o.lambda <= calibrate_noise_utility_rff(*o.eps, *o.delta, o.d_hat);
        }
        if (ok) {
            claim.epsilon = *o.eps;
            claim.delta = *o.delta;
        } else {
            err << "warning: (eps, delta) usefulness not guaranteed by d_hat and lambda; not claimed\n";
        }
    }
    save_model(model, o.out_path);
    emit(out, release_summary(model, o.out_path));
    return kExitOk;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
    const double beta = need(o.beta, "--beta");
    const double eps = need(o.eps, "--eps");
    const double delta = need(o.delta, "--delta");
    if (o.n == 0) throw UsageError("missing required flag --n");
    if (o.dim == 0) throw UsageError("missing required flag --dim");
    CalibrationReport report;
    if (o.mechanism == "finite") {
        report = calibrate_finite(o.lipschitz, o.C, need(o.kappa, "--kappa"), o.dim, beta, o.n, eps,
                                  delta, need(o.phi, "--phi"));
    } else {
        std::size_t d_hat = o.d_hat;
        if (d_hat == 0) {
            const auto kernel = KernelSpec::from_name(rff_kernel_name(o), o.sigma);
            d_hat = calibrate_rff_dim_hinge(eps, delta, o.C, o.dim, sigma_p_of(kernel, o.dim),
                                            need(o.diam, "--diam"));
        }
        report = calibrate_rff(o.lipschitz, o.C, d_hat, beta, o.n, eps, delta);
    }
    emit(out, to_json(report));
    return kExitOk;
}

int cmd_bounds(const Options& o, std::ostream& out) {
    ordered_json r;
    if (!o.lower.empty() == !o.upper.empty()) throw UsageError("give exactly one of --lower or --upper");
    const double delta = need(o.delta, "--delta");
    if (o.lower == "linear") {
        r["kind"] = "lower_linear";
        r["delta"] = delta;
        r["bound"] = optimal_dp_lower_bound_linear(delta);
    } else if (o.lower == "rbf") {
        const auto lb = optimal_dp_lower_bound_rbf(delta, o.sigma);
        r["kind"] = "lower_rbf";
        r["delta"] = delta;
        r["sigma"] = o.sigma;
        r["N"] = lb.N;
        r["bound"] = lb.bound;
    } else {
        if (o.n == 0 || o.dim == 0) throw UsageError("--upper needs --n and --dim");
        const auto kernel = KernelSpec::from_name(rff_kernel_name(o), o.sigma);
        const auto report = optimal_dp_upper_bound_hinge(need(o.eps, "--eps"), delta, o.C, o.n, o.dim,
                                                         sigma_p_of(kernel, o.dim), need(o.diam, "--diam"));
        r["kind"] = "upper_hinge";
        r["kernel"] = to_json(kernel);
        r["d_hat"] = *report.d_hat;
        r["lambda"] = report.lambda_max_utility;
        r["bound"] = report.beta_achievable;
    }
    emit(out, ordered_json{{"bounds", r}});
    return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
    const auto model = load_model(o.model_path);
    std::ifstream in(o.data.path, std::ios::binary);
    if (!in) throw Error("cannot open '" + o.data.path + "'");
    const auto points = load_csv_points(in, o.data.has_header, !o.unlabeled);
    const auto dim = model_dim(model);
    char buf[40];
    for (const auto& x : points) {
        if (x.size() != dim) {
            throw DimensionError("data has dimension " + std::to_string(x.size()) + ", model expects " +
                                 std::to_string(dim));
        }
        const double v = model_decision(model, x);
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << ' ' << (v < 0.0 ? "-1" : "+1") << '\n';
    }
    return kExitOk;
}

MechanismParams mechanism_params(const Options& o) {
    MechanismParams p;
    p.mechanism = o.mechanism == "rff" ? Mechanism::Rff : Mechanism::Finite;
    p.kernel = p.mechanism == Mechanism::Rff ? KernelSpec::from_name(rff_kernel_name(o), o.sigma)
                                            : KernelSpec::linear();
    p.C = o.C;
    p.lambda = o.lambda;
    p.d_hat = o.d_hat;
    return p;
}

int cmd_audit(const Options& o, std::ostream& out) {
    AuditReport report;
    const auto trials_or = [&](std::size_t fallback) { return o.trials ? o.trials : fallback; };
    if (o.kind == "lemma17") {
        report = lemma17_audit(o.C, o.n ? o.n : 10, need(o.eps, "--eps"));
    } else if (o.kind == "lemma19") {
        report = lemma19_separation_audit(o.C, o.n ? o.n : 8, o.sigma);
    } else if (o.kind == "sensitivity") {
        require_seed(o, "audit --kind sensitivity");
        const std::size_t dim = o.dim ? o.dim : 2;
        report = sensitivity_audit({o.n ? o.n : 20, dim}, trials_or(500), o.C,
                                   DomainBox::cube(dim, o.half_width), *o.seed);
    } else if (o.kind == "kernel-approx") {
        require_seed(o, "audit --kind kernel-approx");
        const std::size_t dim = o.dim ? o.dim : 1;
        const auto kernel = KernelSpec::from_name(rff_kernel_name(o), o.sigma);
        const auto box = DomainBox::cube(dim, o.half_width);
        const double eps = need(o.eps, "--eps");
        std::size_t d_hat = o.d_hat;
        if (d_hat == 0) {
            d_hat = calibrate_rff_dim(eps, need(o.delta, "--delta"), dim, sigma_p_of(kernel, dim),
                                      box.diameter());
        }
        report = kernel_approx_audit(kernel, d_hat, box, eps, trials_or(200),
                                     o.grid ? o.grid : (dim <= 2 ? 51 : 11), *o.seed);
    } else if (o.kind == "utility") {
        require_seed(o, "audit --kind utility");
        const auto db = read_database(o.data.path, o.data.has_header);
        auto params = mechanism_params(o);
        const double eps = need(o.eps, "--eps");
        const double delta = need(o.delta, "--delta");
        if (params.lambda <= 0.0) {
            if (params.mechanism == Mechanism::Rff) throw UsageError("--lambda is required for rff");
            params.lambda = calibrate_noise_utility_finite(eps, delta, bounding_box(db).max_abs_coordinate(),
                                                           db.dim());
        }
        report = utility_audit(db, params, eps, delta, trials_or(500),
                               o.grid ? o.grid : (db.dim() <= 2 ? 51 : 11), *o.seed);
    } else if (o.kind == "privacy") {
        require_seed(o, "audit --kind privacy");
        const double beta = need(o.beta, "--beta");
        std::vector<Database> pair;
        if (!o.data.path.empty()) {
            if (o.data2.empty()) throw UsageError("--data needs --data2 for the neighboring database");
            pair.push_back(read_database(o.data.path, o.data.has_header));
            pair.push_back(read_database(o.data2, o.data.has_header));
        } else {
            pair = build_lemma17_pair(o.C, o.n ? o.n : 10, need(o.eps, "--eps")).databases;
        }
        auto params = mechanism_params(o);
        if (params.lambda <= 0.0) {
            if (params.mechanism == Mechanism::Rff) {
                params.lambda = calibrate_noise_privacy_rff(o.lipschitz, o.C, params.d_hat, beta, pair[0].size());
            } else {
                const double kappa = std::max(bounding_box(pair[0]).max_norm(), bounding_box(pair[1]).max_norm());
                params.lambda = calibrate_noise_privacy_finite(o.lipschitz, o.C, kappa, pair[0].dim(), beta,
                                                               pair[0].size());
            }
        }
        report = privacy_ratio_audit(pair[0], pair[1], params, beta, trials_or(100000), o.bins,
                                     o.coordinate, *o.seed);
    }
    emit(out, to_json(report));
    return kExitOk;
}

void add_data(CLI::App* cmd, Options& o, bool required = true) {
    auto* opt = cmd->add_option("--data", o.data.path, "CSV file: features then label per row");
    if (required) opt->required();
    cmd->add_flag("--has-header", o.data.has_header, "Skip the first CSV row");
}

void add_kernel(CLI::App* cmd, Options& o) {
    cmd->add_option("--kernel", o.kernel, "Kernel family")->check(CLI::IsMember(kKernels));
    cmd->add_option("--sigma", o.sigma, "RBF bandwidth")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Differentially private SVM training, calibration and audits", "dpsvm"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "Train a non-private hinge-loss SVM");
    add_data(train, o);
    add_kernel(train, o);
    train->add_option("--c", o.C, "Regularization C")->required()->check(CLI::PositiveNumber);
    train->add_option("--tol", o.tol, "KKT tolerance")->check(CLI::PositiveNumber);
    train->add_option("--max-sweeps", o.max_sweeps, "Solver sweep limit")->check(CLI::PositiveNumber);
    train->add_option("--out", o.out_path, "Model file to write")->required();

    auto* pfin = app.add_subcommand("private-train-finite", "Release a noisy linear SVM");
    add_data(pfin, o);
    pfin->add_option("--c", o.C)->required()->check(CLI::PositiveNumber);
    pfin->add_option("--lambda", o.lambda, "Laplace noise scale")->required()->check(CLI::PositiveNumber);
    pfin->add_option("--seed", o.seed, "Noise seed (never reuse across releases)");
    pfin->add_option("--kappa", o.kappa, "Bound on ||x||_2 (default: data bounding box)");
    pfin->add_option("--phi", o.phi, "Bound on |x_i| (default: data bounding box)");
    pfin->add_option("--eps", o.eps);
    pfin->add_option("--delta", o.delta)->check(CLI::Range(0.0, 1.0));
    pfin->add_option("--out", o.out_path)->required();

    auto* prff = app.add_subcommand("private-train-rff", "Release a noisy random-feature SVM");
    add_data(prff, o);
    add_kernel(prff, o);
    prff->add_option("--c", o.C)->required()->check(CLI::PositiveNumber);
    prff->add_option("--lambda", o.lambda)->required()->check(CLI::PositiveNumber);
    prff->add_option("--d-hat", o.d_hat, "Number of spectral draws")->required()->check(CLI::PositiveNumber);
    prff->add_option("--seed", o.seed);
    prff->add_option("--eps", o.eps);
    prff->add_option("--delta", o.delta)->check(CLI::Range(0.0, 1.0));
    prff->add_option("--diam", o.diam, "Diameter of the domain (default: data bounding box)");
    prff->add_option("--out", o.out_path)->required();

    auto* cal = app.add_subcommand("calibrate", "Noise scale window for privacy and utility");
    cal->add_option("--mechanism", o.mechanism)->required()->check(CLI::IsMember({"finite", "rff"}));
    cal->add_option("--beta", o.beta)->check(CLI::PositiveNumber);
    cal->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    cal->add_option("--delta", o.delta)->check(CLI::Range(0.0, 1.0));
    cal->add_option("--c", o.C)->check(CLI::PositiveNumber);
    cal->add_option("--n", o.n)->check(CLI::Range(2, std::numeric_limits<int>::max()));
    cal->add_option("--dim", o.dim)->check(CLI::PositiveNumber);
    add_kernel(cal, o);
    cal->add_option("--diam", o.diam)->check(CLI::PositiveNumber);
    cal->add_option("--d-hat", o.d_hat)->check(CLI::PositiveNumber);
    cal->add_option("--kappa", o.kappa)->check(CLI::PositiveNumber);
    cal->add_option("--phi", o.phi)->check(CLI::PositiveNumber);
    cal->add_option("--lipschitz", o.lipschitz)->check(CLI::PositiveNumber);

    auto* bnd = app.add_subcommand("bounds", "Bounds on optimal differential privacy");
    bnd->add_option("--lower", o.lower)->check(CLI::IsMember({"linear", "rbf"}));
    bnd->add_option("--upper", o.upper)->check(CLI::IsMember({"hinge"}));
    bnd->add_option("--delta", o.delta)->check(CLI::Range(0.0, 1.0));
    bnd->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    add_kernel(bnd, o);
    bnd->add_option("--c", o.C)->check(CLI::PositiveNumber);
    bnd->add_option("--n", o.n);
    bnd->add_option("--dim", o.dim);
    bnd->add_option("--diam", o.diam)->check(CLI::PositiveNumber);

    auto* aud = app.add_subcommand("audit", "Run an empirical audit");
    aud->add_option("--kind", o.kind)
        ->required()
        ->check(CLI::IsMember({"sensitivity", "utility", "kernel-approx", "privacy", "lemma17", "lemma19"}));
    aud->add_option("--seed", o.seed);
    aud->add_option("--trials", o.trials)->check(CLI::PositiveNumber);
    add_data(aud, o, false);
    aud->add_option("--data2", o.data2, "Neighboring database for --kind privacy");
    aud->add_option("--mechanism", o.mechanism)->check(CLI::IsMember({"finite", "rff"}));
    add_kernel(aud, o);
    aud->add_option("--c", o.C)->check(CLI::PositiveNumber);
    aud->add_option("--n", o.n);
    aud->add_option("--dim", o.dim);
    aud->add_option("--lambda", o.lambda)->check(CLI::PositiveNumber);
    aud->add_option("--d-hat", o.d_hat);
    aud->add_option("--eps", o.eps)->check(CLI::PositiveNumber);
    aud->add_option("--delta", o.delta)->check(CLI::Range(0.0, 1.0));
    aud->add_option("--beta", o.beta)->check(CLI::PositiveNumber);
    aud->add_option("--grid", o.grid, "Grid points per axis");
    aud->add_option("--half-width", o.half_width, "Box [-h, h]^dim")->check(CLI::PositiveNumber);
    aud->add_option("--bins", o.bins)->check(CLI::PositiveNumber);
    aud->add_option("--coordinate", o.coordinate);
    aud->add_option("--lipschitz", o.lipschitz)->check(CLI::PositiveNumber);

    auto* pred = app.add_subcommand("predict", "Decision values and signs for CSV rows");
    pred->add_option("--model", o.model_path)->required();
    add_data(pred, o);
    pred->add_flag("--unlabeled", o.unlabeled, "Rows hold features only");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (train->parsed()) return cmd_train(o, out);
        if (pfin->parsed()) return cmd_private_finite(o, out, err);
        if (prff->parsed()) return cmd_private_rff(o, out, err);
        if (cal->parsed()) return cmd_calibrate(o, out);
        if (bnd->parsed()) return cmd_bounds(o, out);
        if (aud->parsed()) return cmd_audit(o, out);
        if (pred->parsed()) return cmd_predict(o, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace dpsvm::cli
