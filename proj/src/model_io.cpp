#include "dpsvm/model_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dpsvm/error.hpp"

namespace dpsvm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void write_string(std::ostream& out, const std::string& s) {
    // nlohmann handles escaping of a bare string value.
    out << json(s).dump();
}

void write_value(std::ostream& out, const ordered_json& v, int indent, int depth) {
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (v.type()) {
        case json::value_t::object: {
            if (v.empty()) {
                out << "{}";
                return;
            }
            out << '{';
            bool first = true;
            for (const auto& [key, item] : v.items()) {
                if (!first) out << ',';
                first = false;
                newline(depth + 1);
                write_string(out, key);
                out << (indent < 0 ? ":" : ": ");
                write_value(out, item, indent, depth + 1);
            }
            newline(depth);
            out << '}';
            return;
        }
        case json::value_t::array: {
            if (v.empty()) {
                out << "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            const bool flat = std::none_of(v.begin(), v.end(), [](const ordered_json& e) {
                return e.is_structured();
            });
            out << '[';
            bool first = true;
            for (const auto& item : v) {
                if (!first) out << (flat && indent >= 0 ? ", " : ",");
                first = false;
                if (!flat) newline(depth + 1);
                write_value(out, item, indent, depth + 1);
            }
            if (!flat) newline(depth);
            out << ']';
            return;
        }
        case json::value_t::number_float: {
            const double d = v.get<double>();
            if (!std::isfinite(d)) throw FormatError("cannot serialize a non-finite real");
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            std::string s(buf);
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            out << s;
            return;
        }
        default:
            out << v.dump();
            return;
    }
}

const json& require(const json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) {
        throw FormatError(std::string("model document lacks field '") + key + "'");
    }
    return doc.at(key);
}

double real_at(const json& doc, const char* key) {
    const auto& v = require(doc, key);
    if (!v.is_number()) throw FormatError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::vector<double> reals_at(const json& doc, const char* key) {
    const auto& v = require(doc, key);
    if (!v.is_array()) throw FormatError(std::string("field '") + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) throw FormatError(std::string("field '") + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

ordered_json claim_to_json(const Claim& c) {
    ordered_json j = ordered_json::object();
    if (c.beta) j["beta"] = *c.beta;
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    if (c.delta) j["delta"] = *c.delta;
    j["L"] = c.lipschitz;
    if (c.kappa) j["kappa"] = *c.kappa;
    if (c.phi) j["Phi"] = *c.phi;
    j["features"] = c.features;
    j["n"] = c.n;
    return j;
}

Claim claim_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("'claimed' must be an object");
    Claim c;
    if (j.contains("beta")) c.beta = j.at("beta").get<double>();
    if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
    if (j.contains("delta")) c.delta = j.at("delta").get<double>();
    if (j.contains("L")) c.lipschitz = j.at("L").get<double>();
    if (j.contains("kappa")) c.kappa = j.at("kappa").get<double>();
    if (j.contains("Phi")) c.phi = j.at("Phi").get<double>();
    if (j.contains("features")) c.features = j.at("features").get<std::size_t>();
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    return c;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text << '\n';
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string dump_json(const ordered_json& doc, int indent) {
    std::ostringstream out;
    write_value(out, doc, indent, 0);
    return out.str();
}

ordered_json to_json(const KernelSpec& k) {
    ordered_json j;
    j["family"] = k.name();
    if (k.family() == KernelFamily::Rbf) j["sigma"] = k.sigma();
    return j;
}

KernelSpec kernel_from_json(const json& j) {
    const auto& family = require(j, "family");
    if (!family.is_string()) throw FormatError("kernel family must be a string");
    const auto name = family.get<std::string>();
    try {
        if (name == "rbf") return KernelSpec::rbf(real_at(j, "sigma"));
        return KernelSpec::from_name(name);
    } catch (const ParameterError& e) {
        throw FormatError(std::string("bad kernel: ") + e.what());
    }
}

ordered_json to_json(const SvmModel& model) {
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["mechanism"] = "svm";
    j["kernel"] = to_json(model.kernel);
    j["C"] = model.C;
    j["n"] = model.support.size();
    j["dim"] = model.support.dim();
    j["objective"] = model.objective;
    j["kkt_residual"] = model.kkt_residual;
    j["alphas"] = model.alphas;
    ordered_json entries = ordered_json::array();
    for (const auto& e : model.support) {
        ordered_json row;
        row["x"] = e.x;
        row["y"] = e.y;
        entries.push_back(std::move(row));
    }
    j["entries"] = std::move(entries);
    return j;
}

ordered_json to_json(const PrivateModel& model) {
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["mechanism"] = model.mechanism == Mechanism::Finite ? "private_finite" : "private_rff";
    j["kernel"] = to_json(model.kernel);
    j["C"] = model.C;
    j["lambda"] = model.lambda;
    if (model.mechanism == Mechanism::Rff) {
        const auto& map = *model.feature_map;
        j["d_hat"] = map.d_hat();
        j["seed"] = map.seed();
        ordered_json rows = ordered_json::array();
        for (std::size_t i = 0; i < map.d_hat(); ++i) {
            const auto w = map.omega(i);
            rows.push_back(std::vector<double>(w.begin(), w.end()));
        }
        j["omegas"] = std::move(rows);
    }
    j["weights"] = model.w_hat;
    j["claimed"] = claim_to_json(model.claimed);
    j["n"] = model.n;
    j["dim"] = model.dim;
    if (j.contains("alphas") || j.contains("entries")) {
        throw std::logic_error("released model must not carry dual coefficients or training entries");
    }
    return j;
}

ordered_json to_json(const AuditReport& report) {
    ordered_json a;
    a["name"] = report.name;
    a["trials"] = report.trials;
    a["statistic"] = report.statistic;
    a["bound"] = report.bound;
    a["direction"] = report.direction == AuditReport::Direction::AtMost ? "at_most" : "at_least";
    a["pass"] = report.pass;
    a["seed"] = report.seed;
    ordered_json details = ordered_json::object();
    for (const auto& [k, v] : report.details) details[k] = v;
    a["details"] = std::move(details);
    if (!report.notes.empty()) a["notes"] = report.notes;
    ordered_json j;
    j["audit"] = std::move(a);
    return j;
}

ordered_json to_json(const CalibrationReport& report) {
    ordered_json c;
    c["lambda_min_privacy"] = report.lambda_min_privacy;
    c["lambda_max_utility"] = report.lambda_max_utility;
    if (report.d_hat) c["d_hat"] = *report.d_hat;
    c["feasible"] = report.feasible;
    c["beta_achievable"] = report.beta_achievable;
    ordered_json j;
    j["calibration"] = std::move(c);
    return j;
}

AnyModel model_from_json(const json& doc) {
    const auto& version = require(doc, "format_version");
    if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
        throw VersionError("unsupported format_version " + version.dump() + ", expected " +
                           std::to_string(kFormatVersion));
    }
    const auto& mech = require(doc, "mechanism");
    if (!mech.is_string()) throw FormatError("mechanism must be a string");
    const auto mechanism = mech.get<std::string>();
    const KernelSpec kernel = kernel_from_json(require(doc, "kernel"));
    const double C = real_at(doc, "C");

    try {
        if (mechanism == "svm") {
            std::vector<Example> entries;
            for (const auto& row : require(doc, "entries")) {
                entries.push_back(Example{reals_at(row, "x"), require(row, "y").get<int>()});
            }
            return SvmModel{reals_at(doc, "alphas"), Database(std::move(entries)), kernel, C,
                            real_at(doc, "objective"), real_at(doc, "kkt_residual")};
        }
        if (mechanism != "private_finite" && mechanism != "private_rff") {
            throw FormatError("unknown mechanism '" + mechanism + "'");
        }
        PrivateModel m;
        m.kernel = kernel;
        m.C = C;
        m.lambda = real_at(doc, "lambda");
        m.w_hat = reals_at(doc, "weights");
        m.claimed = claim_from_json(require(doc, "claimed"));
        m.n = require(doc, "n").get<std::size_t>();
        m.dim = require(doc, "dim").get<std::size_t>();
        if (mechanism == "private_finite") {
            m.mechanism = Mechanism::Finite;
            if (m.w_hat.size() != m.dim) throw FormatError("weights length must equal dim");
        } else {
            m.mechanism = Mechanism::Rff;
            const auto d_hat = require(doc, "d_hat").get<std::size_t>();
            const auto seed = require(doc, "seed").get<std::uint64_t>();
            std::vector<double> flat;
            const auto& rows = require(doc, "omegas");
            if (!rows.is_array() || rows.size() != d_hat) throw FormatError("omegas must have d_hat rows");
            for (const auto& row : rows) {
                if (!row.is_array() || row.size() != m.dim) throw FormatError("omega rows must have length dim");
                for (const auto& v : row) flat.push_back(v.get<double>());
            }
            m.feature_map = RandomFeatureMap(kernel, m.dim, std::move(flat), seed);
            if (m.w_hat.size() != 2 * d_hat) throw FormatError("weights length must equal 2 * d_hat");
        }
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed model document: ") + e.what());
    }
}

AnyModel parse_model(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(doc);
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
    write_file(path, dump_json(to_json(model)));
}

void save_model(const PrivateModel& model, const std::filesystem::path& path) {
    write_file(path, dump_json(to_json(model)));
}

AnyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_model(text.str());
}

double model_decision(const AnyModel& model, std::span<const double> x) {
    return std::visit(
        [&](const auto& m) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, SvmModel>) {
                return dual_decision(m, x);
            } else {
                return m.decision(x);
            }
        },
        model);
}

std::size_t model_dim(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, SvmModel>) {
                return m.support.dim();
            } else {
                return m.dim;
            }
        },
        model);
}

}  // namespace dpsvm
