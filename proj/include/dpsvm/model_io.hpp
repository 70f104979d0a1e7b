#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "dpsvm/audit.hpp"
#include "dpsvm/mechanisms.hpp"
#include "dpsvm/solver.hpp"

#include "json.hpp"

namespace dpsvm {

inline constexpr int kFormatVersion = 1;

using AnyModel = std::variant<SvmModel, PrivateModel>;

/// Serializes JSON with every floating-point value printed as %.17g, which
/// strtod maps back to the identical double.
[[nodiscard]] std::string dump_json(const nlohmann::ordered_json& doc, int indent = 2);

[[nodiscard]] nlohmann::ordered_json to_json(const KernelSpec& k);
[[nodiscard]] KernelSpec kernel_from_json(const nlohmann::json& j);

/// Document for a non-private model, mechanism "svm". Carries alphas and the
/// training entries, which a kernel expansion needs for prediction.
[[nodiscard]] nlohmann::ordered_json to_json(const SvmModel& model);

/// Document for a released model, mechanism "private_finite" or
/// "private_rff". Throws std::logic_error if the document would contain an
/// "alphas" or "entries" key.
[[nodiscard]] nlohmann::ordered_json to_json(const PrivateModel& model);

/// {"audit": {...}}.
[[nodiscard]] nlohmann::ordered_json to_json(const AuditReport& report);

/// {"calibration": {...}}.
[[nodiscard]] nlohmann::ordered_json to_json(const CalibrationReport& report);

[[nodiscard]] AnyModel model_from_json(const nlohmann::json& doc);
[[nodiscard]] AnyModel parse_model(const std::string& text);

void save_model(const SvmModel& model, const std::filesystem::path& path);
void save_model(const PrivateModel& model, const std::filesystem::path& path);
[[nodiscard]] AnyModel load_model(const std::filesystem::path& path);

/// Decision value of either model kind.
[[nodiscard]] double model_decision(const AnyModel& model, std::span<const double> x);
[[nodiscard]] std::size_t model_dim(const AnyModel& model);

}  // namespace dpsvm
