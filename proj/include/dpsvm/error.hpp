#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpsvm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed CSV row. `row()` is the zero-based data row index.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class LabelError : public Error {
public:
    using Error::Error;
};

class SizeError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A numeric argument is outside the domain of the operation.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Operation requires a translation-invariant kernel.
class UnsupportedKernelError : public Error {
public:
    using Error::Error;
};

/// Closed-form calibration cannot be evaluated (e.g. infinite spectral moment).
class CalibrationUnsupportedError : public Error {
public:
    using Error::Error;
};

/// The dual solver ran out of sweeps. Carries the best iterate reached.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> best_alphas, double residual)
        : Error(what), best_alphas_(std::move(best_alphas)), residual_(residual) {}
    [[nodiscard]] const std::vector<double>& best_alphas() const noexcept { return best_alphas_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    std::vector<double> best_alphas_;
    double residual_;
};

/// Model or report document is malformed.
class FormatError : public Error {
public:
    using Error::Error;
};

class VersionError : public FormatError {
public:
    using FormatError::FormatError;
};

}  // namespace dpsvm
