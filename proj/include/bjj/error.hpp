#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace bjj {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: unknown keys, unknown units, forbidden values.
/// The CLI maps this family to exit code 1.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class GridError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class UnsupportedError : public Error { using Error::Error; };
class ModeError : public Error { using Error::Error; };
class CollapseError : public Error { using Error::Error; };
class PastCriticalError : public Error { using Error::Error; };
class PoleError : public Error { using Error::Error; };
class NoOscillationError : public Error { using Error::Error; };
class PreparationError : public Error { using Error::Error; };
class SpecError : public Error { using Error::Error; };

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what + " (last residual " + std::to_string(last_residual) + ")"),
          residual_(last_residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class FitError : public Error {
public:
    FitError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, std::size_t step)
        : Error(what + " at step " + std::to_string(step)), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace bjj
