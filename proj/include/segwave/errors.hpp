#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace segwave {

/// Base of every error thrown by the library. `code()` is a stable,
/// machine-readable identifier used by the CLI's JSON error report.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class IndexError : public Error {
public:
    explicit IndexError(const std::string& what) : Error("index_error", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& what) : Error("geometry_error", what) {}
};

class ExtentError : public Error {
public:
    explicit ExtentError(const std::string& what) : Error("extent_error", what) {}
};

class GenerationError : public Error {
public:
    explicit GenerationError(const std::string& what) : Error("generation_error", what) {}
};

class MeasurementError : public Error {
public:
    explicit MeasurementError(const std::string& what) : Error("measurement_error", what) {}
};

class InapplicableMetricError : public Error {
public:
    explicit InapplicableMetricError(const std::string& what)
        : Error("inapplicable_metric", what) {}
};

class UndefinedRatioError : public Error {
public:
    explicit UndefinedRatioError(const std::string& what) : Error("undefined_ratio", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io_error", what) {}
};

/// Raised when a body speed exceeds the configured cap. Carries the step at
/// which it happened and a short text snapshot of the offending state.
class DivergenceError : public Error {
public:
    DivergenceError(std::uint64_t step, std::string snapshot)
        : Error("divergence",
                "simulation diverged at step " + std::to_string(step) + ": " + snapshot),
          step_(step),
          snapshot_(std::move(snapshot)) {}

    std::uint64_t step() const noexcept { return step_; }
    const std::string& snapshot() const noexcept { return snapshot_; }

private:
    std::uint64_t step_;
    std::string snapshot_;
};

}  // namespace segwave
