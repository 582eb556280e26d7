#pragma once

#include <stdexcept>
#include <string>

namespace qfsi {

struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& m) : std::runtime_error(m) {}
};
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& m) : std::runtime_error(m) {}
};
struct CompatibilityError : std::runtime_error {
    explicit CompatibilityError(const std::string& m) : std::runtime_error(m) {}
};
struct CollisionError : std::runtime_error {
    explicit CollisionError(const std::string& m) : std::runtime_error(m) {}
};
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& m) : std::runtime_error(m) {}
};
struct SingularError : std::runtime_error {
    explicit SingularError(const std::string& m) : std::runtime_error(m) {}
};
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& m) : std::runtime_error(m) {}
};
struct FitError : std::runtime_error {
    explicit FitError(const std::string& m) : std::runtime_error(m) {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

} // namespace qfsi
