#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace whitham {

/// Base class for recoverable runtime failures raised by the library.
/// Precondition violations (bad grid sizes, axis out of range) use the
/// standard `std::invalid_argument` instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A symbol, field, or state contained NaN/Inf where finite data is required.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Initial data violates 1 + eps*zeta >= h_min.
class CavitationError : public Error {
public:
    CavitationError(double min_depth, double h_min)
        : Error("non-cavitation violated: min(1 + eps*zeta) = " + std::to_string(min_depth) +
                " < h_min = " + std::to_string(h_min)),
          min_depth(min_depth), h_min(h_min) {}
    double min_depth;
    double h_min;
};

/// A frozen-coefficient trajectory does not cover the requested time window,
/// or two trajectories that must share a time axis do not.
class TimeRangeError : public Error {
public:
    using Error::Error;
};

class MaxIterExceeded : public Error {
public:
    MaxIterExceeded(int iterations, double last_difference)
        : Error("Picard iteration did not converge after " + std::to_string(iterations) +
                " iterations (last Cauchy difference " + std::to_string(last_difference) + ")"),
          iterations(iterations), last_difference(last_difference) {}
    int iterations;
    double last_difference;
};

class ConfigParseError : public Error {
public:
    ConfigParseError(std::size_t line, const std::string& what)
        : Error("config parse error at line " + std::to_string(line) + ": " + what), line(line) {}
    std::size_t line;
};

struct Violation {
    std::string field;
    std::string reason;
    bool operator==(const Violation&) const = default;
};

class ConfigValidationError : public Error {
public:
    explicit ConfigValidationError(std::vector<Violation> violations)
        : Error(format(violations)), violations(std::move(violations)) {}
    std::vector<Violation> violations;

private:
    static std::string format(const std::vector<Violation>& vs) {
        std::string out = "config validation failed:";
        for (const auto& v : vs) out += "\n  " + v.field + ": " + v.reason;
        return out;
    }
};

enum class SnapshotErrorKind { bad_magic, truncated_payload, non_finite, io };

class SnapshotError : public Error {
public:
    SnapshotError(SnapshotErrorKind kind, const std::string& what) : Error(what), kind(kind) {}
    SnapshotErrorKind kind;
};

class StudyError : public Error {
public:
    using Error::Error;
};

}  // namespace whitham
