#pragma once

#include <stdexcept>
#include <string>

namespace egrowth {

enum class ErrorCode {
    invalid_argument,
    out_of_bounds,       // geometry does not fit the grid / hits the grid edge
    spec_mismatch,       // fields or profiles built on different grids/boundaries
    singularity_too_close,
    non_convergence,
    cfl_violation,
    series_divergence,
    mass_conservation,
    hypothesis_violated, // e.g. decreasing permeability for the radial rate law
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code so
/// front ends can map it onto exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::out_of_bounds: return "out-of-bounds";
    case ErrorCode::spec_mismatch: return "spec-mismatch";
    case ErrorCode::singularity_too_close: return "singularity-too-close-to-boundary";
    case ErrorCode::non_convergence: return "non-convergence";
    case ErrorCode::cfl_violation: return "cfl-violation";
    case ErrorCode::series_divergence: return "series-divergence";
    case ErrorCode::mass_conservation: return "mass-conservation-failure";
    case ErrorCode::hypothesis_violated: return "hypothesis-violated";
    }
    return "unknown";
}

}  // namespace egrowth
