#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace volterra {

enum class ErrorKind {
    InvalidGrid,
    NotAnchoredAtAlpha,
    GridMismatch,
    DimMismatch,
    OutsideTriangle,
    KernelContract,
    MissingBounds,
    SingularBlock,
    InvalidArgument,
    SolverFailure,
    ConfigError,
    IoError,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidGrid: return "InvalidGrid";
        case ErrorKind::NotAnchoredAtAlpha: return "NotAnchoredAtAlpha";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::DimMismatch: return "DimMismatch";
        case ErrorKind::OutsideTriangle: return "OutsideTriangle";
        case ErrorKind::KernelContract: return "KernelContract";
        case ErrorKind::MissingBounds: return "MissingBounds";
        case ErrorKind::SingularBlock: return "SingularBlock";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::SolverFailure: return "SolverFailure";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Single exception type for the library; `kind()` says which contract broke.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Outcome of an iterative solve. Iterative routines report these instead of throwing
/// so the caller keeps the last iterate and its history.
enum class SolveStatus {
    Converged,
    MaxIterExceeded,
    LineSearchStalled,
};

[[nodiscard]] constexpr std::string_view to_string(SolveStatus s) noexcept {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::MaxIterExceeded: return "MaxIterExceeded";
        case SolveStatus::LineSearchStalled: return "LineSearchStalled";
    }
    return "Unknown";
}

}  // namespace volterra
