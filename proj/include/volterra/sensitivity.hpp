#pragma once

// Derivative of the solution map a -> x_a of V(x) = a. At the solution x_a the
// directional derivative along h solves the linearized equation s + T s = h with
// T built at x_a; difference quotients of the solution map check it.

#include "volterra/error.hpp"
#include "volterra/function_space.hpp"
#include "volterra/kernel.hpp"
#include "volterra/linear_solver.hpp"
#include "volterra/nonlinear_solver.hpp"
#include "volterra/sampling.hpp"

#include <cstdint>
#include <vector>

namespace volterra {

/// Residual tolerance for the nonlinear solves behind the difference quotients.
inline constexpr double kSensitivitySolveTol = 1e-11;
inline constexpr std::size_t kSensitivityMaxIter = 100;

namespace detail {

inline GridFunction solve_or_throw(const KernelSpec& kernel, const GridFunction& a, double tol) {
    SolveResult r = solve_newton(kernel, a, tol, kSensitivityMaxIter);
    if (!r.report.converged) {
        throw Error(ErrorKind::SolverFailure, "nonlinear solve failed: " + std::string(to_string(r.report.status)));
    }
    return std::move(r.solution);
}

}  // namespace detail

struct SensitivityResult {
    GridFunction sensitivity;  ///< s = V'(x_a)^{-1} h
    GridFunction state;        ///< x_a
    SolveReport solve;
    NeumannReport linear;
};

/// Solves V(x_a) = a, then s + T s = h at x_a by the Neumann iteration, so that
/// ||s + T s - h||_{AC} <= tol.
[[nodiscard]] inline SensitivityResult directional_sensitivity(const KernelSpec& kernel, const GridFunction& a,
                                                               const GridFunction& h, double tol,
                                                               std::size_t max_iter = 500) {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    detail::require_operands(kernel, a, h);
    SolveResult state = solve_newton(kernel, a, std::min(tol, kSensitivitySolveTol), kSensitivityMaxIter);
    if (!state.report.converged) {
        throw Error(ErrorKind::SolverFailure,
                    "nonlinear solve failed: " + std::string(to_string(state.report.status)));
    }
    NeumannResult lin = neumann_solve(kernel, state.solution, h, tol, max_iter);
    if (!lin.report.converged) {
        throw Error(ErrorKind::SolverFailure, "linearized solve did not reach tol");
    }
    return {std::move(lin.solution), std::move(state.solution), std::move(state.report), std::move(lin.report)};
}

/// Central difference (x_{a + eps h} - x_{a - eps h}) / (2 eps) of the solution map.
[[nodiscard]] inline GridFunction fd_sensitivity(const KernelSpec& kernel, const GridFunction& a,
                                                 const GridFunction& h, double epsilon) {
    if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
    const GridFunction plus = detail::solve_or_throw(kernel, axpy(epsilon, h, a), kSensitivitySolveTol);
    const GridFunction minus = detail::solve_or_throw(kernel, axpy(-epsilon, h, a), kSensitivitySolveTol);
    return scale(0.5 / epsilon, plus - minus);
}

/// ||s - fd|| / ||s|| in AC norm (absolute when s = 0), with s from
/// directional_sensitivity and fd the central difference quotient at epsilon.
[[nodiscard]] inline double fd_sensitivity_check(const KernelSpec& kernel, const GridFunction& a,
                                                 const GridFunction& h, double epsilon) {
    const SensitivityResult s = directional_sensitivity(kernel, a, h, 1e-12);
    const GridFunction fd = fd_sensitivity(kernel, a, h, epsilon);
    const double norm = ac_norm(s.sensitivity);
    const double diff = ac_distance(s.sensitivity, fd);
    return norm > 0.0 ? diff / norm : diff;
}

/// Unit-AC-norm probe directions drawn from Rng(seed).
[[nodiscard]] inline std::vector<GridFunction> robustness_probes(const Grid& grid, std::size_t dim,
                                                                 std::size_t n_probes,
                                                                 std::uint64_t seed = kDefaultSeed) {
    Rng rng(seed);
    std::vector<GridFunction> out;
    out.reserve(n_probes);
    for (std::size_t p = 0; p < n_probes; ++p) out.push_back(with_ac_norm(random_smooth_function(grid, dim, rng), 1.0));
    return out;
}

/// max over unit probes h of ||x_{a + delta h} - x_a||_{AC} / delta.
[[nodiscard]] inline double robustness_modulus(const KernelSpec& kernel, const GridFunction& a,
                                               std::size_t n_probes, double delta,
                                               std::uint64_t seed = kDefaultSeed) {
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
    if (n_probes < 1) throw Error(ErrorKind::InvalidArgument, "need at least one probe");
    detail::require_kernel_fits(kernel, a);
    const GridFunction base = detail::solve_or_throw(kernel, a, kSensitivitySolveTol);
    double best = 0.0;
    for (const auto& h : robustness_probes(a.grid(), a.dim(), n_probes, seed)) {
        const GridFunction moved = detail::solve_or_throw(kernel, axpy(delta, h, a), kSensitivitySolveTol);
        best = std::max(best, ac_distance(moved, base) / delta);
    }
    return best;
}

}  // namespace volterra
