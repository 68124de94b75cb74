#pragma once

// Inverse map y -> x of V(x) = y. Newton's method on the node equations, with each
// step solving the linearized equation directly and backtracking on
// 1/2 ||V(x) - y||_{AC}^2; a derivative-light steepest-descent fallback on
// functional_F in the AC_0^2 metric; and a multistart probe of uniqueness.

#include "volterra/error.hpp"
#include "volterra/function_space.hpp"
#include "volterra/kernel.hpp"
#include "volterra/linear_solver.hpp"
#include "volterra/operator.hpp"
#include "volterra/sampling.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace volterra {

enum class SolveMethod { Newton, Gradient };

[[nodiscard]] constexpr std::string_view to_string(SolveMethod m) noexcept {
    return m == SolveMethod::Newton ? "newton" : "gradient";
}

struct MultistartInfo {
    std::size_t n_starts = 0;
    /// Max pairwise AC distance between converged solutions (0 with one converged start).
    double spread = 0.0;
    std::vector<std::size_t> failed_starts;
    std::vector<double> start_norms;
};

struct SolveReport {
    SolveMethod method = SolveMethod::Newton;
    std::size_t iterations = 0;
    /// ||V(x_k) - y||_{AC}, starting with the initial guess.
    std::vector<double> residual_history;
    /// Merit values; for Newton 1/2 ||V(x_k) - y||_{AC}^2, for gradient functional_F.
    std::vector<double> functional_history;
    bool converged = false;
    SolveStatus status = SolveStatus::MaxIterExceeded;
    std::optional<MultistartInfo> multistart;

    [[nodiscard]] double final_residual() const { return residual_history.empty() ? NAN : residual_history.back(); }
    [[nodiscard]] std::optional<double> multistart_spread() const {
        return multistart ? std::optional<double>(multistart->spread) : std::nullopt;
    }
};

struct SolveResult {
    GridFunction solution;
    SolveReport report;
};

/// Halving stops once the step falls below this.
inline constexpr double kMinLineSearchStep = 0x1.0p-20;

/// Newton iteration x_{k+1} = x_k + s delta_k with V'(x_k) delta_k = y - V(x_k)
/// solved by collocation_solve, and s in {1, 1/2, 1/4, ...} the first step that
/// strictly decreases 1/2 ||V(x) - y||_{AC}^2.
[[nodiscard]] inline SolveResult solve_newton(const KernelSpec& kernel, const GridFunction& y,
                                              const GridFunction& x_init, double tol, std::size_t max_iter) {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    detail::require_operands(kernel, y, x_init);
    SolveReport report;
    report.method = SolveMethod::Newton;
    GridFunction x = x_init;
    GridFunction residual = y - apply_V(kernel, x);
    double res = ac_norm(residual);
    double merit = 0.5 * res * res;
    report.residual_history.push_back(res);
    report.functional_history.push_back(merit);
    for (std::size_t k = 0;; ++k) {
        if (res <= tol) {
            report.converged = true;
            report.status = SolveStatus::Converged;
            break;
        }
        if (k == max_iter) {
            report.status = SolveStatus::MaxIterExceeded;
            break;
        }
        const GridFunction delta = collocation_solve(kernel, x, residual);
        double step = 1.0;
        bool accepted = false;
        while (step >= kMinLineSearchStep) {
            GridFunction trial = axpy(step, delta, x);
            GridFunction trial_residual = y - apply_V(kernel, trial);
            const double trial_res = ac_norm(trial_residual);
            const double trial_merit = 0.5 * trial_res * trial_res;
            if (trial_merit < merit) {
                x = std::move(trial);
                residual = std::move(trial_residual);
                res = trial_res;
                merit = trial_merit;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            report.status = SolveStatus::LineSearchStalled;
            break;
        }
        report.iterations = k + 1;
        report.residual_history.push_back(res);
        report.functional_history.push_back(merit);
    }
    return {std::move(x), std::move(report)};
}

/// Default initial guess x_init = y.
[[nodiscard]] inline SolveResult solve_newton(const KernelSpec& kernel, const GridFunction& y, double tol,
                                              std::size_t max_iter) {
    return solve_newton(kernel, y, y, tol, max_iter);
}

/// Steepest descent on functional_F along the AC_0^2 Riesz gradient, with a
/// Barzilai-Borwein trial step and Armijo backtracking. Converged once
/// functional_F <= tol^2. residual_history records (2 F)^{1/2}.
[[nodiscard]] inline SolveResult solve_gradient(const KernelSpec& kernel, const GridFunction& y,
                                                const GridFunction& x_init, double tol, std::size_t max_iter) {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
    detail::require_operands(kernel, y, x_init);
    constexpr double kArmijo = 1e-4;
    SolveReport report;
    report.method = SolveMethod::Gradient;
    GridFunction x = x_init;
    FunctionalGradient grad = functional_gradient(kernel, x, y);
    report.residual_history.push_back(std::sqrt(2.0 * grad.value));
    report.functional_history.push_back(grad.value);
    double step = 1.0;
    for (std::size_t k = 0;; ++k) {
        if (grad.value <= tol * tol) {
            report.converged = true;
            report.status = SolveStatus::Converged;
            break;
        }
        if (k == max_iter) {
            report.status = SolveStatus::MaxIterExceeded;
            break;
        }
        const double slope = ac_inner(grad.riesz, grad.riesz);
        bool accepted = false;
        double s = step;
        GridFunction trial = x;
        double trial_value = 0.0;
        for (int halvings = 0; halvings < 60; ++halvings, s *= 0.5) {
            trial = axpy(-s, grad.riesz, x);
            trial_value = functional_F(kernel, trial, y);
            if (trial_value <= grad.value - kArmijo * s * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            report.status = SolveStatus::LineSearchStalled;
            break;
        }
        FunctionalGradient next = functional_gradient(kernel, trial, y);
        const GridFunction dx = trial - x;
        const double curvature = ac_inner(dx, next.riesz - grad.riesz);
        step = curvature > 0.0 ? std::clamp(ac_inner(dx, dx) / curvature, 1e-6, 1e6) : 1.0;
        x = std::move(trial);
        grad = std::move(next);
        report.iterations = k + 1;
        report.residual_history.push_back(std::sqrt(2.0 * grad.value));
        report.functional_history.push_back(grad.value);
    }
    return {std::move(x), std::move(report)};
}

[[nodiscard]] inline SolveResult solve_gradient(const KernelSpec& kernel, const GridFunction& y, double tol,
                                                std::size_t max_iter) {
    return solve_gradient(kernel, y, y, tol, max_iter);
}

inline constexpr std::uint64_t kDefaultSeed = 20240917;

/// Largest AC norm of a multistart initial guess.
inline constexpr double kMultistartMaxNorm = 10.0;

/// Initial guesses for multistart: random_smooth_function draws from
/// Rng(seed), start s rescaled to AC norm kMultistartMaxNorm (s + 1) / n_starts.
[[nodiscard]] inline std::vector<GridFunction> multistart_initial_guesses(const Grid& grid, std::size_t dim,
                                                                          std::size_t n_starts,
                                                                          std::uint64_t seed = kDefaultSeed) {
    Rng rng(seed);
    std::vector<GridFunction> out;
    out.reserve(n_starts);
    for (std::size_t s = 0; s < n_starts; ++s) {
        const double norm = kMultistartMaxNorm * static_cast<double>(s + 1) / static_cast<double>(n_starts);
        out.push_back(with_ac_norm(random_smooth_function(grid, dim, rng), norm));
    }
    return out;
}

struct MultistartResult {
    SolveReport report;  ///< the first converged start's report, with multistart filled in
    std::vector<GridFunction> solutions;
    std::vector<SolveReport> start_reports;
};

/// Runs solve_newton from n_starts deterministic initial guesses and reports
/// the max pairwise AC distance among the converged results. A start that fails
/// is listed in failed_starts; converged is true only if every start converged.
[[nodiscard]] inline MultistartResult multistart_uniqueness(const KernelSpec& kernel, const GridFunction& y,
                                                            std::size_t n_starts, double tol,
                                                            std::size_t max_iter = 100,
                                                            std::uint64_t seed = kDefaultSeed) {
    if (n_starts < 2) throw Error(ErrorKind::InvalidArgument, "multistart needs at least two starts");
    MultistartResult out;
    MultistartInfo info;
    info.n_starts = n_starts;
    std::vector<GridFunction> converged;
    std::optional<SolveReport> first;
    const auto guesses = multistart_initial_guesses(y.grid(), y.dim(), n_starts, seed);
    for (std::size_t s = 0; s < n_starts; ++s) {
        info.start_norms.push_back(ac_norm(guesses[s]));
        SolveResult r = solve_newton(kernel, y, guesses[s], tol, max_iter);
        if (r.report.converged) {
            converged.push_back(r.solution);
            if (!first) first = r.report;
        } else {
            info.failed_starts.push_back(s);
        }
        out.start_reports.push_back(r.report);
        out.solutions.push_back(std::move(r.solution));
    }
    for (std::size_t i = 0; i < converged.size(); ++i) {
        for (std::size_t j = i + 1; j < converged.size(); ++j) {
            info.spread = std::max(info.spread, ac_distance(converged[i], converged[j]));
        }
    }
    out.report = first ? *first : out.start_reports.front();
    out.report.converged = info.failed_starts.empty();
    if (!out.report.converged && out.report.status == SolveStatus::Converged) {
        out.report.status = out.start_reports[info.failed_starts.front()].status;
    }
    out.report.multistart = std::move(info);
    return out;
}

}  // namespace volterra
