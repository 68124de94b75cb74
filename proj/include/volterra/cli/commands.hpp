#pragma once

// The four subcommands. Each returns the process exit code:
//   0 success / certified, 1 not certified or a solver failure, 2 bad input.
// Reports are single JSON objects {hypothesis, solve, sensitivity, meta}.

#include "volterra/cli/config.hpp"
#include "volterra/cli/report.hpp"
#include "volterra/csv.hpp"
#include "volterra/error.hpp"
#include "volterra/hypothesis.hpp"
#include "volterra/kernel.hpp"
#include "volterra/nonlinear_solver.hpp"
#include "volterra/operator.hpp"
#include "volterra/sensitivity.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

namespace volterra::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Step of the central difference quotient recorded next to each sensitivity.
inline constexpr double kFdEpsilon = 1e-3;
/// Largest FD discrepancy a demo accepts.
inline constexpr double kDemoFdLimit = 1e-2;

namespace detail {

inline bool is_input_error(ErrorKind k) {
    switch (k) {
        case ErrorKind::ConfigError:
        case ErrorKind::IoError:
        case ErrorKind::GridMismatch:
        case ErrorKind::NotAnchoredAtAlpha:
        case ErrorKind::DimMismatch:
        case ErrorKind::InvalidGrid:
        case ErrorKind::KernelContract:
            return true;
        default:
            return false;
    }
}

/// Runs `body`, mapping exceptions onto exit codes with a message on `err`.
template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_input_error(e.kind()) ? kExitUsage : kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

inline void emit_report(const json& report, const std::optional<std::filesystem::path>& path, std::ostream& out) {
    const std::string text = report.dump(2) + "\n";
    if (!path) {
        out << text;
        return;
    }
    std::ofstream file(*path, std::ios::binary);
    if (!file || !(file << text)) throw Error(ErrorKind::IoError, "cannot write report '" + path->string() + "'");
}

}  // namespace detail

/// Hypothesis section: A3 and/or A4 according to the declared bounds, plus the
/// closed-form checks for the two example kernels. Certified if any check passes.
[[nodiscard]] inline json hypothesis_section(const ProblemConfig& cfg, const KernelSpec& kernel, const Grid& grid) {
    json checks = json::array();
    bool certified = false;
    auto add = [&](const HypothesisReport& r, const std::string& label) {
        json j = to_json(r);
        j["check"] = label;
        // This check's norm_value is already a squared quantity.
        if (label == "example2_feedback") j.erase("norm_value_squared");
        checks.push_back(std::move(j));
        certified = certified || r.passed;
    };
    if (kernel.bounds && kernel.bounds->has_diagonal_zero_bounds() && kernel.diagonal_zero) {
        add(check_A3(kernel, grid), "A3");
    }
    if (kernel.bounds && kernel.bounds->has_growth_bounds()) add(check_A4(kernel, grid), "A4");
    if (cfg.kernel_name == "example1" && cfg.alpha == 0.0 && cfg.beta == 1.0) {
        add(check_example1(cfg.kernel_params.at("a_bar")), "example1_closed_form");
    }
    if (cfg.kernel_name == "example2_linw_atan" && cfg.kernel_params.at("A") > 0.0) {
        add(check_example2([](double) { return 1.0; }, cfg.kernel_params.at("A"), cfg.beta, grid),
            "example2_feedback");
    }
    return {{"certified", certified}, {"checks", std::move(checks)}};
}

/// Solve section and the solution itself.
struct SolveOutcome {
    json section;
    SolveResult result;
};

[[nodiscard]] inline SolveOutcome solve_section(const ProblemConfig& cfg, const KernelSpec& kernel,
                                                const GridFunction& rhs) {
    SolveResult r = solve_newton(kernel, rhs, cfg.tol, cfg.max_iter);
    json j = to_json(r.report);
    j["tol"] = cfg.tol;
    j["max_iter"] = cfg.max_iter;
    j["round_trip_residual"] = ac_distance(apply_V(kernel, r.solution), rhs);
    j["x_at_beta"] = r.solution(r.solution.n_nodes() - 1);
    j["solution_ac_norm"] = ac_norm(r.solution);
    return {std::move(j), std::move(r)};
}

struct SensitivityOutcome {
    json section;
    GridFunction sensitivity;
    double fd_discrepancy = 0.0;
};

/// s = V'(x_a)^{-1} h at cfg.tol, with the central difference discrepancy at kFdEpsilon.
[[nodiscard]] inline SensitivityOutcome sensitivity_section(const ProblemConfig& cfg, const KernelSpec& kernel,
                                                            const GridFunction& rhs, const GridFunction& h) {
    SensitivityResult s = directional_sensitivity(kernel, rhs, h, cfg.tol);
    const GridFunction fd = fd_sensitivity(kernel, rhs, h, kFdEpsilon);
    const double norm = ac_norm(s.sensitivity);
    const double diff = ac_distance(s.sensitivity, fd);
    const double discrepancy = norm > 0.0 ? diff / norm : diff;
    json j{{"direction_ac_norm", ac_norm(h)},
           {"sensitivity_ac_norm", norm},
           {"fd_epsilon", kFdEpsilon},
           {"fd_discrepancy", discrepancy},
           {"linear", to_json(s.linear)},
           {"state_solve", to_json(s.solve)}};
    return {std::move(j), std::move(s.sensitivity), discrepancy};
}

/// `volterra check`: exit 0 iff some sufficient condition is certified.
inline int cmd_check(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& report_path,
                     std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const ProblemConfig cfg = load_config(config_path);
        const Grid grid = make_grid(cfg);
        const KernelSpec kernel = make_kernel(cfg);
        json report = make_report(grid, cfg.seed);
        report["hypothesis"] = hypothesis_section(cfg, kernel, grid);
        detail::emit_report(report, report_path, out);
        const bool certified = report["hypothesis"]["certified"].get<bool>();
        if (!certified) err << "hypotheses not certified for kernel '" << cfg.kernel_name << "'\n";
        return certified ? kExitOk : kExitFailure;
    });
}

/// `volterra solve`: hypothesis check (warning only), Newton solve, solution CSV.
inline int cmd_solve(const std::filesystem::path& config_path, const std::filesystem::path& out_csv,
                     const std::optional<std::filesystem::path>& report_path, std::ostream& out, std::ostream& err) {
    return detail::guarded(err, [&] {
        const ProblemConfig cfg = load_config(config_path);
        const Grid grid = make_grid(cfg);
        const KernelSpec kernel = make_kernel(cfg);
        const GridFunction rhs = make_rhs(cfg, grid);
        volterra::detail::require_kernel_fits(kernel, rhs);
        json report = make_report(grid, cfg.seed);
        report["hypothesis"] = hypothesis_section(cfg, kernel, grid);
        if (!report["hypothesis"]["certified"].get<bool>()) {
            err << "warning: hypotheses not certified; solving anyway\n";
        }
        SolveOutcome solved = solve_section(cfg, kernel, rhs);
        report["solve"] = std::move(solved.section);
        write_csv(out_csv.string(), solved.result.solution);
        detail::emit_report(report, report_path, out);
        if (!solved.result.report.converged) {
            err << "solve did not converge: " << to_string(solved.result.report.status) << '\n';
            return kExitFailure;
        }
        return kExitOk;
    });
}

/// `volterra sensitivity`: derivative of the solution map along the CSV direction.
inline int cmd_sensitivity(const std::filesystem::path& config_path, const std::filesystem::path& direction_path,
                           const std::filesystem::path& out_csv,
                           const std::optional<std::filesystem::path>& report_path, std::ostream& out,
                           std::ostream& err) {
    return detail::guarded(err, [&] {
        const ProblemConfig cfg = load_config(config_path);
        const Grid grid = make_grid(cfg);
        const KernelSpec kernel = make_kernel(cfg);
        const GridFunction rhs = make_rhs(cfg, grid);
        const GridFunction h = load_grid_function(direction_path, grid);
        volterra::detail::require_kernel_fits(kernel, rhs);
        volterra::detail::require_kernel_fits(kernel, h);
        json report = make_report(grid, cfg.seed);
        report["hypothesis"] = hypothesis_section(cfg, kernel, grid);
        if (!report["hypothesis"]["certified"].get<bool>()) {
            err << "warning: hypotheses not certified; continuing\n";
        }
        SensitivityOutcome s = sensitivity_section(cfg, kernel, rhs, h);
        report["sensitivity"] = std::move(s.section);
        write_csv(out_csv.string(), s.sensitivity);
        detail::emit_report(report, report_path, out);
        return kExitOk;
    });
}

/// Canonical configuration of a named demo, or nullopt for an unknown name.
[[nodiscard]] inline std::optional<json> demo_config(const std::string& name) {
    if (name == "example1") {
        return json{{"kernel", {{"name", "example1"}, {"params", {{"a_bar", 1.0}}}}},
                    {"interval", {0.0, 1.0}},
                    {"n_cells", 500},
                    {"rhs", {{"expr", "t"}}},
                    {"tol", kDefaultTol},
                    {"max_iter", kDefaultMaxIter},
                    {"seed", kDefaultSeed}};
    }
    if (name == "example2") {
        return json{{"kernel", {{"name", "example2_linw_atan"}, {"params", {{"A", 1.0}, {"B", 0.0}}}}},
                    {"interval", {0.0, 0.9}},
                    {"n_cells", 500},
                    {"rhs", {{"expr", "t"}}},
                    {"tol", kDefaultTol},
                    {"max_iter", kDefaultMaxIter},
                    {"seed", kDefaultSeed}};
    }
    return std::nullopt;
}

/// `volterra demo`: check, solve and sensitivity (direction h = rhs) for a
/// canonical problem. Writes <out_dir>/<name>_{config.json, solution.csv,
/// sensitivity.csv, report.json}; exit 1 if any stage fails.
inline int cmd_demo(const std::string& name, const std::filesystem::path& out_dir, std::ostream& out,
                    std::ostream& err) {
    const auto doc = demo_config(name);
    if (!doc) {
        err << "error: unknown demo '" << name << "' (expected example1 or example2)\n";
        return kExitUsage;
    }
    return detail::guarded(err, [&] {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw Error(ErrorKind::IoError, "cannot create '" + out_dir.string() + "': " + ec.message());
        const auto file = [&](const std::string& suffix) { return out_dir / (name + "_" + suffix); };
        {
            std::ofstream cfg_out(file("config.json"), std::ios::binary);
            if (!cfg_out || !(cfg_out << doc->dump(2) << '\n')) throw Error(ErrorKind::IoError, "cannot write config");
        }
        const ProblemConfig cfg = parse_config(*doc);
        const Grid grid = make_grid(cfg);
        const KernelSpec kernel = make_kernel(cfg);
        const GridFunction rhs = make_rhs(cfg, grid);
        json report = make_report(grid, cfg.seed);
        report["hypothesis"] = hypothesis_section(cfg, kernel, grid);
        SolveOutcome solved = solve_section(cfg, kernel, rhs);
        report["solve"] = std::move(solved.section);
        write_csv(file("solution.csv").string(), solved.result.solution);
        SensitivityOutcome s = sensitivity_section(cfg, kernel, rhs, rhs);
        report["sensitivity"] = std::move(s.section);
        write_csv(file("sensitivity.csv").string(), s.sensitivity);
        detail::emit_report(report, file("report.json"), out);

        const bool certified = report["hypothesis"]["certified"].get<bool>();
        const bool converged = solved.result.report.converged;
        const bool fd_ok = s.fd_discrepancy <= kDemoFdLimit;
        out << name << ": hypotheses " << (certified ? "certified" : "not certified") << ", solve "
            << (converged ? "converged" : "failed") << ", fd discrepancy " << s.fd_discrepancy << '\n'
            << "artifacts in " << out_dir.string() << '\n';
        return certified && converged && fd_ok ? kExitOk : kExitFailure;
    });
}

}  // namespace volterra::cli
