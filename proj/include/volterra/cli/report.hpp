#pragma once

// JSON forms of the library's reports. Non-finite doubles serialize as null.

#include "volterra/function_space.hpp"
#include "volterra/hypothesis.hpp"
#include "volterra/linear_solver.hpp"
#include "volterra/nonlinear_solver.hpp"
#include "volterra/version.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <string>

namespace volterra::cli {

using json = nlohmann::json;

[[nodiscard]] inline json to_json(const Grid& g) {
    return {{"alpha", g.alpha()}, {"beta", g.beta()}, {"n_cells", g.n_cells()}, {"spacing", g.spacing()}};
}

[[nodiscard]] inline json to_json(const HypothesisReport& r) {
    return {{"variant", std::string(to_string(r.variant))},
            {"quantity", r.quantity},
            {"diagonal_zero_ok", r.diagonal_zero_ok},
            {"norm_value", r.norm_value},
            {"norm_value_squared", r.norm_value * r.norm_value},
            {"threshold", r.threshold},
            {"margin", r.margin},
            {"quadrature_error", r.quadrature_error},
            {"offset_norm", r.offset_norm},
            {"passed", r.passed},
            {"verdict", r.passed ? "certified" : "not certified"},
            {"samples_used", r.samples_used}};
}

[[nodiscard]] inline json to_json(const NeumannBound& b) {
    return {{"l_rho", b.l_rho}, {"M", b.M}, {"C", b.C}, {"D", b.D}, {"A", b.A}};
}

[[nodiscard]] inline json to_json(const NeumannReport& r) {
    return {{"iterations", r.iterations},
            {"residual_ac", r.residual_ac},
            {"tail_bound", r.tail_bound},
            {"certified", r.certified},
            {"converged", r.converged},
            {"status", std::string(to_string(r.status))},
            {"bound", to_json(r.bound)},
            {"residual_history", r.residual_history}};
}

[[nodiscard]] inline json to_json(const MultistartInfo& m) {
    return {{"n_starts", m.n_starts},
            {"spread", m.spread},
            {"failed_starts", m.failed_starts},
            {"start_norms", m.start_norms}};
}

[[nodiscard]] inline json to_json(const SolveReport& r) {
    json j{{"method", std::string(to_string(r.method))},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"status", std::string(to_string(r.status))},
           {"final_residual", r.final_residual()},
           {"residual_history", r.residual_history},
           {"functional_history", r.functional_history}};
    j["multistart"] = r.multistart ? to_json(*r.multistart) : json(nullptr);
    return j;
}

/// UTC time in ISO 8601; the only field excluded from reproducibility comparisons.
[[nodiscard]] inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

[[nodiscard]] inline json make_meta(const Grid& grid, std::uint64_t seed) {
    return {{"grid", to_json(grid)}, {"seed", seed}, {"version", std::string(kVersion)}, {"timestamp", utc_timestamp()}};
}

/// Empty run report with the four top-level sections.
[[nodiscard]] inline json make_report(const Grid& grid, std::uint64_t seed) {
    return {{"hypothesis", json::object()},
            {"solve", json::object()},
            {"sensitivity", json::object()},
            {"meta", make_meta(grid, seed)}};
}

}  // namespace volterra::cli
