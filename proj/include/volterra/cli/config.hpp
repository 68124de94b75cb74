#pragma once

// Problem configuration for the command-line tool. JSON with exactly these keys:
//
//   {
//     "kernel":   {"name": "example1", "params": {"a_bar": 1.0}},
//     "interval": [0.0, 1.0],
//     "n_cells":  500,
//     "rhs":      {"expr": "t"}            or {"expr": "csv", "path": "a.csv"},
//     "tol":      1e-10,
//     "max_iter": 100,
//     "seed":     20240917
//   }
//
// tol, max_iter and seed are optional. Named right-hand sides are functions of
// s = t - alpha so that they vanish at alpha. Relative CSV paths resolve
// against the config file's directory.

#include "volterra/csv.hpp"
#include "volterra/error.hpp"
#include "volterra/function_space.hpp"
#include "volterra/kernel.hpp"
#include "volterra/nonlinear_solver.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

namespace volterra::cli {

using json = nlohmann::json;

inline constexpr std::size_t kMinCells = 16;
inline constexpr double kDefaultTol = 1e-10;
inline constexpr std::size_t kDefaultMaxIter = 100;

struct RhsSpec {
    std::string expr = "t";  ///< one of t, t^2, sin, csv
    std::string path;        ///< CSV path when expr == "csv"
};

struct ProblemConfig {
    std::string kernel_name;
    std::map<std::string, double> kernel_params;
    double alpha = 0.0;
    double beta = 1.0;
    std::size_t n_cells = 0;
    RhsSpec rhs;
    double tol = kDefaultTol;
    std::size_t max_iter = kDefaultMaxIter;
    std::uint64_t seed = kDefaultSeed;
    /// Directory that relative paths resolve against.
    std::filesystem::path base_dir;
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) config_error("unknown key '" + key + "' in " + where);
    }
}

inline double finite_number(const json& j, const std::string& what) {
    if (!j.is_number()) config_error(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) config_error(what + " must be finite");
    return v;
}

inline std::uint64_t nonnegative_integer(const json& j, const std::string& what) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
        config_error(what + " must be a nonnegative integer");
    }
    return j.get<std::uint64_t>();
}

/// Parameters each named kernel accepts, with defaults (NaN = required).
inline const std::map<std::string, std::map<std::string, double>>& kernel_catalog() {
    static const std::map<std::string, std::map<std::string, double>> catalog{
        {"zero", {}},
        {"linear", {{"lambda", NAN}}},
        {"example1", {{"a_bar", NAN}}},
        {"example2_linw_atan", {{"A", 1.0}, {"B", 0.0}}},
    };
    return catalog;
}

}  // namespace detail

/// Validates and converts a parsed JSON document; throws ConfigError.
[[nodiscard]] inline ProblemConfig parse_config(const json& doc, const std::filesystem::path& base_dir = {}) {
    using detail::config_error;
    if (!doc.is_object()) config_error("config must be a JSON object");
    detail::reject_unknown_keys(doc, {"kernel", "interval", "n_cells", "rhs", "tol", "max_iter", "seed"}, "config");
    for (const char* key : {"kernel", "interval", "n_cells", "rhs"}) {
        if (!doc.contains(key)) config_error(std::string("missing key '") + key + "'");
    }
    ProblemConfig cfg;
    cfg.base_dir = base_dir;

    const json& kernel = doc.at("kernel");
    if (!kernel.is_object()) config_error("kernel must be an object");
    detail::reject_unknown_keys(kernel, {"name", "params"}, "kernel");
    if (!kernel.contains("name") || !kernel.at("name").is_string()) config_error("kernel.name must be a string");
    cfg.kernel_name = kernel.at("name").get<std::string>();
    const auto& catalog = detail::kernel_catalog();
    const auto entry = catalog.find(cfg.kernel_name);
    if (entry == catalog.end()) config_error("unknown kernel '" + cfg.kernel_name + "'");
    const json params = kernel.value("params", json::object());
    if (!params.is_object()) config_error("kernel.params must be an object");
    for (const auto& [key, value] : params.items()) {
        if (!entry->second.count(key)) config_error("kernel '" + cfg.kernel_name + "' has no parameter '" + key + "'");
        cfg.kernel_params[key] = detail::finite_number(value, "kernel.params." + key);
    }
    for (const auto& [key, fallback] : entry->second) {
        if (cfg.kernel_params.count(key)) continue;
        if (std::isnan(fallback)) config_error("kernel '" + cfg.kernel_name + "' requires parameter '" + key + "'");
        cfg.kernel_params[key] = fallback;
    }

    const json& interval = doc.at("interval");
    if (!interval.is_array() || interval.size() != 2) config_error("interval must be [alpha, beta]");
    cfg.alpha = detail::finite_number(interval[0], "interval[0]");
    cfg.beta = detail::finite_number(interval[1], "interval[1]");
    if (!(cfg.alpha < cfg.beta)) config_error("interval needs alpha < beta");

    cfg.n_cells = detail::nonnegative_integer(doc.at("n_cells"), "n_cells");
    if (cfg.n_cells < kMinCells) config_error("n_cells must be at least " + std::to_string(kMinCells));

    const json& rhs = doc.at("rhs");
    if (!rhs.is_object()) config_error("rhs must be an object");
    detail::reject_unknown_keys(rhs, {"expr", "path"}, "rhs");
    if (!rhs.contains("expr") || !rhs.at("expr").is_string()) config_error("rhs.expr must be a string");
    cfg.rhs.expr = rhs.at("expr").get<std::string>();
    if (cfg.rhs.expr == "csv") {
        if (!rhs.contains("path") || !rhs.at("path").is_string()) config_error("rhs.path required for csv");
        cfg.rhs.path = rhs.at("path").get<std::string>();
    } else if (cfg.rhs.expr == "t" || cfg.rhs.expr == "t^2" || cfg.rhs.expr == "sin") {
        if (rhs.contains("path")) config_error("rhs.path only applies to csv");
    } else {
        config_error("rhs.expr must be one of t, t^2, sin, csv");
    }

    if (doc.contains("tol")) cfg.tol = detail::finite_number(doc.at("tol"), "tol");
    if (!(cfg.tol > 0.0)) config_error("tol must be positive");
    if (doc.contains("max_iter")) cfg.max_iter = detail::nonnegative_integer(doc.at("max_iter"), "max_iter");
    if (cfg.max_iter < 1) config_error("max_iter must be at least 1");
    if (doc.contains("seed")) cfg.seed = detail::nonnegative_integer(doc.at("seed"), "seed");

    if (cfg.kernel_name == "example2_linw_atan" && cfg.alpha != 0.0) config_error("example2_linw_atan needs alpha = 0");
    return cfg;
}

/// Reads and validates a config file; unreadable files and malformed JSON are ConfigError.
[[nodiscard]] inline ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot read config '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigError, std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc, path.parent_path());
}

[[nodiscard]] inline Grid make_grid(const ProblemConfig& cfg) { return {cfg.alpha, cfg.beta, cfg.n_cells}; }

[[nodiscard]] inline KernelSpec make_kernel(const ProblemConfig& cfg) {
    const TriangularDomain domain{cfg.alpha, cfg.beta};
    const auto& p = cfg.kernel_params;
    if (cfg.kernel_name == "zero") return zero_kernel(1, domain);
    if (cfg.kernel_name == "linear") return linear_kernel(p.at("lambda"), domain);
    if (cfg.kernel_name == "example1") return example1_kernel(p.at("a_bar"), domain);
    if (cfg.kernel_name == "example2_linw_atan") {
        try {
            return example2_linw_atan(cfg.beta, p.at("A"), p.at("B"));
        } catch (const Error& e) {
            throw Error(ErrorKind::ConfigError, e.what());
        }
    }
    throw Error(ErrorKind::ConfigError, "unknown kernel '" + cfg.kernel_name + "'");
}

[[nodiscard]] inline std::filesystem::path resolve_path(const ProblemConfig& cfg, const std::string& path) {
    const std::filesystem::path p(path);
    return p.is_absolute() || cfg.base_dir.empty() ? p : cfg.base_dir / p;
}

/// Reads a GridFunction CSV and resamples it onto `grid`; any failure is ConfigError.
[[nodiscard]] inline GridFunction load_grid_function(const std::filesystem::path& path, const Grid& grid) {
    try {
        return resample(read_csv(path.string()), grid);
    } catch (const Error& e) {
        throw Error(ErrorKind::ConfigError, "'" + path.string() + "': " + e.what());
    }
}

[[nodiscard]] inline GridFunction make_rhs(const ProblemConfig& cfg, const Grid& grid) {
    const double a = cfg.alpha;
    if (cfg.rhs.expr == "t") return from_callable([a](double t) { return t - a; }, grid);
    if (cfg.rhs.expr == "t^2") return from_callable([a](double t) { return (t - a) * (t - a); }, grid);
    if (cfg.rhs.expr == "sin") return from_callable([a](double t) { return std::sin(t - a); }, grid);
    return load_grid_function(resolve_path(cfg, cfg.rhs.path), grid);
}

}  // namespace volterra::cli
