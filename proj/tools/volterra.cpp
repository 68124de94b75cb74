#include "volterra/cli/commands.hpp"
#include "volterra/version.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

std::optional<std::filesystem::path> optional_path(const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::filesystem::path>(s);
}

}  // namespace

int main(int argc, char** argv) {
    namespace vc = volterra::cli;
    CLI::App app{"Solver for nonlinear Volterra integral equations of the second kind"};
    app.set_version_flag("--version", std::string(volterra::kVersion));
    app.require_subcommand(1);

    std::string config, out, direction, report, demo_name, out_dir = "demo_out";

    auto* check = app.add_subcommand("check", "Check the well-posedness hypotheses for a config");
    check->add_option("config", config, "Problem config (JSON)")->required();
    check->add_option("--report", report, "Write the JSON report here instead of stdout");

    auto* solve = app.add_subcommand("solve", "Solve V(x) = rhs and write the solution CSV");
    solve->add_option("config", config, "Problem config (JSON)")->required();
    solve->add_option("-o,--out", out, "Solution CSV")->required();
    solve->add_option("--report", report, "Write the JSON report here instead of stdout");

    auto* sens = app.add_subcommand("sensitivity", "Directional derivative of the solution map");
    sens->add_option("config", config, "Problem config (JSON)")->required();
    sens->add_option("--direction", direction, "Direction h as a GridFunction CSV")->required();
    sens->add_option("-o,--out", out, "Sensitivity CSV")->required();
    sens->add_option("--report", report, "Write the JSON report here instead of stdout");

    auto* demo = app.add_subcommand("demo", "Run check, solve and sensitivity on a canonical example");
    demo->add_option("name", demo_name, "example1 or example2")->required();
    demo->add_option("--out-dir", out_dir, "Artifact directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : vc::kExitUsage;
    }

    if (*check) return vc::cmd_check(config, optional_path(report), std::cout, std::cerr);
    if (*solve) return vc::cmd_solve(config, out, optional_path(report), std::cout, std::cerr);
    if (*sens) return vc::cmd_sensitivity(config, direction, out, optional_path(report), std::cout, std::cerr);
    return vc::cmd_demo(demo_name, out_dir, std::cout, std::cerr);
}
