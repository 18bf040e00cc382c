// Experiment runner for the penalized singular-absorption parabolic problem:
// single solves, eps sweeps, report aggregation, and property self-checks.

#include "quench/config.hpp"
#include "quench/experiment.hpp"
#include "quench/solver.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBlowup = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quenchlab: numerical experiments for a singularly perturbed "
                 "fully nonlinear parabolic free boundary problem"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_dir, report_dir;
    int threads = 1;
    uint64_t seed = 0x9e3779b97f4a7c15ULL;
    app.add_option("--out", out_dir, "Output directory (overrides the config)");
    app.add_option("--threads", threads, "Worker threads for eps sweeps")->check(CLI::Range(1, 256));
    app.add_option("--seed", seed, "Seed for randomized property suites");

    auto* run_cmd = app.add_subcommand("run", "Solve and run the measurement battery");
    run_cmd->add_option("config", config_path, "Experiment config file")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Per-eps table with drift columns");
    sweep_cmd->add_option("config", config_path, "Experiment config file")->required();

    auto* report_cmd = app.add_subcommand("report", "Aggregate report.json files in a directory");
    report_cmd->add_option("dir", report_dir, "Directory to scan")->required();

    app.add_subcommand("selfcheck", "Operator and penalization property suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    quench::RunOptions opts;
    opts.out_override = out_dir;
    opts.threads = threads;

    try {
        if (run_cmd->parsed()) {
            const auto cfg = quench::ExperimentConfig::load(config_path);
            const auto report = quench::run_experiment(cfg, opts);
            for (const auto& run : report.runs) {
                for (const auto& c : run.checks) {
                    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << "eps=" << run.eps << " "
                              << c.name << " = " << c.value;
                    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
                    std::cout << "\n";
                }
            }
            for (const auto& c : report.cross_checks) {
                std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " = " << c.value
                          << "\n";
            }
            std::cout << (report.pass ? "all checks pass" : "some checks failed") << "\n";
            return report.pass ? kExitPass : kExitCheckFailure;
        }
        if (sweep_cmd->parsed()) {
            const auto cfg = quench::ExperimentConfig::load(config_path);
            const auto report = quench::sweep_epsilon(cfg, opts, std::cout);
            return report.pass ? kExitPass : kExitCheckFailure;
        }
        if (report_cmd->parsed()) {
            const int failures = quench::aggregate_reports(report_dir, std::cout);
            return failures == 0 ? kExitPass : kExitCheckFailure;
        }
        // selfcheck
        return quench::selfcheck(seed, std::cout) ? kExitPass : kExitCheckFailure;
    } catch (const quench::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const quench::BlowupError& e) {
        std::cerr << "numerical blow-up: " << e.what() << "\n";
        return kExitBlowup;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
}
