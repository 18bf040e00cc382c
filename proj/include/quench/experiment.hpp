#pragma once

#include "quench/config.hpp"
#include "quench/operators.hpp"
#include "quench/report.hpp"
#include "quench/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace quench {

struct RunOptions {
    std::string out_override;  // empty keeps the config's directory
    int threads = 1;
    bool write_outputs = true;
};

/// Builds the operator described by a config block.
OperatorSpec make_operator(const ExperimentConfig& cfg);

/// Builds the solver configuration for one entry of the eps list.
SolveConfig make_solve_config(const ExperimentConfig& cfg, double eps);

/// Solves, runs the configured measurement battery for every eps, writes
/// fields/plots/report files, and returns the aggregated report.
RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

/// Sweep over a descending eps list (at least two entries): per-eps row of
/// growth slope, gradient ratio at theta = gamma/2, Lipschitz constant and
/// sandwich margin, plus cross-eps drift checks. Prints the table to `out`.
RunReport sweep_epsilon(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out);

/// Randomized structural property suites for the operator catalog and the
/// penalization; prints one line per suite. Returns true when all pass.
bool selfcheck(uint64_t seed, std::ostream& out);

}  // namespace quench
