#pragma once

#include "quench/config.hpp"
#include "quench/estimator.hpp"
#include "quench/grid.hpp"

#include <string>
#include <vector>

namespace quench {

/// One named measurement with a pass verdict and the number it produced.
struct CheckRecord {
    std::string name;
    bool pass = true;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

/// A serialized exponent fit: {quantity, center, radii, values, slope, ...}.
struct FitRecord {
    std::string quantity;
    int center_node = -1;
    int center_level = -1;
    std::vector<double> radii;
    std::vector<double> values;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double reference = 0.0;
    bool pass = true;
};

struct EpsReport {
    double eps = 0.0;
    double dt = 0.0;
    long steps = 0;
    int stored_levels = 0;
    double min_value = 0.0;
    double max_value = 0.0;
    double max_residual = 0.0;
    std::vector<FitRecord> fits;
    std::vector<CheckRecord> checks;
    bool pass = true;
    double wall_seconds = 0.0;  // reported in metadata only
};

struct RunReport {
    ExperimentConfig config;
    std::vector<EpsReport> runs;
    std::vector<CheckRecord> cross_checks;  // drift columns across the eps sweep
    bool pass = true;
};

/// Deterministic JSON serialization; wall-clock fields are excluded here and
/// live in the metadata file instead.
std::string report_to_json(const RunReport& report);

/// Writes report.json plus a metadata.json carrying timestamps and timings.
void write_report_files(const RunReport& report, const std::string& dir);

/// Trajectory export: one row per (level, node), coordinates and values with
/// 17 significant digits. `csv_levels` stored levels are exported, evenly
/// spaced and always including the first and last.
void write_fields_csv(const std::string& path, const GridFunction& u, int csv_levels);

/// Static log-log decay plot with the fitted line and a dashed guide line at
/// the reference slope.
void write_loglog_svg(const std::string& path, const FitRecord& fit, const std::string& title);

/// Aggregates every report.json under `dir` (recursively) into a pass/fail
/// table on `out`. Returns the number of failing reports; throws on a
/// malformed file, naming it.
int aggregate_reports(const std::string& dir, std::ostream& out);

}  // namespace quench
