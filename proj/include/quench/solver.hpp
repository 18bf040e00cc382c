#pragma once

#include "quench/grid.hpp"
#include "quench/operators.hpp"

#include <cstdint>
#include <span>
#include <string>

namespace quench {

/// Dirichlet data on the parabolic boundary, from a preset catalog. The shift
/// flag lifts the data by eps^{1+alpha} to keep solutions strictly positive.
struct BoundarySpec {
    enum class Preset { PositiveConstant, Bump, ExactProfile };
    Preset preset = Preset::PositiveConstant;
    double x0 = 0.0;  // ExactProfile: left edge of the positivity set
    bool shift = false;
};

/// Stationary one-dimensional profile c (x - x0)_+^{2/(2-gamma)} with
/// c = ((2-gamma)^2 / 2)^{1/(2-gamma)}; solves u'' = gamma u^{gamma-1} on its
/// positivity set.
double exact_profile(double x, double gamma, double x0);

double boundary_value(const BoundarySpec& bc, std::array<double, 2> x, int dim, double t,
                      const PenalizationParams& pen);

/// Which right-hand side the explicit scheme applies.
enum class SourceMode {
    Penalized,      // beta_eps(u) u^{gamma-1}
    Zero,           // caloric comparison function
    ConstantBound,  // the constant source_bound(pen)
};

struct SolveConfig {
    SpaceTimeGrid grid;  // grid.dt is advisory; the scheme recomputes its step
    OperatorSpec op = OperatorSpec::make_laplacian();
    PenalizationParams pen{0.5, 0.1};
    BoundarySpec boundary{};
    double cfl_safety = 0.5;
    double source_safety = 0.5;
    int max_stored_levels = 4096;
    long max_steps = 50'000'000;
    bool compute_residuals = true;
};

struct SolveResult {
    GridFunction u;      // stored trajectory; its grid carries the storage step
    double dt = 0.0;     // actual stepping step (<= stored step)
    int store_every = 1;
    long steps = 0;
    double min_value = 0.0;  // over all computed levels, stored or not
    double max_value = 0.0;
    std::vector<double> level_max_residual;  // per stored level >= 1
    double max_residual = 0.0;
    double wall_seconds = 0.0;

    explicit SolveResult(const SpaceTimeGrid& g) : u(g) {}
};

/// Raised when the explicit scheme produces a non-finite value (the symptom of
/// a violated stability bound).
struct BlowupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Stability-limited time step: safety * min(diffusion bound, source bound).
double cfl_dt(const SpaceTimeGrid& grid, const OperatorSpec& op, const PenalizationParams& pen,
              double safety = 0.5, double source_safety = 0.5);

/// One explicit Euler update of the interior nodes; boundary nodes of `next`
/// are left untouched.
void step_interior(const SolveConfig& cfg, SourceMode mode, double t_k, double dt,
                   std::span<const double> current, std::span<double> next);

/// Marches the explicit monotone scheme from the initial level to t = 0.
/// Deterministic for a fixed config; throws BlowupError naming node and level
/// if a value goes non-finite.
SolveResult solve(const SolveConfig& cfg);
SolveResult solve_with_source(const SolveConfig& cfg, SourceMode mode);

/// Caloric comparison function: same operator and data, zero source.
GridFunction barrier_upper(const SolveConfig& cfg);

/// Comparison function driven by the constant source_bound(pen).
GridFunction barrier_lower(const SolveConfig& cfg);

struct SandwichReport {
    bool pass = true;
    double worst_lower = 0.0;  // max of (lower - u), positive means violation
    double worst_upper = 0.0;  // max of (u - upper)
    int worst_node = -1;
    int worst_level = -1;
};

/// Checks lower - tol <= u <= upper + tol at every stored node.
SandwichReport sandwich_check(const GridFunction& u, const GridFunction& lower,
                              const GridFunction& upper, double tol);

/// Pointwise defect |F(x,t,D^2 u) - du/dt - source(u)| with a backward time
/// difference, on interior nodes of levels >= 1. Level 0 and boundary columns
/// are zero.
GridFunction residual_field(const GridFunction& traj, const SolveConfig& cfg,
                            SourceMode mode = SourceMode::Penalized);

}  // namespace quench
