#pragma once

#include "quench/grid.hpp"
#include "quench/operators.hpp"
#include "quench/solver.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace quench {

/// Pointwise power u^{(2-gamma)/2}; preserves zeros and inverts exactly via
/// v^{1+alpha} = u. Rejects negative input.
GridFunction transform_v(const GridFunction& u, double gamma);

/// Smooth positive space-time function used for identity checks.
struct AnalyticFunction {
    std::string name;
    int dim = 1;
    std::function<double(double, double, double)> f;  // (x, y, t)
};

/// Fixed catalog of smooth, positive, bounded-below functions.
std::vector<AnalyticFunction> analytic_catalog();

/// Frobenius-norm defect of the Hessian identity linking u and v = u^{(2-gamma)/2},
///   D^2 v + alpha v^{-1} grad v ⊗ grad v  =  (1+alpha)^{-1} v^{-1} u^{1-gamma} D^2 u,
/// evaluated with central differences at resolution h. Decays like h^2 on the
/// analytic catalog. Accepts gamma in [0,1); gamma = 0 degenerates to an exact
/// tautology.
double transform_identity_residual(const AnalyticFunction& u, std::array<double, 3> point,
                                   double h, double gamma);

/// The auxiliary equation F(x,t, D^2 v + delta v^{-1} grad v ⊗ grad v) - dv/dt
/// = f v^{-1}, with f from a small catalog.
struct GeneralEqSpec {
    OperatorSpec op = OperatorSpec::make_laplacian();
    double delta = 0.0;
    enum class SourceF { Zero, Constant, PenalizationImplied } f_kind = SourceF::Zero;
    double f_value = 0.0;  // Constant
    std::optional<PenalizationParams> pen;  // PenalizationImplied
};

/// f induced on v by the penalized absorption of u = v^{1+alpha}; values lie in
/// [0, gamma/(1+alpha)].
double implied_penalization_f(double v_value, const PenalizationParams& pen);

/// Pointwise defect of the auxiliary equation on interior nodes of levels >= 1;
/// requires v > 0 there.
GridFunction general_eq_residual(const GridFunction& v, const GeneralEqSpec& spec);

/// Parabolic rescaling v(kappa x, kappa^2 t) / kappa^theta. kappa must be a
/// dyadic 2^{-m} aligned with the grid so resampling is exact. The result
/// lives on the original box with spacing h/kappa and step dt/kappa^2: a
/// window onto kappa [a,b] and the most recent levels, relabeled in the
/// stretched variables.
struct RescaleParams {
    double kappa = 0.5;
    double theta = 0.0;
};

GridFunction rescale_field(const GridFunction& v, const RescaleParams& rp);

/// Exponent of the source amplification under rescaling: theta(gamma-1)+2-theta.
/// Vanishes identically at theta = 1 + alpha.
double rescaled_source_exponent(double theta, double gamma);

/// Penalization scale of the rescaled equation: eps * kappa^{-theta/(1+alpha)}.
double rescaled_epsilon(double eps, double kappa, double theta, double gamma);

enum class PucciSign { Plus, Minus };

struct ComparisonTrialConfig {
    SpaceTimeGrid grid;
    double lambda = 1.0;
    double Lambda = 2.0;
    double c = 0.0;  // quadratic gradient coefficient
    double forcing = 0.0;
    PucciSign sign = PucciSign::Plus;
    double cfl_safety = 0.5;
};

using SpaceTimeFn = std::function<double(std::array<double, 2>, double)>;

struct OrderingReport {
    bool pass = true;
    double worst_gap = 0.0;  // max of (sub - super) over all computed levels
    int worst_node = -1;
    double worst_time = 0.0;
    long steps = 0;
};

/// Evolves ordered data pairs under M^{+/-}(D^2 v) + c |grad v|^2 - dv/dt +
/// forcing = 0 with a shared adaptive step, and checks that ordering persists
/// at every node and level within 1e-8. Data crossing on the parabolic
/// boundary is a precondition error.
OrderingReport comparison_trial(const SpaceTimeFn& sub_data, const SpaceTimeFn& super_data,
                                const ComparisonTrialConfig& cfg);

/// Quadratic space-time barrier pair h±(x,t) = v0 ± (L + K|x|^2 + Kbar (t - tau1)),
/// with the canonical coupling Kbar = 2 n Lambda K + 4 c1 K^2 + M.
struct TimeBarrierParams {
    double L = 2.0;
    double K = 4.0;
    double Kbar = 0.0;  // derived, never set directly
    double c1 = 0.0;
    double c2 = 0.0;
    double M = 0.0;
    int n = 1;
    double Lambda = 1.0;
};

TimeBarrierParams make_time_barrier_params(double L, double K, double c1, double c2, double M,
                                           int n, double Lambda);

std::pair<GridFunction, GridFunction> time_barrier(double v0_at_center,
                                                   const TimeBarrierParams& tbp, double tau1,
                                                   const SpaceTimeGrid& grid);

/// Waiting time (1/4) min{1, 2L / (M + 4 n Lambda L + 16 c1 L^2)}; requires L > 1.
double kappa0(double L, double M, int n, double Lambda, double c1);

/// Waiting time (1/4) min{1, 8C / (f_inf + 16 n Lambda C + 64 delta Lambda C^2)}.
double kappa0_quotient(double C, double f_inf, int n, double Lambda, double delta);

struct TimeOscReport {
    double spatial_bound = 0.0;  // the measured L
    double kappa0 = 0.0;
    double center_oscillation = 0.0;  // sup over t in (-kappa0, 0] of |v(c,0)-v(c,t)|
    bool pass = true;
};

/// Measures the spatial oscillation bound L of v around the domain center,
/// derives the waiting time from it, and checks the 8L oscillation bound at
/// the center column.
TimeOscReport time_oscillation_check(const GridFunction& v, int n, double Lambda, double c1,
                                     double M);

}  // namespace quench
