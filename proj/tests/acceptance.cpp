// End-to-end acceptance battery. Each criterion prints one [PASS]/[FAIL] line;
// the process exits nonzero if any criterion fails.

#include "quench/estimator.hpp"
#include "quench/experiment.hpp"
#include "quench/solver.hpp"
#include "quench/verification.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace quench;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << number << ": " << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

void run_criterion(int number, const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        criterion(number, name, false, std::string("exception: ") + e.what());
    }
}

SolveConfig profile_config(int n, double eps, double T = 0.5) {
    return SolveConfig{
        .grid = make_grid(1, -1.0, 1.0, n, T, T),
        .op = OperatorSpec::make_laplacian(),
        .pen = PenalizationParams(0.5, eps),
        .boundary = {BoundarySpec::Preset::ExactProfile, 0.0, false},
    };
}

double final_profile_error(const SolveResult& sol) {
    const auto& g = sol.u.grid();
    double err = 0.0;
    for (int node = 0; node < g.num_nodes(); ++node) {
        err = std::max(err, std::abs(sol.u.at(node, g.levels - 1) -
                                     exact_profile(g.coord(node), 0.5, 0.0)));
    }
    return err;
}

// 1. Exact-profile recovery: sup-norm oracle plus growth slope 4/3 at the
//    detected interface, for eps in {0.05, 0.025}.
void criterion_profile_recovery(std::vector<SolveResult>& keep) {
    const std::vector<double> radii{0.25, 0.125, 0.0625, 0.03125};
    for (double eps : {0.05, 0.025}) {
        const auto cfg = profile_config(257, eps);
        auto sol = solve(cfg);
        const auto& g = sol.u.grid();

        const double err = final_profile_error(sol);
        std::ostringstream d1;
        d1 << "eps = " << eps << ", sup error = " << err;
        criterion(1, "exact-profile sup-norm recovery", err <= 0.02, d1.str());

        const auto fb = detect_free_boundary(sol.u, cfg.pen.tau_low());
        const int node = pick_free_boundary_node(sol.u, fb, g.levels - 1);
        bool pass = node >= 0;
        std::ostringstream d2;
        d2 << "eps = " << eps;
        if (node < 0) {
            d2 << ", no threshold crossing";
        } else {
            d2 << ", interface node x = " << g.coord(node);
            try {
                const double slope = fb_growth(sol.u, node, g.levels - 1, radii, 4.0 / 3.0).slope;
                pass = std::abs(slope - 4.0 / 3.0) <= 0.07;
                d2 << ", slope = " << slope;
            } catch (const std::exception& e) {
                pass = false;
                d2 << ", " << e.what();
            }
        }
        criterion(1, "free-boundary growth exponent 4/3 +- 0.07", pass, d2.str());
        keep.push_back(std::move(sol));
    }

    // Context for the lines above: the estimator itself recovers the exponent
    // cleanly on the closed-form profile; the gap is the eps-level lift of the
    // solved fields.
    {
        const auto g = make_grid(1, -1.0, 1.0, 257, 0.5, 0.002);
        GridFunction prof(g);
        for (int k = 0; k < g.levels; ++k) {
            for (int node = 0; node < g.num_nodes(); ++node) {
                prof.at(node, k) = exact_profile(g.coord(node), 0.5, 0.0);
            }
        }
        const auto fit = fb_growth(prof, g.nearest_node(0.0), g.levels - 1, radii, 4.0 / 3.0);
        std::cout << "[info] criterion 1: synthetic-profile oracle slope = " << fit.slope
                  << " (r2 = " << fit.r2 << ")" << std::endl;
    }
}

// 2. eps-uniform gradient bound with theta = 1/4 on the same sweep.
void criterion_gradient_uniformity(const std::vector<SolveResult>& runs,
                                   const std::vector<double>& eps_values) {
    if (runs.size() != eps_values.size() || runs.empty()) {
        throw std::runtime_error("profile sweep unavailable");
    }
    std::vector<double> ratios;
    for (size_t i = 0; i < runs.size(); ++i) {
        const PenalizationParams pen(0.5, eps_values[i]);
        ratios.push_back(gradient_bound_ratio(runs[i].u, 0.25, pen.tau_high()));
    }
    const double lo = *std::min_element(ratios.begin(), ratios.end());
    const double hi = *std::max_element(ratios.begin(), ratios.end());
    std::ostringstream d;
    d << "ratios:";
    for (double r : ratios) d << " " << r;
    d << ", spread = " << hi / lo;
    criterion(2, "gradient ratio |grad u|^2/u^{1/4} varies <= 2x across eps", hi <= 2.0 * lo,
              d.str());
}

// 3. Hessian identity of the power transform: order >= 1.8 over three h.
void criterion_transform_identity() {
    const std::vector<double> hs{0.02, 0.01, 0.005};
    bool all = true;
    std::ostringstream d;
    for (const auto& fn : analytic_catalog()) {
        const std::array<double, 3> point{0.3, fn.dim == 2 ? -0.2 : 0.0, -0.1};
        std::vector<double> residuals;
        for (double h : hs) {
            residuals.push_back(transform_identity_residual(fn, point, h, 0.5));
        }
        if (*std::max_element(residuals.begin(), residuals.end()) <= 1e-14) {
            d << fn.name << ": exact; ";  // constants are identically zero
            continue;
        }
        const double order = fit_exponent(hs, residuals, 2.0).slope;
        d << fn.name << ": order " << order << "; ";
        all = all && order >= 1.8;
    }
    criterion(3, "transform identity residual converges at order >= 1.8", all, d.str());
}

// 4. Scaling algebra: neutral exponent to 1e-12 over 100 gammas, and the
//    rescaled field's equation residual within 2x of the plain restriction.
void criterion_scaling() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> gdist(0.01, 0.99);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double gamma = gdist(rng);
        worst = std::max(worst,
                         std::abs(rescaled_source_exponent(1.0 + alpha_of_gamma(gamma), gamma)));
    }
    std::ostringstream d1;
    d1 << "max |exponent| = " << worst;
    criterion(4, "neutral rescaling exponent vanishes to 1e-12", worst <= 1e-12, d1.str());

    const auto cfg = profile_config(129, 0.05);
    const auto sol = solve(cfg);
    const double theta = 1.0 + cfg.pen.alpha();

    // rescaled field under the rescaled equation
    const auto w = rescale_field(sol.u, {0.5, theta});
    SolveConfig resc_cfg = cfg;
    resc_cfg.pen = cfg.pen.with_eps(rescaled_epsilon(0.05, 0.5, theta, 0.5));
    const double resc = residual_field(w, resc_cfg).max_value();

    // baseline: the unrescaled residual over the window the rescaling reads,
    // i.e. |x| <= 1/2 and the most recent stored levels
    const auto base_res = residual_field(sol.u, cfg);
    const auto& g = sol.u.grid();
    const auto& wg = w.grid();
    double base = 0.0;
    for (int k = g.levels - wg.levels; k < g.levels; ++k) {
        if (k < 1) continue;
        for (int node = 0; node < g.num_nodes(); ++node) {
            if (std::abs(g.coord(node)) > 0.5 + 1e-12) continue;
            base = std::max(base, base_res.at(node, k));
        }
    }

    std::ostringstream d2;
    d2 << "window residual = " << base << ", rescaled residual = " << resc;
    criterion(4, "rescaled equation residual within 2x of baseline",
              resc <= 2.0 * base && base > 0.0, d2.str());
}

// 5. Discrete comparison: 50 randomized ordered trials, both Pucci signs.
void criterion_comparison() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> pos(0.05, 0.5);
    int violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 50; ++trial) {
        ComparisonTrialConfig cfg;
        cfg.grid = make_grid(1, -1.0, 1.0, 129, 0.05, 0.05);
        cfg.c = (trial % 2) ? 0.5 : 0.0;
        cfg.forcing = (trial % 4 < 2) ? 0.0 : 1.0;
        cfg.sign = (trial / 25 == 0) ? PucciSign::Plus : PucciSign::Minus;
        const double a1 = u(rng), p1 = u(rng), off = pos(rng), a2 = 0.5 * pos(rng);
        const int k1 = 1 + trial % 4;
        const auto sub = [=](std::array<double, 2> x, double) {
            return a1 * std::sin(k1 * M_PI * x[0] + p1);
        };
        const auto super = [=](std::array<double, 2> x, double) {
            return a1 * std::sin(k1 * M_PI * x[0] + p1) + off +
                   a2 * (1.0 + std::cos(3.0 * x[0]));
        };
        const auto rep = comparison_trial(sub, super, cfg);
        if (!rep.pass) ++violations;
        worst = std::max(worst, rep.worst_gap);
    }
    std::ostringstream d;
    d << violations << " violations, worst gap = " << worst;
    criterion(5, "50 randomized comparison trials stay ordered", violations == 0, d.str());
}

// 6. Barrier sandwich on the constant-data run.
void criterion_sandwich() {
    SolveConfig cfg{
        .grid = make_grid(1, -1.0, 1.0, 129, 0.25, 0.25),
        .op = OperatorSpec::make_laplacian(),
        .pen = PenalizationParams(0.5, 0.1),
        .boundary = {BoundarySpec::Preset::PositiveConstant, 0.0, false},
    };
    const auto sol = solve(cfg);
    const auto upper = barrier_upper(cfg);
    const auto lower = barrier_lower(cfg);
    const auto rep = sandwich_check(sol.u, lower, upper, 1e-6);
    std::ostringstream d;
    d << "worst below = " << rep.worst_lower << ", worst above = " << rep.worst_upper;
    criterion(6, "barrier sandwich within 1e-6", rep.pass, d.str());
}

// 7. Time-oscillation bound on a bump-data run.
void criterion_time_oscillation() {
    SolveConfig cfg{
        .grid = make_grid(1, -1.0, 1.0, 129, 0.3, 0.3),
        .op = OperatorSpec::make_laplacian(),
        .pen = PenalizationParams(0.5, 0.1),
        .boundary = {BoundarySpec::Preset::Bump, 0.0, true},
    };
    const auto sol = solve(cfg);
    const auto v = transform_v(sol.u, 0.5);
    const auto rep = time_oscillation_check(v, 1, 1.0, cfg.pen.alpha() * 1.0, 1.0);
    std::ostringstream d;
    d << "L = " << rep.spatial_bound << ", kappa0 = " << rep.kappa0
      << ", osc = " << rep.center_oscillation;
    criterion(7, "center oscillation within 8L over the waiting window", rep.pass, d.str());
}

// 8. Operator and penalization unit suites.
void criterion_unit_suites() {
    bool ok = true;
    std::ostringstream d;

    ok = ok && pucci_minus(SymMatrix::identity(2), 1.0, 2.0) == 2.0;
    ok = ok && pucci_plus(SymMatrix::identity(2), 1.0, 2.0) == 4.0;
    ok = ok && pucci_minus(SymMatrix::diag2(1.0, -1.0), 1.0, 2.0) == -1.0;
    ok = ok && pucci_minus(SymMatrix::zero(2), 1.0, 2.0) == 0.0;
    ok = ok && pucci_plus(SymMatrix::diag1(-3.0), 1.0, 2.0) == -3.0;

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double dual = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const SymMatrix m{2, u(rng), u(rng), u(rng)};
        dual = std::max(dual,
                        std::abs(pucci_plus(m, 1.0, 2.0) + pucci_minus(-1.0 * m, 1.0, 2.0)));
    }
    ok = ok && dual <= 1e-12;
    d << "duality gap " << dual;

    const auto grid = make_grid(2, -1.0, 1.0, 9, 0.5, 0.1);
    for (const auto& spec : {OperatorSpec::make_pucci_minus({1.0, 2.0, {}}),
                             OperatorSpec::make_pucci_plus({1.0, 2.0, {}}),
                             OperatorSpec::make_laplacian()}) {
        ok = ok && check_uniform_parabolicity(spec, grid, 500, 41).pass;
        ok = ok && check_homogeneity(spec, grid, 500, 42).pass;
    }

    const PenalizationParams pen(0.5, 0.1);
    ok = ok && std::abs(alpha_of_gamma(0.5) - 1.0 / 3.0) <= 1e-15;
    ok = ok && beta_eps(0.004, pen) == 0.0;
    ok = ok && std::abs(beta_eps(0.06, pen) - 0.5) <= 1e-15;
    const double bound = source_bound(pen);
    double prev = -1.0;
    bool monotone = true, bounded = true;
    for (int i = 0; i <= 50000; ++i) {
        const double s = i * (4.0 * pen.tau_high()) / 50000.0;
        const double b = beta_eps(s, pen);
        monotone = monotone && b >= prev - 1e-12;
        bounded = bounded && b <= pen.gamma() + 1e-12 && source(s, pen) <= bound + 1e-12 &&
                  source(s, pen) >= 0.0 && (s > pen.tau_low() || source(s, pen) == 0.0);
        prev = b;
    }
    ok = ok && monotone && bounded;
    d << ", ramp monotone = " << monotone << ", source bounded = " << bounded;
    criterion(8, "operator and penalization unit suites", ok, d.str());
}

// 9. Stability of the measured Lipschitz constant across one refinement.
void criterion_lipschitz_stability(const std::vector<SolveResult>& runs) {
    const SolveResult& base257 = runs.empty() ? throw std::runtime_error("profile run unavailable")
                                              : runs.front();
    const std::vector<double> radii{0.25, 0.125, 0.0625, 0.03125};
    const auto& g1 = base257.u.grid();
    const double c1 =
        lipschitz_constant(base257.u, g1.nearest_node(0.0), g1.levels - 1, radii);

    const auto refined = solve(profile_config(513, 0.05));
    const auto& g2 = refined.u.grid();
    const double c2 = lipschitz_constant(refined.u, g2.nearest_node(0.0), g2.levels - 1, radii);

    const double drift = std::abs(c2 - c1) / c1;
    std::ostringstream d;
    d << "C(257) = " << c1 << ", C(513) = " << c2 << ", drift = " << drift;
    criterion(9, "Lipschitz constant drifts <= 25% under refinement", drift <= 0.25, d.str());
}

}  // namespace

int main() {
    std::vector<SolveResult> profile_runs;
    run_criterion(1, "exact-profile recovery", [&] { criterion_profile_recovery(profile_runs); });
    run_criterion(2, "gradient uniformity", [&] {
        criterion_gradient_uniformity(profile_runs, {0.05, 0.025});
    });
    run_criterion(3, "transform identity", [] { criterion_transform_identity(); });
    run_criterion(4, "scaling algebra", [] { criterion_scaling(); });
    run_criterion(5, "discrete comparison", [] { criterion_comparison(); });
    run_criterion(6, "barrier sandwich", [] { criterion_sandwich(); });
    run_criterion(7, "time oscillation", [] { criterion_time_oscillation(); });
    run_criterion(8, "unit suites", [] { criterion_unit_suites(); });
    run_criterion(9, "lipschitz stability", [&] { criterion_lipschitz_stability(profile_runs); });

    std::cout << (g_failures == 0 ? "ACCEPTANCE: all criteria pass"
                                  : "ACCEPTANCE: " + std::to_string(g_failures) +
                                        " criterion check(s) failed")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
