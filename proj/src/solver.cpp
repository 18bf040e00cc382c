#include "quench/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace quench {

double exact_profile(double x, double gamma, double x0) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("exact_profile: gamma must lie in (0,1)");
    }
    const double d = x - x0;
    if (d <= 0.0) return 0.0;
    const double p = 2.0 / (2.0 - gamma);
    const double c = std::pow(0.5 * (2.0 - gamma) * (2.0 - gamma), 1.0 / (2.0 - gamma));
    return c * std::pow(d, p);
}

double boundary_value(const BoundarySpec& bc, std::array<double, 2> x, int dim, double /*t*/,
                      const PenalizationParams& pen) {
    double v = 0.0;
    switch (bc.preset) {
        case BoundarySpec::Preset::PositiveConstant:
            v = 1.0;
            break;
        case BoundarySpec::Preset::Bump: {
            double r2 = x[0] * x[0];
            if (dim == 2) r2 += x[1] * x[1];
            const double q = std::max(0.0, 1.0 - r2);
            v = q * q;
            break;
        }
        case BoundarySpec::Preset::ExactProfile:
            v = exact_profile(x[0], pen.gamma(), bc.x0);
            break;
        default:
            throw std::invalid_argument("boundary_value: unknown preset");
    }
    if (bc.shift) v += pen.eps_pow();
    return v;
}

double cfl_dt(const SpaceTimeGrid& grid, const OperatorSpec& op, const PenalizationParams& pen,
              double safety, double source_safety) {
    if (!(safety > 0.0) || safety > 1.0) {
        throw std::invalid_argument("cfl_dt: safety must lie in (0,1]");
    }
    const double diffusion = grid.h * grid.h / (2.0 * grid.dim * op.ellipticity().Lambda);
    const double lip = source_lipschitz(pen);
    const double source_cap = lip > 0.0 ? source_safety / lip
                                        : std::numeric_limits<double>::infinity();
    const double dt = safety * std::min(diffusion, source_cap);
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::runtime_error("cfl_dt: produced a non-positive step");
    }
    return dt;
}

namespace {

double source_term(SourceMode mode, double value, const PenalizationParams& pen, double bound) {
    switch (mode) {
        case SourceMode::Penalized:
            return source(value, pen);
        case SourceMode::Zero:
            return 0.0;
        case SourceMode::ConstantBound:
            return bound;
    }
    return 0.0;
}

}  // namespace

void step_interior(const SolveConfig& cfg, SourceMode mode, double t_k, double dt,
                   std::span<const double> current, std::span<double> next) {
    const auto& g = cfg.grid;
    const double bound =
        mode == SourceMode::ConstantBound ? source_bound(cfg.pen) : 0.0;
    for (int node = 0; node < g.num_nodes(); ++node) {
        if (g.on_spatial_boundary(node)) continue;
        const SymMatrix hess = hessian_at(g, current, node);
        const double f = cfg.op.evaluate(g.point(node), g.dim, t_k, hess);
        const double s = source_term(mode, current[node], cfg.pen, bound);
        next[node] = current[node] + dt * (f - s);
    }
}

SolveResult solve_with_source(const SolveConfig& cfg, SourceMode mode) {
    const auto t_start = std::chrono::steady_clock::now();
    validate_coefficient_field(cfg.op, cfg.grid);
    if (cfg.max_stored_levels < 2) {
        throw std::invalid_argument("solve: max_stored_levels must be >= 2");
    }

    const double T = cfg.grid.horizon();
    const double dt_stable = cfl_dt(cfg.grid, cfg.op, cfg.pen, cfg.cfl_safety, cfg.source_safety);
    long steps = std::max<long>(1, long(std::ceil(T / dt_stable - 1e-12)));
    const int store_every = int((steps + cfg.max_stored_levels - 2) / (cfg.max_stored_levels - 1));
    steps = store_every * ((steps + store_every - 1) / store_every);
    if (steps > cfg.max_steps) {
        std::ostringstream msg;
        msg << "solve: required " << steps << " steps exceeds the cap " << cfg.max_steps;
        throw std::runtime_error(msg.str());
    }
    const double dt = T / double(steps);

    SpaceTimeGrid stored = cfg.grid;
    stored.dt = dt * store_every;
    stored.levels = int(steps / store_every) + 1;

    SolveResult result(stored);
    result.dt = dt;
    result.store_every = store_every;
    result.steps = steps;

    const auto& g = cfg.grid;
    const int n = g.num_nodes();
    std::vector<double> cur(n), nxt(n);

    const auto data_at = [&](int node, double t) {
        return boundary_value(cfg.boundary, g.point(node), g.dim, t, cfg.pen);
    };

    const double t0 = -T;
    for (int node = 0; node < n; ++node) cur[node] = data_at(node, t0);
    std::copy(cur.begin(), cur.end(), result.u.level(0).begin());
    result.min_value = *std::min_element(cur.begin(), cur.end());
    result.max_value = *std::max_element(cur.begin(), cur.end());

    for (long s = 1; s <= steps; ++s) {
        const double t_prev = dt * double(s - 1 - steps);  // exact zero at s == steps
        const double t_now = dt * double(s - steps);
        step_interior(cfg, mode, t_prev, dt, cur, nxt);
        for (int node = 0; node < n; ++node) {
            if (g.on_spatial_boundary(node)) nxt[node] = data_at(node, t_now);
            const double v = nxt[node];
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "solve: non-finite value at node " << node << ", step " << s << " (t = "
                    << t_now << "); the stability bound was likely violated";
                throw BlowupError(msg.str());
            }
            result.min_value = std::min(result.min_value, v);
            result.max_value = std::max(result.max_value, v);
        }
        if (s % store_every == 0) {
            std::copy(nxt.begin(), nxt.end(), result.u.level(int(s / store_every)).begin());
        }
        std::swap(cur, nxt);
    }

    if (cfg.compute_residuals) {
        const GridFunction res = residual_field(result.u, cfg, mode);
        result.level_max_residual.assign(stored.levels, 0.0);
        for (int k = 1; k < stored.levels; ++k) {
            double m = 0.0;
            const auto lv = res.level(k);
            for (int node = 0; node < n; ++node) m = std::max(m, std::abs(lv[node]));
            result.level_max_residual[k] = m;
            result.max_residual = std::max(result.max_residual, m);
        }
    }

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

SolveResult solve(const SolveConfig& cfg) { return solve_with_source(cfg, SourceMode::Penalized); }

GridFunction barrier_upper(const SolveConfig& cfg) {
    SolveConfig c = cfg;
    c.compute_residuals = false;
    return solve_with_source(c, SourceMode::Zero).u;
}

GridFunction barrier_lower(const SolveConfig& cfg) {
    SolveConfig c = cfg;
    c.compute_residuals = false;
    return solve_with_source(c, SourceMode::ConstantBound).u;
}

SandwichReport sandwich_check(const GridFunction& u, const GridFunction& lower,
                              const GridFunction& upper, double tol) {
    const auto& g = u.grid();
    for (const GridFunction* other : {&lower, &upper}) {
        if (other->grid().levels != g.levels || other->grid().num_nodes() != g.num_nodes()) {
            throw std::invalid_argument("sandwich_check: fields live on different grids");
        }
    }
    SandwichReport rep;
    for (int k = 0; k < g.levels; ++k) {
        for (int node = 0; node < g.num_nodes(); ++node) {
            const double below = lower.at(node, k) - u.at(node, k);
            const double above = u.at(node, k) - upper.at(node, k);
            if (below > rep.worst_lower) {
                rep.worst_lower = below;
                rep.worst_node = node;
                rep.worst_level = k;
            }
            if (above > rep.worst_upper) {
                rep.worst_upper = above;
                rep.worst_node = node;
                rep.worst_level = k;
            }
        }
    }
    rep.pass = rep.worst_lower <= tol && rep.worst_upper <= tol;
    return rep;
}

GridFunction residual_field(const GridFunction& traj, const SolveConfig& cfg, SourceMode mode) {
    const auto& g = traj.grid();
    if (g.levels < 2) {
        throw std::invalid_argument("residual_field: trajectory needs at least two levels");
    }
    const double bound =
        mode == SourceMode::ConstantBound ? source_bound(cfg.pen) : 0.0;
    GridFunction res(g);
    for (int k = 1; k < g.levels; ++k) {
        const auto cur = traj.level(k);
        const auto prev = traj.level(k - 1);
        const double t = g.time(k);
        for (int node = 0; node < g.num_nodes(); ++node) {
            if (g.on_spatial_boundary(node)) continue;
            const SymMatrix hess = hessian_at(g, cur, node);
            const double f = cfg.op.evaluate(g.point(node), g.dim, t, hess);
            const double dudt = (cur[node] - prev[node]) / g.dt;
            const double s = source_term(mode, cur[node], cfg.pen, bound);
            res.at(node, k) = std::abs(f - dudt - s);
        }
    }
    return res;
}

}  // namespace quench
