#include "quench/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace quench {

GridFunction transform_v(const GridFunction& u, double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("transform_v: gamma must lie in (0,1)");
    }
    const auto& g = u.grid();
    const double p = 0.5 * (2.0 - gamma);
    GridFunction v(g);
    for (int k = 0; k < g.levels; ++k) {
        const auto src = u.level(k);
        auto dst = v.level(k);
        for (int node = 0; node < g.num_nodes(); ++node) {
            const double val = src[node];
            if (val < 0.0) {
                std::ostringstream msg;
                msg << "transform_v: negative value " << val << " at node " << node << ", level "
                    << k;
                throw std::invalid_argument(msg.str());
            }
            dst[node] = val == 0.0 ? 0.0 : std::pow(val, p);
        }
    }
    return v;
}

std::vector<AnalyticFunction> analytic_catalog() {
    return {
        {"constant_two", 1, [](double, double, double) { return 2.0; }},
        {"two_plus_sin_cos", 1,
         [](double x, double, double t) { return 2.0 + std::sin(x) * std::cos(t); }},
        {"exp_xy", 2, [](double x, double y, double) { return std::exp(x * y); }},
    };
}

namespace {

// Samples a dim-d stencil of fn around (x, y) at fixed t: center, axis
// neighbours at +-h, and (for dim 2) the four corners.
struct Stencil {
    double c = 0.0;
    double xp = 0.0, xm = 0.0;
    double yp = 0.0, ym = 0.0;
    double pp = 0.0, pm = 0.0, mp = 0.0, mm = 0.0;
};

Stencil sample(const AnalyticFunction& fn, double x, double y, double t, double h) {
    Stencil s;
    s.c = fn.f(x, y, t);
    s.xp = fn.f(x + h, y, t);
    s.xm = fn.f(x - h, y, t);
    if (fn.dim == 2) {
        s.yp = fn.f(x, y + h, t);
        s.ym = fn.f(x, y - h, t);
        s.pp = fn.f(x + h, y + h, t);
        s.pm = fn.f(x + h, y - h, t);
        s.mp = fn.f(x - h, y + h, t);
        s.mm = fn.f(x - h, y - h, t);
    }
    return s;
}

Stencil map(const Stencil& s, const std::function<double(double)>& op) {
    Stencil r;
    r.c = op(s.c);
    r.xp = op(s.xp);
    r.xm = op(s.xm);
    r.yp = op(s.yp);
    r.ym = op(s.ym);
    r.pp = op(s.pp);
    r.pm = op(s.pm);
    r.mp = op(s.mp);
    r.mm = op(s.mm);
    return r;
}

std::array<double, 2> stencil_gradient(const Stencil& s, int dim, double h) {
    std::array<double, 2> g{(s.xp - s.xm) / (2.0 * h), 0.0};
    if (dim == 2) g[1] = (s.yp - s.ym) / (2.0 * h);
    return g;
}

SymMatrix stencil_hessian(const Stencil& s, int dim, double h) {
    const double invh2 = 1.0 / (h * h);
    SymMatrix m = SymMatrix::zero(dim);
    m.xx = (s.xp - 2.0 * s.c + s.xm) * invh2;
    if (dim == 2) {
        m.yy = (s.yp - 2.0 * s.c + s.ym) * invh2;
        m.xy = (s.pp - s.pm - s.mp + s.mm) * (0.25 * invh2);
    }
    return m;
}

}  // namespace

double transform_identity_residual(const AnalyticFunction& u, std::array<double, 3> point,
                                   double h, double gamma) {
    if (gamma < 0.0 || gamma >= 1.0) {
        throw std::invalid_argument("transform_identity_residual: gamma must lie in [0,1)");
    }
    if (!(h > 0.0)) throw std::invalid_argument("transform_identity_residual: h must be positive");
    const double alpha = gamma / (2.0 - gamma);
    const double power = 0.5 * (2.0 - gamma);

    const Stencil su = sample(u, point[0], point[1], point[2], h);
    const bool positive =
        u.dim == 1 ? (su.c > 0.0 && su.xp > 0.0 && su.xm > 0.0)
                   : (su.c > 0.0 && su.xp > 0.0 && su.xm > 0.0 && su.yp > 0.0 && su.ym > 0.0 &&
                      su.pp > 0.0 && su.pm > 0.0 && su.mp > 0.0 && su.mm > 0.0);
    if (!positive) {
        throw std::invalid_argument("transform_identity_residual: u <= 0 on the stencil");
    }

    const Stencil sv = map(su, [power](double w) { return std::pow(w, power); });

    const auto grad_v = stencil_gradient(sv, u.dim, h);
    const SymMatrix hess_v = stencil_hessian(sv, u.dim, h);
    const SymMatrix hess_u = stencil_hessian(su, u.dim, h);
    const double v0 = sv.c;

    SymMatrix lhs = hess_v;
    lhs += (alpha / v0) * SymMatrix::outer(std::span<const double>(grad_v), u.dim);
    const SymMatrix rhs =
        (std::pow(su.c, 1.0 - gamma) / ((1.0 + alpha) * v0)) * hess_u;
    return (lhs - rhs).frobenius();
}

double implied_penalization_f(double v_value, const PenalizationParams& pen) {
    if (v_value < 0.0) {
        throw std::invalid_argument("implied_penalization_f: v must be nonnegative");
    }
    const double u = std::pow(v_value, 1.0 + pen.alpha());
    return beta_eps(u, pen) / (1.0 + pen.alpha());
}

GridFunction general_eq_residual(const GridFunction& v, const GeneralEqSpec& spec) {
    const auto& g = v.grid();
    if (g.levels < 2) {
        throw std::invalid_argument("general_eq_residual: needs at least two levels");
    }
    if (spec.f_kind == GeneralEqSpec::SourceF::PenalizationImplied && !spec.pen) {
        throw std::invalid_argument("general_eq_residual: implied source requires parameters");
    }
    GridFunction res(g);
    for (int k = 1; k < g.levels; ++k) {
        const auto cur = v.level(k);
        const auto prev = v.level(k - 1);
        const double t = g.time(k);
        for (int node = 0; node < g.num_nodes(); ++node) {
            if (g.on_spatial_boundary(node)) continue;
            const double vc = cur[node];
            if (!(vc > 0.0)) {
                std::ostringstream msg;
                msg << "general_eq_residual: v <= 0 at node " << node << ", level " << k;
                throw std::invalid_argument(msg.str());
            }
            const auto grad = gradient_at(g, cur, node);
            SymMatrix arg = hessian_at(g, cur, node);
            arg += (spec.delta / vc) * SymMatrix::outer(std::span<const double>(grad), g.dim);
            const double lhs = spec.op.evaluate(g.point(node), g.dim, t, arg);
            const double dvdt = (cur[node] - prev[node]) / g.dt;
            double f = 0.0;
            switch (spec.f_kind) {
                case GeneralEqSpec::SourceF::Zero:
                    break;
                case GeneralEqSpec::SourceF::Constant:
                    f = spec.f_value;
                    break;
                case GeneralEqSpec::SourceF::PenalizationImplied:
                    f = implied_penalization_f(vc, *spec.pen);
                    break;
            }
            res.at(node, k) = std::abs(lhs - dvdt - f / vc);
        }
    }
    return res;
}

GridFunction rescale_field(const GridFunction& v, const RescaleParams& rp) {
    const auto& g = v.grid();
    if (!(rp.kappa > 0.0) || rp.kappa > 1.0) {
        throw std::invalid_argument("rescale_field: kappa must lie in (0,1]");
    }
    const double log2k = std::log2(rp.kappa);
    const int m = int(std::lround(-log2k));
    if (std::abs(log2k + m) > 1e-12) {
        throw std::invalid_argument("rescale_field: kappa must be dyadic 2^-m");
    }
    if (g.a > 0.0 || g.b < 0.0) {
        throw std::invalid_argument("rescale_field: domain must contain the origin");
    }
    const int stride_x = 1 << m;
    const int stride_t = 1 << (2 * m);

    // kappa * x'_i must land on original nodes: offset = a(kappa-1)/h.
    const double off_real = g.a * (rp.kappa - 1.0) / g.h;
    const int off = int(std::lround(off_real));
    if (std::abs(off_real - off) > 1e-9) {
        throw std::invalid_argument("rescale_field: grid is not aligned for this kappa");
    }
    if ((g.nodes_per_axis - 1) % stride_x != 0) {
        throw std::invalid_argument("rescale_field: node count is not divisible for this kappa");
    }

    SpaceTimeGrid out = g;
    out.nodes_per_axis = (g.nodes_per_axis - 1) / stride_x + 1;
    out.h = g.h / rp.kappa;
    out.dt = g.dt * double(stride_t);
    // In-place use: the stretched slab (-T/kappa^2, 0] is truncated to the
    // original horizon, so each new level consumes one original level.
    out.levels = (g.levels - 1) / stride_t + 1;
    if (out.nodes_per_axis < 3 || out.levels < 2) {
        throw std::invalid_argument("rescale_field: grid too small for this kappa");
    }

    const double scale = std::pow(rp.kappa, -rp.theta);
    GridFunction w(out);
    for (int k = 0; k < out.levels; ++k) {
        // Map from the top so t = 0 stays anchored; kappa^2 dt' = dt exactly.
        const int src_level = (g.levels - 1) - (out.levels - 1 - k);
        const auto src = v.level(src_level);
        auto dst = w.level(k);
        if (out.dim == 1) {
            for (int i = 0; i < out.nodes_per_axis; ++i) dst[i] = src[off + i] * scale;
        } else {
            for (int j = 0; j < out.nodes_per_axis; ++j) {
                for (int i = 0; i < out.nodes_per_axis; ++i) {
                    dst[out.flatten(i, j)] = src[g.flatten(off + i, off + j)] * scale;
                }
            }
        }
    }
    return w;
}

double rescaled_source_exponent(double theta, double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("rescaled_source_exponent: gamma must lie in (0,1)");
    }
    if (theta < 0.0) throw std::invalid_argument("rescaled_source_exponent: theta must be >= 0");
    return theta * (gamma - 1.0) + 2.0 - theta;
}

double rescaled_epsilon(double eps, double kappa, double theta, double gamma) {
    const double alpha = alpha_of_gamma(gamma);
    return eps * std::pow(kappa, -theta / (1.0 + alpha));
}

OrderingReport comparison_trial(const SpaceTimeFn& sub_data, const SpaceTimeFn& super_data,
                                const ComparisonTrialConfig& cfg) {
    const auto& g = cfg.grid;
    if (!(cfg.lambda > 0.0) || cfg.Lambda < cfg.lambda || cfg.c < 0.0) {
        throw std::invalid_argument("comparison_trial: invalid operator parameters");
    }
    const int n = g.num_nodes();
    const double T = g.horizon();
    const double t0 = -T;

    OrderingReport rep;
    rep.worst_gap = -std::numeric_limits<double>::infinity();

    std::vector<double> sub(n), sup(n), sub_next(n), sup_next(n);
    for (int node = 0; node < n; ++node) {
        const auto x = g.point(node);
        sub[node] = sub_data(x, t0);
        sup[node] = super_data(x, t0);
        if (sub[node] > sup[node] + 1e-14) {
            throw std::invalid_argument("comparison_trial: data not ordered at the initial level");
        }
        const double gap = sub[node] - sup[node];
        if (gap > rep.worst_gap) {
            rep.worst_gap = gap;
            rep.worst_node = node;
            rep.worst_time = t0;
        }
    }

    const auto pucci = [&](const SymMatrix& m) {
        return cfg.sign == PucciSign::Plus ? pucci_plus(m, cfg.lambda, cfg.Lambda)
                                           : pucci_minus(m, cfg.lambda, cfg.Lambda);
    };
    const auto velocity = [&](std::span<const double> v, int node) {
        const SymMatrix hess = hessian_at(g, v, node);
        double rate = pucci(hess) + cfg.forcing;
        if (cfg.c > 0.0) {
            const auto grad = gradient_at(g, v, node);
            rate += cfg.c * (grad[0] * grad[0] + grad[1] * grad[1]);
        }
        return rate;
    };
    const auto max_gradient = [&](std::span<const double> v) {
        double gmax = 0.0;
        for (int node = 0; node < n; ++node) {
            if (g.on_spatial_boundary(node)) continue;
            const auto grad = gradient_at(g, v, node);
            gmax = std::max(gmax, std::hypot(grad[0], grad[1]));
        }
        return gmax;
    };

    const double diffusion_dt = g.h * g.h / (2.0 * g.dim * cfg.Lambda);
    double t = t0;
    while (t < -1e-15) {
        double dt = cfg.cfl_safety * diffusion_dt;
        if (cfg.c > 0.0) {
            const double gsup = std::max(max_gradient(sub), max_gradient(sup));
            if (cfg.c * gsup * g.h > cfg.lambda) {
                throw std::runtime_error(
                    "comparison_trial: gradient too steep for the monotone stencil at this h");
            }
            if (gsup > 0.0) {
                dt = std::min(dt, cfg.cfl_safety * g.h / (2.0 * cfg.c * gsup));
            }
        }
        dt = std::min(dt, -t);
        const double t_next = (-t - dt < 1e-15) ? 0.0 : t + dt;

        for (int node = 0; node < n; ++node) {
            if (g.on_spatial_boundary(node)) {
                const auto x = g.point(node);
                sub_next[node] = sub_data(x, t_next);
                sup_next[node] = super_data(x, t_next);
                if (sub_next[node] > sup_next[node] + 1e-14) {
                    throw std::invalid_argument(
                        "comparison_trial: data not ordered on the spatial boundary");
                }
            } else {
                sub_next[node] = sub[node] + dt * velocity(sub, node);
                sup_next[node] = sup[node] + dt * velocity(sup, node);
            }
            if (!std::isfinite(sub_next[node]) || !std::isfinite(sup_next[node])) {
                throw BlowupError("comparison_trial: non-finite value during evolution");
            }
            const double gap = sub_next[node] - sup_next[node];
            if (gap > rep.worst_gap) {
                rep.worst_gap = gap;
                rep.worst_node = node;
                rep.worst_time = t_next;
            }
        }
        std::swap(sub, sub_next);
        std::swap(sup, sup_next);
        t = t_next;
        ++rep.steps;
        if (rep.steps > 50'000'000) {
            throw std::runtime_error("comparison_trial: step cap exceeded");
        }
    }
    rep.pass = rep.worst_gap <= 1e-8;
    return rep;
}

TimeBarrierParams make_time_barrier_params(double L, double K, double c1, double c2, double M,
                                           int n, double Lambda) {
    if (!(L > 1.0)) throw std::invalid_argument("time barrier: requires L > 1");
    if (K < 0.0 || c1 < 0.0 || c2 < 0.0 || M < 0.0) {
        throw std::invalid_argument("time barrier: parameters must be nonnegative");
    }
    TimeBarrierParams p;
    p.L = L;
    p.K = K;
    p.c1 = c1;
    p.c2 = c2;
    p.M = M;
    p.n = n;
    p.Lambda = Lambda;
    p.Kbar = 2.0 * n * Lambda * K + 4.0 * c1 * K * K + M;
    return p;
}

std::pair<GridFunction, GridFunction> time_barrier(double v0_at_center,
                                                   const TimeBarrierParams& tbp, double tau1,
                                                   const SpaceTimeGrid& grid) {
    GridFunction hplus(grid), hminus(grid);
    for (int k = 0; k < grid.levels; ++k) {
        const double t = grid.time(k);
        for (int node = 0; node < grid.num_nodes(); ++node) {
            const auto x = grid.point(node);
            const double r2 = x[0] * x[0] + x[1] * x[1];
            const double bulge = tbp.L + tbp.K * r2 + tbp.Kbar * (t - tau1);
            hplus.at(node, k) = v0_at_center + bulge;
            hminus.at(node, k) = v0_at_center - bulge;
        }
    }
    return {hminus, hplus};
}

double kappa0(double L, double M, int n, double Lambda, double c1) {
    if (!(L > 1.0)) throw std::invalid_argument("kappa0: requires L > 1");
    const double denom = M + 4.0 * n * Lambda * L + 16.0 * c1 * L * L;
    return 0.25 * std::min(1.0, 2.0 * L / denom);
}

double kappa0_quotient(double C, double f_inf, int n, double Lambda, double delta) {
    if (!(C > 0.0)) throw std::invalid_argument("kappa0_quotient: requires C > 0");
    const double denom = f_inf + 16.0 * n * Lambda * C + 64.0 * delta * Lambda * C * C;
    return 0.25 * std::min(1.0, 8.0 * C / denom);
}

TimeOscReport time_oscillation_check(const GridFunction& v, int n, double Lambda, double c1,
                                     double M) {
    const auto& g = v.grid();
    const int center = g.nearest_node(0.5 * (g.a + g.b), 0.5 * (g.a + g.b));
    const int top = g.levels - 1;

    // Spatial oscillation around the center column over the recent window.
    const double window = std::min(g.horizon(), 0.25);
    double osc_space = 0.0;
    for (int k = top; k >= 0 && -g.time(k) <= window + 1e-12; --k) {
        const auto lv = v.level(k);
        const double vc = lv[center];
        for (int node = 0; node < g.num_nodes(); ++node) {
            osc_space = std::max(osc_space, std::abs(lv[node] - vc));
        }
    }

    TimeOscReport rep;
    rep.spatial_bound = std::max(osc_space, 1.0 + 1e-9);  // the bound is stated for L > 1
    rep.kappa0 = kappa0(rep.spatial_bound, M, n, Lambda, c1);

    const double v00 = v.at(center, top);
    for (int k = top; k >= 0; --k) {
        if (-g.time(k) > rep.kappa0 + 1e-12) break;
        rep.center_oscillation = std::max(rep.center_oscillation, std::abs(v00 - v.at(center, k)));
    }
    rep.pass = rep.center_oscillation <= 8.0 * rep.spatial_bound + 1e-6;
    return rep;
}

}  // namespace quench
