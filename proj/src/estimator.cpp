#include "quench/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace quench {

double oscillation(const GridFunction& gf, const Cylinder& cyl) {
    const double center = gf.at(cyl.center_node, cyl.center_level);
    double osc = 0.0;
    for (const auto& [node, level] : cylinder_nodes(gf.grid(), cyl)) {
        osc = std::max(osc, std::abs(gf.at(node, level) - center));
    }
    return osc;
}

double plane_oscillation(const GridFunction& gf, const Cylinder& cyl) {
    const auto& g = gf.grid();
    if (g.on_spatial_boundary(cyl.center_node)) {
        throw std::invalid_argument("plane_oscillation: center too close to the boundary");
    }
    const auto grad = discrete_gradient(gf, cyl.center_node, cyl.center_level);
    const auto yc = g.point(cyl.center_node);
    const double center = gf.at(cyl.center_node, cyl.center_level);
    double osc = 0.0;
    for (const auto& [node, level] : cylinder_nodes(g, cyl)) {
        const auto x = g.point(node);
        const double plane =
            center + grad[0] * (x[0] - yc[0]) + (g.dim == 2 ? grad[1] * (x[1] - yc[1]) : 0.0);
        osc = std::max(osc, std::abs(gf.at(node, level) - plane));
    }
    return osc;
}

ExponentFit fit_exponent(std::span<const double> radii, std::span<const double> values,
                         double reference) {
    if (radii.size() != values.size()) {
        throw std::invalid_argument("fit_exponent: radii and values must pair up");
    }
    ExponentFit fit;
    fit.reference = reference;
    std::vector<double> lx, ly;
    for (size_t i = 0; i < radii.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i]) || !(radii[i] > 0.0)) {
            ++fit.excluded;
            continue;
        }
        fit.radii.push_back(radii[i]);
        fit.values.push_back(values[i]);
        lx.push_back(std::log(radii[i]));
        ly.push_back(std::log(values[i]));
    }
    const size_t n = lx.size();
    if (n < 3) {
        throw std::invalid_argument("fit_exponent: fewer than 3 usable points");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = double(n) * sxx - sx * sx;
    fit.slope = (double(n) * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / double(n);
    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / double(n);
    for (size_t i = 0; i < n; ++i) {
        const double pred = fit.intercept + fit.slope * lx[i];
        ss_res += (ly[i] - pred) * (ly[i] - pred);
        ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
    }
    fit.r2 = ss_tot > 1e-30 ? 1.0 - ss_res / ss_tot : 1.0;
    if (!std::isfinite(fit.slope)) {
        throw std::runtime_error("fit_exponent: fit produced a non-finite slope");
    }
    return fit;
}

std::vector<double> dyadic_radii(const SpaceTimeGrid& grid, int count, int m_start) {
    std::vector<double> out;
    const double half = 0.5 * (grid.b - grid.a);
    for (int m = m_start; int(out.size()) < count; ++m) {
        const double rho = half * std::pow(2.0, -m);
        if (rho < 4.0 * grid.h - 1e-12) break;
        out.push_back(rho);
    }
    return out;
}

namespace {

std::vector<int> inner_half_domain(const SpaceTimeGrid& g) {
    std::vector<int> nodes;
    const double cx = 0.5 * (g.a + g.b);
    const double quarter = 0.25 * (g.b - g.a);
    const double r2 = quarter * quarter * (1.0 + 1e-12);
    for (int node = 0; node < g.num_nodes(); ++node) {
        const auto x = g.point(node);
        const double dx = x[0] - cx;
        const double dy = g.dim == 2 ? x[1] - cx : 0.0;
        if (dx * dx + dy * dy <= r2) nodes.push_back(node);
    }
    return nodes;
}

}  // namespace

double spatial_holder_quotient(const GridFunction& v, double mu, int level) {
    if (!(mu > 0.0) || !(mu < 1.0)) {
        throw std::invalid_argument("spatial_holder_quotient: mu must lie in (0,1)");
    }
    const auto& g = v.grid();
    const auto nodes = inner_half_domain(g);
    const auto lv = v.level(level);
    double q = 0.0;
    for (size_t i = 0; i < nodes.size(); ++i) {
        const auto xi = g.point(nodes[i]);
        for (size_t j = i + 1; j < nodes.size(); ++j) {
            const auto xj = g.point(nodes[j]);
            const double dist = std::hypot(xi[0] - xj[0], xi[1] - xj[1]);
            q = std::max(q, std::abs(lv[nodes[i]] - lv[nodes[j]]) / std::pow(dist, mu));
        }
    }
    return q;
}

double temporal_holder_quotient(const GridFunction& v, double mu, int node, double kappa0) {
    if (!(mu > 0.0) || !(mu < 1.0)) {
        throw std::invalid_argument("temporal_holder_quotient: mu must lie in (0,1)");
    }
    const auto& g = v.grid();
    const double window = 0.5 * kappa0;
    std::vector<int> levels;
    for (int k = g.levels - 1; k >= 0; --k) {
        if (-g.time(k) > window + 1e-12) break;
        levels.push_back(k);
    }
    const int stride = std::max<int>(1, int(levels.size()) / 512);
    std::vector<int> kept;
    for (size_t i = 0; i < levels.size(); i += stride) kept.push_back(levels[i]);
    double q = 0.0;
    for (size_t i = 0; i < kept.size(); ++i) {
        for (size_t j = i + 1; j < kept.size(); ++j) {
            const double gap = std::abs(g.time(kept[i]) - g.time(kept[j]));
            if (gap <= 0.0) continue;
            q = std::max(q, std::abs(v.at(node, kept[i]) - v.at(node, kept[j])) /
                                std::pow(gap, 0.5 * mu));
        }
    }
    return q;
}

double gradient_bound_ratio(const GridFunction& u, double theta, double floor) {
    if (!(floor > 0.0)) {
        throw std::invalid_argument("gradient_bound_ratio: floor must be positive");
    }
    const auto& g = u.grid();
    const auto nodes = inner_half_domain(g);
    const double t_window = 0.5 * g.horizon();
    double ratio = -1.0;
    for (int k = g.levels - 1; k >= 0; --k) {
        if (-g.time(k) > t_window + 1e-12) break;
        const auto lv = u.level(k);
        for (int node : nodes) {
            if (g.on_spatial_boundary(node)) continue;
            if (!(lv[node] > floor)) continue;
            const auto grad = gradient_at(g, lv, node);
            const double g2 = grad[0] * grad[0] + grad[1] * grad[1];
            ratio = std::max(ratio, g2 / std::pow(lv[node], theta));
        }
    }
    if (ratio < 0.0) {
        throw std::runtime_error("gradient_bound_ratio: no nodes above the floor");
    }
    return ratio;
}

bool FreeBoundarySet::empty() const {
    return std::all_of(nodes_per_level.begin(), nodes_per_level.end(),
                       [](const auto& v) { return v.empty(); });
}

FreeBoundarySet detect_free_boundary(const GridFunction& u, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("detect_free_boundary: tau must be positive");
    const auto& g = u.grid();
    FreeBoundarySet fb;
    fb.threshold = tau;
    fb.nodes_per_level.resize(g.levels);
    const auto crosses = [&](std::span<const double> lv, int node) {
        const auto [i, j] = g.unflatten(node);
        const bool below = lv[node] <= tau;
        const int n = g.nodes_per_axis;
        const auto differs = [&](int ii, int jj) {
            const bool nb_below = lv[g.flatten(ii, jj)] <= tau;
            return nb_below != below;
        };
        if (i > 0 && differs(i - 1, j)) return true;
        if (i < n - 1 && differs(i + 1, j)) return true;
        if (g.dim == 2 && j > 0 && differs(i, j - 1)) return true;
        if (g.dim == 2 && j < n - 1 && differs(i, j + 1)) return true;
        return false;
    };
    for (int k = 0; k < g.levels; ++k) {
        const auto lv = u.level(k);
        for (int node = 0; node < g.num_nodes(); ++node) {
            if (crosses(lv, node)) fb.nodes_per_level[k].push_back(node);
        }
    }
    return fb;
}

int pick_free_boundary_node(const GridFunction& u, const FreeBoundarySet& fb, int level) {
    const auto& g = u.grid();
    const auto& nodes = fb.nodes_per_level[level];
    const double cx = 0.5 * (g.a + g.b);
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int node : nodes) {
        if (u.at(node, level) > fb.threshold) continue;  // keep the dead side
        const auto x = g.point(node);
        const double dy = g.dim == 2 ? x[1] - cx : 0.0;
        const double dist = std::hypot(x[0] - cx, dy);
        if (dist < best_dist) {
            best_dist = dist;
            best = node;
        }
    }
    return best;
}

ExponentFit fb_growth(const GridFunction& u, int fb_node, int fb_level,
                      std::span<const double> radii, double reference) {
    std::vector<double> sups;
    sups.reserve(radii.size());
    for (double rho : radii) {
        double s = 0.0;
        for (const auto& [node, level] : cylinder_nodes(u.grid(), {fb_node, fb_level, rho})) {
            s = std::max(s, u.at(node, level));
        }
        sups.push_back(s);
    }
    return fit_exponent(radii, sups, reference);
}

double lipschitz_constant(const GridFunction& u, int center_node, int center_level,
                          std::span<const double> radii) {
    double c = 0.0;
    for (double rho : radii) {
        c = std::max(c, oscillation(u, {center_node, center_level, rho}) / rho);
    }
    return c;
}

GrowthCheck growth_envelope_check(const GridFunction& u, int center_node, int center_level,
                                  double c_hat, double mu, double alpha,
                                  std::span<const double> radii) {
    GrowthCheck check;
    const double u0 = std::max(0.0, u.at(center_node, center_level));
    const double root = std::pow(u0, 1.0 / (1.0 + alpha));
    for (double rho : radii) {
        double sup = 0.0;
        for (const auto& [node, level] : cylinder_nodes(u.grid(), {center_node, center_level, rho})) {
            sup = std::max(sup, u.at(node, level));
        }
        const double envelope = std::pow(c_hat * std::pow(rho, mu) + root, 1.0 + alpha);
        check.lhs.push_back(sup);
        check.rhs.push_back(envelope);
        check.worst_excess = std::max(check.worst_excess, sup - envelope);
    }
    check.pass = check.worst_excess <= 1e-9;
    return check;
}

}  // namespace quench
