#include "quench/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace quench {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("make_grid: ") + name + " is not finite");
    }
}

}  // namespace

int SpaceTimeGrid::nearest_node(double x, double y) const {
    const auto clamp_index = [this](double c) {
        int i = int(std::lround((c - a) / h));
        return std::clamp(i, 0, nodes_per_axis - 1);
    };
    const int i = clamp_index(x);
    return dim == 1 ? i : flatten(i, clamp_index(y));
}

SpaceTimeGrid make_grid(int dim, double a, double b, int nodes_per_axis, double T, double dt) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("make_grid: dim must be 1 or 2");
    require_finite(a, "a");
    require_finite(b, "b");
    require_finite(T, "T");
    require_finite(dt, "dt");
    if (!(a < b)) throw std::invalid_argument("make_grid: requires a < b");
    if (nodes_per_axis < 3) throw std::invalid_argument("make_grid: requires N >= 3");
    if (!(T > 0.0)) throw std::invalid_argument("make_grid: requires T > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("make_grid: requires dt > 0");

    SpaceTimeGrid g;
    g.dim = dim;
    g.a = a;
    g.b = b;
    g.nodes_per_axis = nodes_per_axis;
    g.h = (b - a) / double(nodes_per_axis - 1);

    // Round dt down so the last level lands exactly on t = 0.
    const int steps = std::max(1, int(std::ceil(T / dt - 1e-12)));
    g.dt = T / double(steps);
    g.levels = steps + 1;
    return g;
}

bool GridFunction::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double GridFunction::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double GridFunction::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

std::array<double, 2> gradient_at(const SpaceTimeGrid& grid, std::span<const double> values,
                                  int node) {
    if (grid.on_spatial_boundary(node)) {
        throw std::invalid_argument("gradient_at: node lies on the spatial boundary");
    }
    const auto [i, j] = grid.unflatten(node);
    const double inv2h = 1.0 / (2.0 * grid.h);
    std::array<double, 2> g{0.0, 0.0};
    g[0] = (values[grid.flatten(i + 1, j)] - values[grid.flatten(i - 1, j)]) * inv2h;
    if (grid.dim == 2) {
        g[1] = (values[grid.flatten(i, j + 1)] - values[grid.flatten(i, j - 1)]) * inv2h;
    }
    return g;
}

SymMatrix hessian_at(const SpaceTimeGrid& grid, std::span<const double> values, int node) {
    if (grid.on_spatial_boundary(node)) {
        throw std::invalid_argument("hessian_at: node lies on the spatial boundary");
    }
    const auto [i, j] = grid.unflatten(node);
    const double invh2 = 1.0 / (grid.h * grid.h);
    const double c = values[node];
    SymMatrix m = SymMatrix::zero(grid.dim);
    m.xx = (values[grid.flatten(i + 1, j)] - 2.0 * c + values[grid.flatten(i - 1, j)]) * invh2;
    if (grid.dim == 2) {
        m.yy = (values[grid.flatten(i, j + 1)] - 2.0 * c + values[grid.flatten(i, j - 1)]) * invh2;
        m.xy = (values[grid.flatten(i + 1, j + 1)] - values[grid.flatten(i + 1, j - 1)] -
                values[grid.flatten(i - 1, j + 1)] + values[grid.flatten(i - 1, j - 1)]) *
               (0.25 * invh2);
    }
    return m;
}

std::array<double, 2> discrete_gradient(const GridFunction& gf, int node, int level) {
    return gradient_at(gf.grid(), gf.level(level), node);
}

SymMatrix discrete_hessian(const GridFunction& gf, int node, int level) {
    return hessian_at(gf.grid(), gf.level(level), node);
}

std::vector<std::pair<int, int>> cylinder_nodes(const SpaceTimeGrid& grid, const Cylinder& cyl) {
    if (!(cyl.radius > 0.0)) throw std::invalid_argument("cylinder_nodes: radius must be positive");
    if (cyl.center_level < 0 || cyl.center_level >= grid.levels) {
        throw std::invalid_argument("cylinder_nodes: center level out of range");
    }

    const auto center = grid.point(cyl.center_node);
    const double rho = cyl.radius;
    const double s = grid.time(cyl.center_level);
    const double xtol = 1e-12 * (std::abs(grid.b - grid.a) + 1.0);

    // The closed ball must sit strictly inside the spatial box.
    for (int axis = 0; axis < std::min(grid.dim, 2); ++axis) {
        const std::string label = axis == 0 ? "x" : "y";
        if (center[axis] - rho <= grid.a + xtol) {
            throw std::invalid_argument("cylinder_nodes: cylinder escapes face " + label +
                                        "_min");
        }
        if (center[axis] + rho >= grid.b - xtol) {
            throw std::invalid_argument("cylinder_nodes: cylinder escapes face " + label +
                                        "_max");
        }
    }
    const double t_floor = s - rho * rho;
    const double ttol = 1e-12 * (1.0 + rho * rho + std::abs(s));
    if (t_floor < grid.time(0) - ttol) {
        throw std::invalid_argument("cylinder_nodes: cylinder escapes face t_min");
    }

    // First level strictly above s - rho^2 (the time interval is half-open).
    int k_lo = cyl.center_level;
    while (k_lo > 0 && grid.time(k_lo - 1) - t_floor > ttol) --k_lo;

    const double r2 = rho * rho * (1.0 + 1e-12) + 1e-300;
    std::vector<std::pair<int, int>> out;
    const int n = grid.nodes_per_axis;
    const int ic = grid.unflatten(cyl.center_node)[0];
    const int jc = grid.unflatten(cyl.center_node)[1];
    const int span = int(std::floor(rho / grid.h)) + 1;
    for (int k = k_lo; k <= cyl.center_level; ++k) {
        if (grid.dim == 1) {
            for (int i = std::max(0, ic - span); i <= std::min(n - 1, ic + span); ++i) {
                const double dx = grid.coord(i) - center[0];
                if (dx * dx <= r2) out.emplace_back(i, k);
            }
        } else {
            for (int j = std::max(0, jc - span); j <= std::min(n - 1, jc + span); ++j) {
                const double dy = grid.coord(j) - center[1];
                for (int i = std::max(0, ic - span); i <= std::min(n - 1, ic + span); ++i) {
                    const double dx = grid.coord(i) - center[0];
                    if (dx * dx + dy * dy <= r2) out.emplace_back(grid.flatten(i, j), k);
                }
            }
        }
    }
    return out;
}

}  // namespace quench
