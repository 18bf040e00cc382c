#pragma once

#include "quench/sym_matrix.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace quench {

/// Uniform tensor grid on [a,b]^d (d = 1 or 2) covering the time slab (-T, 0],
/// with the final stored level exactly at t = 0.
///
/// Node coordinates and level times are pure functions of the indices, so a
/// grid is fully reproducible from its scalar fields.
struct SpaceTimeGrid {
    int dim = 1;
    double a = -1.0;
    double b = 1.0;
    int nodes_per_axis = 3;
    double h = 1.0;
    double dt = 1.0;
    int levels = 2;

    int num_nodes() const { return dim == 1 ? nodes_per_axis : nodes_per_axis * nodes_per_axis; }

    /// Axis coordinate of index i; exact at both endpoints.
    double coord(int i) const {
        const int n = nodes_per_axis - 1;
        return (a * double(n - i) + b * double(i)) / double(n);
    }

    int flatten(int i, int j) const { return dim == 1 ? i : i + j * nodes_per_axis; }

    std::array<int, 2> unflatten(int node) const {
        if (dim == 1) return {node, 0};
        return {node % nodes_per_axis, node / nodes_per_axis};
    }

    std::array<double, 2> point(int node) const {
        const auto ij = unflatten(node);
        return {coord(ij[0]), dim == 2 ? coord(ij[1]) : 0.0};
    }

    double time(int level) const { return -dt * double(levels - 1 - level); }

    double horizon() const { return dt * double(levels - 1); }

    bool on_spatial_boundary(int node) const {
        const auto ij = unflatten(node);
        if (ij[0] == 0 || ij[0] == nodes_per_axis - 1) return true;
        if (dim == 2 && (ij[1] == 0 || ij[1] == nodes_per_axis - 1)) return true;
        return false;
    }

    bool interior(int node) const { return !on_spatial_boundary(node); }

    /// Index of the grid node nearest to (x, y).
    int nearest_node(double x, double y = 0.0) const;
};

/// Builds a grid with h = (b-a)/(N-1) and ceil(T/dt)+1 time levels. The time
/// step is rounded down if needed so that an integer number of steps lands
/// exactly on t = 0.
SpaceTimeGrid make_grid(int dim, double a, double b, int nodes_per_axis, double T, double dt);

/// Real-valued field sampled on every (node, level) of a SpaceTimeGrid.
class GridFunction {
public:
    explicit GridFunction(const SpaceTimeGrid& grid)
        : grid_(grid), values_(static_cast<size_t>(grid.num_nodes()) * grid.levels, 0.0) {}

    const SpaceTimeGrid& grid() const { return grid_; }

    double& at(int node, int level) { return values_[index(node, level)]; }
    double at(int node, int level) const { return values_[index(node, level)]; }

    std::span<double> level(int k) {
        return std::span<double>(values_).subspan(size_t(k) * grid_.num_nodes(), grid_.num_nodes());
    }
    std::span<const double> level(int k) const {
        return std::span<const double>(values_).subspan(size_t(k) * grid_.num_nodes(),
                                                        grid_.num_nodes());
    }

    bool all_finite() const;
    double min_value() const;
    double max_value() const;

private:
    size_t index(int node, int level) const {
        return size_t(level) * grid_.num_nodes() + size_t(node);
    }

    SpaceTimeGrid grid_;
    std::vector<double> values_;
};

/// Intrinsic parabolic cylinder B_rho(center) x (s - rho^2, s], anchored at a
/// grid node and a stored level.
struct Cylinder {
    int center_node = 0;
    int center_level = 0;
    double radius = 0.0;
};

/// Central difference gradient on a single level; the node must be interior.
std::array<double, 2> gradient_at(const SpaceTimeGrid& grid, std::span<const double> values,
                                  int node);

/// Second central differences (diagonal) and the 4-point corner stencil for the
/// cross term; the returned matrix is exactly symmetric by construction.
SymMatrix hessian_at(const SpaceTimeGrid& grid, std::span<const double> values, int node);

std::array<double, 2> discrete_gradient(const GridFunction& gf, int node, int level);
SymMatrix discrete_hessian(const GridFunction& gf, int node, int level);

/// Enumerates all (node, level) pairs inside the cylinder, level-major
/// ascending. Throws if the cylinder is not contained in the grid's interior,
/// naming the violated face.
std::vector<std::pair<int, int>> cylinder_nodes(const SpaceTimeGrid& grid, const Cylinder& cyl);

}  // namespace quench
