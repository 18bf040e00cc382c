#pragma once

#include "quench/grid.hpp"

#include <span>
#include <vector>

namespace quench {

/// sup over the cylinder of |gf - gf(center)|.
double oscillation(const GridFunction& gf, const Cylinder& cyl);

/// sup over the cylinder of |gf(x,t) - gf(center) - grad(center) . (x - y)|,
/// with the gradient taken by central differences at the center.
double plane_oscillation(const GridFunction& gf, const Cylinder& cyl);

/// Least-squares fit of log(values) against log(radii).
struct ExponentFit {
    std::vector<double> radii;
    std::vector<double> values;
    double slope = 0.0;
    double intercept = 0.0;  // log of the fitted constant
    double r2 = 1.0;
    double reference = 0.0;
    int excluded = 0;  // non-positive or non-finite values dropped before fitting
};

ExponentFit fit_exponent(std::span<const double> radii, std::span<const double> values,
                         double reference);

/// Grid-aligned dyadic radii (b-a)/2 * 2^{-m}, m = m_start, m_start+1, ...;
/// radii below 4h are dropped (discrete sups are quantization noise there).
std::vector<double> dyadic_radii(const SpaceTimeGrid& grid, int count, int m_start = 2);

/// max over node pairs in the inner half-domain of |v(x,t)-v(y,t)| / |x-y|^mu
/// at a fixed level.
double spatial_holder_quotient(const GridFunction& v, double mu, int level);

/// max over level pairs with both times in (-kappa0/2, 0] of
/// |v(x,t)-v(x,s)| / |t-s|^{mu/2} at a fixed node. Level pairs are strided
/// down to ~512 levels when the window is very finely resolved.
double temporal_holder_quotient(const GridFunction& v, double mu, int node, double kappa0);

/// max over interior nodes of the inner half-domain (recent half of the time
/// slab) with u > floor of |grad u|^2 / u^theta.
double gradient_bound_ratio(const GridFunction& u, double theta, double floor);

/// Discrete interface of the positivity set: nodes on either side of a
/// threshold crossing, per time level.
struct FreeBoundarySet {
    double threshold = 0.0;
    std::vector<std::vector<int>> nodes_per_level;

    bool empty() const;
};

FreeBoundarySet detect_free_boundary(const GridFunction& u, double tau);

/// Among the detected interface nodes at `level`, the sub-threshold node
/// closest to the domain center; -1 if the set is empty there.
int pick_free_boundary_node(const GridFunction& u, const FreeBoundarySet& fb, int level);

/// Growth of sup u over shrinking cylinders anchored at a free boundary
/// point, fitted on a log-log scale against the reference exponent.
ExponentFit fb_growth(const GridFunction& u, int fb_node, int fb_level,
                      std::span<const double> radii, double reference);

/// Measured constant in sup_{G_r} |u - u(center)| <= C r: the max of
/// oscillation/r over the given radii.
double lipschitz_constant(const GridFunction& u, int center_node, int center_level,
                          std::span<const double> radii);

/// Direct evaluation of the growth bound
///   sup_{G_r} u <= (C_hat r^mu + u(center)^{1/(1+alpha)})^{1+alpha}
/// at each radius.
struct GrowthCheck {
    bool pass = true;
    double worst_excess = 0.0;  // max of lhs - rhs over the radii
    std::vector<double> lhs;
    std::vector<double> rhs;
};

GrowthCheck growth_envelope_check(const GridFunction& u, int center_node, int center_level,
                                  double c_hat, double mu, double alpha,
                                  std::span<const double> radii);

}  // namespace quench
