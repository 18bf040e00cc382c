#pragma once

#include "quench/grid.hpp"
#include "quench/sym_matrix.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace quench {

/// Modulus of continuity for the x-dependence of an operator, from a fixed
/// preset catalog so it stays checkable pointwise.
struct ModulusOfContinuity {
    enum class Kind { Zero, Linear };
    Kind kind = Kind::Zero;
    double slope = 0.0;  // Linear: omega(r) = slope * r

    double operator()(double r) const { return kind == Kind::Zero ? 0.0 : slope * r; }
};

struct EllipticityParams {
    double lambda = 1.0;
    double Lambda = 1.0;
    ModulusOfContinuity omega{};
};

/// lambda * (positive part of spectrum) + Lambda * (negative part).
double pucci_minus(const SymMatrix& m, double lambda, double Lambda);

/// Lambda * (positive part of spectrum) + lambda * (negative part).
double pucci_plus(const SymMatrix& m, double lambda, double Lambda);

/// Coefficient fields A(x,t) for the linear nondivergence variant. Presets
/// only; all are symmetric and time-constant. OverLambda deliberately plants
/// an eigenvalue 2*Lambda and exists to exercise the ellipticity checks.
struct CoefficientField {
    enum class Preset { Identity, SineIsotropic, AnisotropicDiag, OverLambda };
    Preset preset = Preset::Identity;
    double amplitude = 0.5;  // SineIsotropic: A = (1 + amplitude * sin(pi x)) I
    double lambda = 1.0;     // AnisotropicDiag / OverLambda entries
    double Lambda = 1.0;
    double box_a = -1.0;  // evaluation domain per axis
    double box_b = 1.0;

    SymMatrix at(std::array<double, 2> x, int dim, double t) const;
};

/// A fully nonlinear operator F(x,t,M) from the closed catalog: the two Pucci
/// extremal operators and linear nondivergence tr(A(x,t) M). All variants are
/// 1-homogeneous in M and vanish on M = 0 by construction.
class OperatorSpec {
public:
    enum class Variant { PucciMinus, PucciPlus, Linear };

    static OperatorSpec make_pucci_minus(EllipticityParams ell);
    static OperatorSpec make_pucci_plus(EllipticityParams ell);
    static OperatorSpec make_linear(CoefficientField field, EllipticityParams ell);
    /// Laplacian shorthand: linear with identity coefficients, lambda = Lambda = 1.
    static OperatorSpec make_laplacian();

    Variant variant() const { return variant_; }
    const EllipticityParams& ellipticity() const { return ell_; }
    const CoefficientField& coefficients() const { return field_; }

    double evaluate(std::array<double, 2> x, int dim, double t, const SymMatrix& m) const;

private:
    OperatorSpec(Variant v, EllipticityParams ell, CoefficientField field)
        : variant_(v), ell_(ell), field_(field) {}

    Variant variant_;
    EllipticityParams ell_;
    CoefficientField field_;
};

double evaluate_F(const OperatorSpec& spec, std::array<double, 2> x, int dim, double t,
                  const SymMatrix& m);

/// Verifies that the linear variant's coefficients have spectrum within
/// [lambda, Lambda] at every grid node; throws on violation.
void validate_coefficient_field(const OperatorSpec& spec, const SpaceTimeGrid& grid);

/// Outcome of a randomized structural check, with a witness when it fails.
struct SampleReport {
    bool pass = true;
    double worst_margin = 0.0;
    std::array<double, 2> witness_x{0.0, 0.0};
    double witness_t = 0.0;
    SymMatrix witness_m{};
    SymMatrix witness_n{};
    std::string detail;
};

/// Samples random symmetric increments and asserts the two-sided extremal
/// inequality for F(x,t,M+N) - F(x,t,M) within 1e-10.
SampleReport check_uniform_parabolicity(const OperatorSpec& spec, const SpaceTimeGrid& grid,
                                        int sample_count, uint64_t seed);

/// Samples tau >= 0 and asserts |F(tau M) - tau F(M)| <= 1e-10 (1 + tau |M|).
SampleReport check_homogeneity(const OperatorSpec& spec, const SpaceTimeGrid& grid,
                               int sample_count, uint64_t seed);

/// Growth exponent alpha = gamma / (2 - gamma); requires gamma in (0,1).
double alpha_of_gamma(double gamma);

/// The normalized smooth bump exp(-1/(theta(1-theta))) on (0,1), with the
/// normalization constant fixed at construction so the mass is 1 to 1e-12.
/// The cumulative integral is tabulated once (per-cell Gauss-Legendre) and the
/// partial cell is integrated on the fly, which keeps it strictly monotone.
class Bump {
public:
    Bump();

    double value(double theta) const;              // normalized density
    double integral_from_zero(double theta) const;  // clamped to [0,1]
    double normalization() const { return total_; }

    static const Bump& standard();

private:
    static constexpr int kCells = 2048;
    std::array<double, kCells + 1> cdf_{};  // unnormalized cumulative at cell edges
    double total_ = 0.0;
};

/// Parameters of the penalized absorption term: the ramp B_eps rises from 0 to
/// gamma across [sigma0 eps^{1+alpha}, (1+sigma0) eps^{1+alpha}].
class PenalizationParams {
public:
    PenalizationParams(double gamma, double eps, double sigma0 = 0.1);

    double gamma() const { return gamma_; }
    double sigma0() const { return sigma0_; }
    double eps() const { return eps_; }
    double alpha() const { return alpha_; }
    double eps_pow() const { return eps_pow_; }    // eps^{1+alpha}
    double tau_low() const { return tau_low_; }    // sigma0 * eps^{1+alpha}
    double tau_high() const { return tau_high_; }  // (1+sigma0) * eps^{1+alpha}

    PenalizationParams with_eps(double eps) const {
        return PenalizationParams(gamma_, eps, sigma0_);
    }

private:
    double gamma_;
    double sigma0_;
    double eps_;
    double alpha_;
    double eps_pow_;
    double tau_low_;
    double tau_high_;
};

double bump(double theta, const PenalizationParams& p);

/// gamma * (bump mass accumulated up to (s - tau_low)/eps^{1+alpha}); values in
/// [0, gamma], nondecreasing in s.
double beta_eps(double s, const PenalizationParams& p);

/// The absorption term beta_eps(s) * s^{gamma-1}, guarded to 0 for s <= tau_low
/// so the singular factor is never evaluated there.
double source(double s, const PenalizationParams& p);

/// Exact upper bound gamma * sigma0^{gamma-1} * eps^{(1+alpha)(gamma-1)}.
double source_bound(const PenalizationParams& p);

/// Numerical estimate of sup |d source/ds|, by dense sampling across the ramp
/// plus the analytic power-law tail. Scales like eps^{-2}.
double source_lipschitz(const PenalizationParams& p);

}  // namespace quench
