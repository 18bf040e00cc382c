#include "quench/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace quench {

namespace {

double signed_sum(const SymMatrix& m, double pos_weight, double neg_weight) {
    const auto ev = m.eigenvalues();
    const int count = m.dim;
    double s = 0.0;
    for (int i = 0; i < count; ++i) {
        if (ev[i] > 0.0) {
            s += pos_weight * ev[i];
        } else if (ev[i] < 0.0) {
            s += neg_weight * ev[i];
        }
    }
    return s;
}

void check_ellipticity(const EllipticityParams& ell) {
    if (!(ell.lambda > 0.0) || !(ell.Lambda >= ell.lambda)) {
        throw std::invalid_argument("EllipticityParams: requires 0 < lambda <= Lambda");
    }
}

}  // namespace

double pucci_minus(const SymMatrix& m, double lambda, double Lambda) {
    return signed_sum(m, lambda, Lambda);
}

double pucci_plus(const SymMatrix& m, double lambda, double Lambda) {
    return signed_sum(m, Lambda, lambda);
}

SymMatrix CoefficientField::at(std::array<double, 2> x, int dim, double /*t*/) const {
    for (int axis = 0; axis < dim; ++axis) {
        const double tol = 1e-12 * (1.0 + std::abs(box_b - box_a));
        if (x[axis] < box_a - tol || x[axis] > box_b + tol) {
            throw std::invalid_argument("CoefficientField: point outside the field's domain");
        }
    }
    switch (preset) {
        case Preset::Identity:
            return SymMatrix::identity(dim);
        case Preset::SineIsotropic: {
            const double s = 1.0 + amplitude * std::sin(M_PI * x[0]);
            return s * SymMatrix::identity(dim);
        }
        case Preset::AnisotropicDiag:
            return dim == 1 ? SymMatrix::diag1(lambda) : SymMatrix::diag2(lambda, Lambda);
        case Preset::OverLambda:
            return dim == 1 ? SymMatrix::diag1(2.0 * Lambda)
                            : SymMatrix::diag2(2.0 * Lambda, lambda);
    }
    throw std::invalid_argument("CoefficientField: unknown preset");
}

OperatorSpec OperatorSpec::make_pucci_minus(EllipticityParams ell) {
    check_ellipticity(ell);
    return OperatorSpec(Variant::PucciMinus, ell, CoefficientField{});
}

OperatorSpec OperatorSpec::make_pucci_plus(EllipticityParams ell) {
    check_ellipticity(ell);
    return OperatorSpec(Variant::PucciPlus, ell, CoefficientField{});
}

OperatorSpec OperatorSpec::make_linear(CoefficientField field, EllipticityParams ell) {
    check_ellipticity(ell);
    return OperatorSpec(Variant::Linear, ell, field);
}

OperatorSpec OperatorSpec::make_laplacian() {
    return make_linear(CoefficientField{}, EllipticityParams{1.0, 1.0, {}});
}

double OperatorSpec::evaluate(std::array<double, 2> x, int dim, double t,
                              const SymMatrix& m) const {
    switch (variant_) {
        case Variant::PucciMinus:
            return pucci_minus(m, ell_.lambda, ell_.Lambda);
        case Variant::PucciPlus:
            return pucci_plus(m, ell_.lambda, ell_.Lambda);
        case Variant::Linear:
            return m.contract(field_.at(x, dim, t));
    }
    return 0.0;
}

double evaluate_F(const OperatorSpec& spec, std::array<double, 2> x, int dim, double t,
                  const SymMatrix& m) {
    return spec.evaluate(x, dim, t, m);
}

void validate_coefficient_field(const OperatorSpec& spec, const SpaceTimeGrid& grid) {
    if (spec.variant() != OperatorSpec::Variant::Linear) return;
    const auto& ell = spec.ellipticity();
    const double tol = 1e-10 * (1.0 + ell.Lambda);
    for (int node = 0; node < grid.num_nodes(); ++node) {
        const auto a = spec.coefficients().at(grid.point(node), grid.dim, 0.0);
        const auto ev = a.eigenvalues();
        if (ev[0] < ell.lambda - tol || ev[1] > ell.Lambda + tol) {
            std::ostringstream msg;
            msg << "coefficient field spectrum [" << ev[0] << ", " << ev[1]
                << "] escapes [lambda, Lambda] at node " << node;
            throw std::invalid_argument(msg.str());
        }
    }
}

namespace {

SymMatrix random_sym(std::mt19937_64& rng, int dim, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    if (dim == 1) return SymMatrix::diag1(u(rng));
    SymMatrix m = SymMatrix::zero(2);
    m.xx = u(rng);
    m.yy = u(rng);
    m.xy = u(rng);
    return m;
}

std::array<double, 2> random_point(std::mt19937_64& rng, const SpaceTimeGrid& grid) {
    std::uniform_int_distribution<int> node(0, grid.num_nodes() - 1);
    return grid.point(node(rng));
}

}  // namespace

SampleReport check_uniform_parabolicity(const OperatorSpec& spec, const SpaceTimeGrid& grid,
                                        int sample_count, uint64_t seed) {
    if (sample_count < 1) {
        throw std::invalid_argument("check_uniform_parabolicity: sample_count must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> tdist(-grid.horizon(), 0.0);
    const auto& ell = spec.ellipticity();

    SampleReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const double tol = 1e-10;
    for (int k = 0; k < sample_count; ++k) {
        const SymMatrix m = random_sym(rng, grid.dim, 2.0);
        const SymMatrix n = random_sym(rng, grid.dim, 2.0);
        const auto x = random_point(rng, grid);
        const double t = tdist(rng);
        const double diff = spec.evaluate(x, grid.dim, t, m + n) - spec.evaluate(x, grid.dim, t, m);
        const double lower = diff - pucci_minus(n, ell.lambda, ell.Lambda);
        const double upper = pucci_plus(n, ell.lambda, ell.Lambda) - diff;
        const double margin = std::min(lower, upper);
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.witness_x = x;
            rep.witness_t = t;
            rep.witness_m = m;
            rep.witness_n = n;
        }
        if (margin < -tol && rep.pass) {
            rep.pass = false;
            std::ostringstream msg;
            msg << "extremal inequality violated by " << -margin << " at sample " << k;
            rep.detail = msg.str();
        }
    }
    return rep;
}

SampleReport check_homogeneity(const OperatorSpec& spec, const SpaceTimeGrid& grid,
                               int sample_count, uint64_t seed) {
    if (sample_count < 1) {
        throw std::invalid_argument("check_homogeneity: sample_count must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> taud(0.0, 4.0);
    std::uniform_real_distribution<double> tdist(-grid.horizon(), 0.0);

    SampleReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sample_count; ++k) {
        const SymMatrix m = random_sym(rng, grid.dim, 2.0);
        const double tau = taud(rng);
        const auto x = random_point(rng, grid);
        const double t = tdist(rng);
        const double lhs = spec.evaluate(x, grid.dim, t, tau * m);
        const double rhs = tau * spec.evaluate(x, grid.dim, t, m);
        const double allowed = 1e-10 * (1.0 + tau * m.frobenius());
        const double margin = allowed - std::abs(lhs - rhs);
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.witness_x = x;
            rep.witness_t = t;
            rep.witness_m = m;
        }
        if (margin < 0.0 && rep.pass) {
            rep.pass = false;
            std::ostringstream msg;
            msg << "homogeneity violated: |F(tau M) - tau F(M)| = " << std::abs(lhs - rhs)
                << " for tau = " << tau;
            rep.detail = msg.str();
        }
    }
    return rep;
}

double alpha_of_gamma(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("alpha_of_gamma: gamma must lie in (0,1)");
    }
    return gamma / (2.0 - gamma);
}

namespace {

double bump_raw(double theta) {
    if (theta <= 0.0 || theta >= 1.0) return 0.0;
    return std::exp(-1.0 / (theta * (1.0 - theta)));
}

// 5-point Gauss-Legendre on [lo, hi].
double gauss5(double lo, double hi) {
    static const double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831,
                                 -0.9061798459386640, 0.9061798459386640};
    static const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                 0.2369268850561891, 0.2369268850561891};
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += ws[i] * bump_raw(mid + half * xs[i]);
    return s * half;
}

}  // namespace

Bump::Bump() {
    cdf_[0] = 0.0;
    const double dx = 1.0 / double(kCells);
    for (int c = 0; c < kCells; ++c) {
        cdf_[c + 1] = cdf_[c] + gauss5(c * dx, (c + 1) * dx);
    }
    total_ = cdf_[kCells];
}

double Bump::value(double theta) const { return bump_raw(theta) / total_; }

double Bump::integral_from_zero(double theta) const {
    if (theta <= 0.0) return 0.0;
    if (theta >= 1.0) return 1.0;
    const double pos = theta * kCells;
    const int cell = std::min(int(pos), kCells - 1);
    const double dx = 1.0 / double(kCells);
    const double partial = gauss5(cell * dx, theta);
    return std::min(1.0, (cdf_[cell] + partial) / total_);
}

const Bump& Bump::standard() {
    static const Bump instance;
    return instance;
}

PenalizationParams::PenalizationParams(double gamma, double eps, double sigma0)
    : gamma_(gamma), sigma0_(sigma0), eps_(eps) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("PenalizationParams: gamma must lie in (0,1)");
    }
    if (!(sigma0 > 0.0) || !(sigma0 < 1.0)) {
        throw std::invalid_argument("PenalizationParams: sigma0 must lie in (0,1)");
    }
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw std::invalid_argument("PenalizationParams: eps must be positive and finite");
    }
    alpha_ = gamma_ / (2.0 - gamma_);
    eps_pow_ = std::pow(eps_, 1.0 + alpha_);
    tau_low_ = sigma0_ * eps_pow_;
    tau_high_ = (1.0 + sigma0_) * eps_pow_;
}

double bump(double theta, const PenalizationParams&) { return Bump::standard().value(theta); }

double beta_eps(double s, const PenalizationParams& p) {
    if (s <= p.tau_low()) return 0.0;
    if (s >= p.tau_high()) return p.gamma();
    const double arg = (s - p.tau_low()) / p.eps_pow();
    return p.gamma() * Bump::standard().integral_from_zero(arg);
}

double source(double s, const PenalizationParams& p) {
    if (s <= p.tau_low()) return 0.0;
    const double b = beta_eps(s, p);
    if (b == 0.0) return 0.0;
    return b * std::pow(s, p.gamma() - 1.0);
}

double source_bound(const PenalizationParams& p) {
    return p.gamma() * std::pow(p.sigma0(), p.gamma() - 1.0) *
           std::pow(p.eps(), (1.0 + p.alpha()) * (p.gamma() - 1.0));
}

double source_lipschitz(const PenalizationParams& p) {
    const double lo = 0.5 * p.tau_low();
    const double hi = 2.0 * p.tau_high();
    const int cells = 8192;
    const double ds = (hi - lo) / double(cells);
    double worst = 0.0;
    double prev = source(lo, p);
    for (int i = 1; i <= cells; ++i) {
        const double cur = source(lo + i * ds, p);
        worst = std::max(worst, std::abs(cur - prev) / ds);
        prev = cur;
    }
    // Power-law tail above the ramp: |d/ds gamma s^{gamma-1}| decreases in s.
    worst = std::max(worst, p.gamma() * (1.0 - p.gamma()) *
                                std::pow(p.tau_high(), p.gamma() - 2.0));
    return worst;
}

}  // namespace quench
