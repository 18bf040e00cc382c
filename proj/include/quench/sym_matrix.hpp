#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

namespace quench {

/// Symmetric 1x1 or 2x2 matrix with closed-form spectral data.
///
/// Dimension two is the largest the grid supports, so eigenvalues come from
/// the quadratic formula and no iterative solver is ever involved.
struct SymMatrix {
    int dim = 1;
    double xx = 0.0;
    double xy = 0.0;  // unused when dim == 1
    double yy = 0.0;  // unused when dim == 1

    static SymMatrix zero(int dim) { return SymMatrix{dim, 0.0, 0.0, 0.0}; }

    static SymMatrix identity(int dim) { return SymMatrix{dim, 1.0, 0.0, 1.0}; }

    static SymMatrix diag1(double a) { return SymMatrix{1, a, 0.0, 0.0}; }

    static SymMatrix diag2(double a, double b) { return SymMatrix{2, a, 0.0, b}; }

    /// Builds from full entries, rejecting non-symmetric input.
    static SymMatrix from_entries(int dim, double m00, double m01, double m10, double m11) {
        if (dim == 1) return SymMatrix{1, m00, 0.0, 0.0};
        const double scale = 1.0 + std::abs(m01) + std::abs(m10);
        if (std::abs(m01 - m10) > 1e-12 * scale) {
            throw std::invalid_argument("SymMatrix::from_entries: matrix is not symmetric");
        }
        return SymMatrix{2, m00, m01, m11};
    }

    /// Rank-one tensor p ⊗ p.
    static SymMatrix outer(std::span<const double> p, int dim) {
        if (dim == 1) return SymMatrix{1, p[0] * p[0], 0.0, 0.0};
        return SymMatrix{2, p[0] * p[0], p[0] * p[1], p[1] * p[1]};
    }

    double trace() const { return dim == 1 ? xx : xx + yy; }

    double frobenius() const {
        if (dim == 1) return std::abs(xx);
        return std::sqrt(xx * xx + 2.0 * xy * xy + yy * yy);
    }

    /// Eigenvalues in ascending order; for dim == 1 the second entry repeats the first.
    std::array<double, 2> eigenvalues() const {
        if (dim == 1) return {xx, xx};
        const double mean = 0.5 * (xx + yy);
        const double r = std::hypot(0.5 * (xx - yy), xy);
        return {mean - r, mean + r};
    }

    /// tr(A * this) for symmetric A of the same dimension.
    double contract(const SymMatrix& a) const {
        if (dim == 1) return a.xx * xx;
        return a.xx * xx + 2.0 * a.xy * xy + a.yy * yy;
    }

    SymMatrix& operator+=(const SymMatrix& o) {
        xx += o.xx;
        xy += o.xy;
        yy += o.yy;
        return *this;
    }

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }

    friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
        return SymMatrix{a.dim, a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
    }

    friend SymMatrix operator*(double s, const SymMatrix& m) {
        return SymMatrix{m.dim, s * m.xx, s * m.xy, s * m.yy};
    }
};

}  // namespace quench
