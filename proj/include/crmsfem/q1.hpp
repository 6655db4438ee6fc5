#pragma once

#include <array>

namespace crmsfem {

/// Bilinear Q1 shape machinery on an hx x hy rectangular cell. Local node
/// order is tensorized: j*2+i with i along x, j along y (SW, SE, NW, NE).
/// Quadrature is the 2x2 Gauss rule throughout.
struct Q1Cell {
    double hx, hy;

    static constexpr int n_qp = 4;

    /// Reference coordinates of quadrature point q in [-1,1]^2.
    static std::array<double, 2> qp_ref(int q) {
        constexpr double g = 0.5773502691896257645;  // 1/sqrt(3)
        const double xi = (q % 2 == 0) ? -g : g;
        const double eta = (q / 2 == 0) ? -g : g;
        return {xi, eta};
    }

    /// Quadrature weight including the Jacobian.
    double qp_weight() const { return hx * hy / 4.0; }

    /// Physical offset of quadrature point q from the cell's SW corner.
    std::array<double, 2> qp_offset(int q) const {
        const auto [xi, eta] = qp_ref(q);
        return {0.5 * hx * (1.0 + xi), 0.5 * hy * (1.0 + eta)};
    }

    static std::array<double, 4> shape(double xi, double eta) {
        return {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
                0.25 * (1 - xi) * (1 + eta), 0.25 * (1 + xi) * (1 + eta)};
    }

    /// d/dx and d/dy of the four shapes at (xi, eta).
    std::array<std::array<double, 2>, 4> grad(double xi, double eta) const {
        const double ax = 2.0 / hx;
        const double ay = 2.0 / hy;
        return {{{-0.25 * (1 - eta) * ax, -0.25 * (1 - xi) * ay},
                 {0.25 * (1 - eta) * ax, -0.25 * (1 + xi) * ay},
                 {-0.25 * (1 + eta) * ax, 0.25 * (1 - xi) * ay},
                 {0.25 * (1 + eta) * ax, 0.25 * (1 + xi) * ay}}};
    }
};

}  // namespace crmsfem
