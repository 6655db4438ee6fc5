#include "crmsfem/coarse_solver.hpp"

#include <cmath>

#include "crmsfem/errors.hpp"
#include "crmsfem/fine_solver.hpp"
#include "crmsfem/q1.hpp"

namespace crmsfem {

namespace {

constexpr std::array<double, 5> kGauss5X = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> kGauss5W = {0.2369268850561891, 0.4786286704993665,
                                            0.5688888888888889, 0.4786286704993665,
                                            0.2369268850561891};

/// Fluid measure of every coarse element (2x2 Gauss, masked).
std::vector<double> element_fluid_measures(const BasisSet& set,
                                           const ObstacleSet& obstacles) {
    const FineGrid& fine = set.fine;
    const Q1Cell cell{fine.hx, fine.hy};
    const double w = cell.qp_weight();
    std::vector<double> measures(set.coarse.n_elements(), 0.0);
    for (int e = 0; e < set.coarse.n_elements(); ++e) {
        const ElementSubgrid& sub = set.elements[e].subgrid;
        double m = 0.0;
        for (int cy = 0; cy < sub.sy; ++cy) {
            for (int cx = 0; cx < sub.sx; ++cx) {
                const double x0 = fine.node_x(sub.node0_x + cx);
                const double y0 = fine.node_y(sub.node0_y + cy);
                for (int q = 0; q < Q1Cell::n_qp; ++q) {
                    const auto off = cell.qp_offset(q);
                    if (!obstacles.contains(x0 + off[0], y0 + off[1])) m += w;
                }
            }
        }
        measures[e] = m;
    }
    return measures;
}

}  // namespace

CoarseSystem assemble_coarse(const BasisSet& set, const PenalizedCoefficients& coeffs,
                             const ObstacleSet& obstacles, const BodyForce& body_force) {
    if (obstacles.hash() != set.obstacle_hash)
        throw ProvenanceMismatch("assemble_coarse: obstacle set does not match basis set");

    const CoarseMesh& coarse = set.coarse;
    const FineGrid& fine = set.fine;
    CoarseSystem sys(coarse.n_edges(), coarse.n_elements());

    const Q1Cell cell{fine.hx, fine.hy};
    const double w = cell.qp_weight();

    for (int e = 0; e < coarse.n_elements(); ++e) {
        const ElementBasis& eb = set.elements[e];
        const ElementSubgrid& sub = eb.subgrid;
        const auto edges = coarse.element_edges(e);

        std::array<std::array<double, 8>, 8> a_local{};
        std::array<double, 8> b_local{};
        std::array<double, 8> f_local{};

        for (int cy = 0; cy < sub.sy; ++cy) {
            for (int cx = 0; cx < sub.sx; ++cx) {
                const double x0 = fine.node_x(sub.node0_x + cx);
                const double y0 = fine.node_y(sub.node0_y + cy);
                const std::array<int, 4> nodes = {
                    sub.local_node(cx, cy), sub.local_node(cx + 1, cy),
                    sub.local_node(cx, cy + 1), sub.local_node(cx + 1, cy + 1)};
                for (int q = 0; q < Q1Cell::n_qp; ++q) {
                    const auto [xi, eta] = Q1Cell::qp_ref(q);
                    const auto off = cell.qp_offset(q);
                    const auto sample = coefficients_at(coeffs, obstacles, x0 + off[0],
                                                        y0 + off[1], body_force);
                    const auto N = Q1Cell::shape(xi, eta);
                    const auto dN = cell.grad(xi, eta);

                    // Values and gradients of the 8 local basis fields.
                    std::array<double, 8> vx{}, vy{}, gxx{}, gxy{}, gyx{}, gyy{};
                    for (int m = 0; m < 8; ++m) {
                        const LocalBasisField& f = eb.fields[m];
                        for (int a = 0; a < 4; ++a) {
                            vx[m] += N[a] * f.vx[nodes[a]];
                            vy[m] += N[a] * f.vy[nodes[a]];
                            gxx[m] += dN[a][0] * f.vx[nodes[a]];
                            gxy[m] += dN[a][1] * f.vx[nodes[a]];
                            gyx[m] += dN[a][0] * f.vy[nodes[a]];
                            gyy[m] += dN[a][1] * f.vy[nodes[a]];
                        }
                    }
                    for (int m = 0; m < 8; ++m) {
                        for (int m2 = 0; m2 < 8; ++m2) {
                            a_local[m][m2] +=
                                w * (sample.nu * (gxx[m] * gxx[m2] + gxy[m] * gxy[m2] +
                                                  gyx[m] * gyx[m2] + gyy[m] * gyy[m2]) +
                                     sample.sigma * (vx[m] * vx[m2] + vy[m] * vy[m2]));
                        }
                        b_local[m] += -w * (gxx[m] + gyy[m]);
                        f_local[m] += w * (sample.f.x * vx[m] + sample.f.y * vy[m]);
                    }
                }
            }
        }

        for (int m = 0; m < 8; ++m) {
            const int row = sys.u_dof(edges[m / 2], m % 2);
            for (int m2 = 0; m2 < 8; ++m2)
                sys.triplets.add(row, sys.u_dof(edges[m2 / 2], m2 % 2), a_local[m][m2]);
            sys.triplets.add(row, sys.p_dof(e), b_local[m]);
            sys.triplets.add(sys.p_dof(e), row, b_local[m]);
            sys.rhs[row] += f_local[m];
        }
    }
    return sys;
}

Vec2 boundary_edge_average(const CoarseEdge& edge, const BoundaryPreset& preset,
                           const DomainSpec& domain) {
    Vec2 avg{0.0, 0.0};
    for (int q = 0; q < 5; ++q) {
        const double t = 0.5 * (1.0 + kGauss5X[q]);
        const double x = edge.a.x + t * (edge.b.x - edge.a.x);
        const double y = edge.a.y + t * (edge.b.y - edge.a.y);
        const Vec2 v = preset.velocity(x, y, domain);
        avg.x += 0.5 * kGauss5W[q] * v.x;
        avg.y += 0.5 * kGauss5W[q] * v.y;
    }
    return avg;
}

void apply_coarse_bc(CoarseSystem& system, const CoarseMesh& coarse,
                     const BoundaryPreset& preset) {
    if (!preset.dirichlet_side[0] && !preset.dirichlet_side[1] &&
        !preset.dirichlet_side[2] && !preset.dirichlet_side[3])
        throw InconsistentBC("apply_coarse_bc: all sides natural");

    std::map<int, double> fixed;
    for (int e = 0; e < coarse.n_edges(); ++e) {
        const CoarseEdge& edge = coarse.edges[e];
        if (!edge.on_boundary) continue;
        const Side side = edge.boundary_side(coarse.nx, coarse.ny);
        if (!preset.is_dirichlet(side)) continue;
        const Vec2 avg = boundary_edge_average(edge, preset, coarse.domain);
        fixed[system.u_dof(e, 0)] = avg.x;
        fixed[system.u_dof(e, 1)] = avg.y;
    }
    if (preset.all_dirichlet()) fixed[system.p_dof(0)] = 0.0;
    apply_constraints(system.triplets, system.rhs, fixed);
}

CoarseSolution solve_coarse(const CoarseSystem& system, const BasisSet& set,
                            const ObstacleSet& obstacles, const BoundaryPreset& preset,
                            SolveReport* report_out) {
    CompressedMatrix A = compress(system.triplets, /*symmetric=*/true);
    auto [x, report] = solve_direct(A, system.rhs);
    if (report.residual_norm > 1e-8)
        throw SingularMatrix("solve_coarse: residual " +
                             std::to_string(report.residual_norm) + " exceeds 1e-8");

    CoarseSolution sol;
    sol.coarse = set.coarse;
    sol.basis_hash = set.provenance();
    sol.u.assign(x.begin(), x.begin() + 2 * system.n_edges);
    sol.p_bar.assign(x.begin() + 2 * system.n_edges, x.end());

    if (preset.all_dirichlet()) {
        const auto measures = element_fluid_measures(set, obstacles);
        double total = 0.0, weighted = 0.0;
        for (int e = 0; e < system.n_elements; ++e) {
            total += measures[e];
            weighted += measures[e] * sol.p_bar[e];
        }
        if (total > 0.0) {
            const double mean = weighted / total;
            for (double& v : sol.p_bar) v -= mean;
        }
    }
    if (report_out) *report_out = report;
    return sol;
}

}  // namespace crmsfem
