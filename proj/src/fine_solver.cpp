#include "crmsfem/fine_solver.hpp"

#include <cmath>

#include "crmsfem/errors.hpp"
#include "crmsfem/q1.hpp"

namespace crmsfem {

AssembledSystem assemble_fine(const FineProblem& problem) {
    const FineGrid& g = problem.grid;
    FineDofMap map{g.n_nodes()};
    AssembledSystem sys(map.n_dofs(), map);

    const Q1Cell cell{g.hx, g.hy};
    const double w = cell.qp_weight();
    const double h = g.h();
    const double stab = problem.theta * h * h;

    for (int cy = 0; cy < g.my; ++cy) {
        for (int cx = 0; cx < g.mx; ++cx) {
            const double x0 = g.node_x(cx);
            const double y0 = g.node_y(cy);
            const std::array<int, 4> nodes = {g.node_id(cx, cy), g.node_id(cx + 1, cy),
                                              g.node_id(cx, cy + 1), g.node_id(cx + 1, cy + 1)};
            for (int q = 0; q < Q1Cell::n_qp; ++q) {
                const auto [xi, eta] = Q1Cell::qp_ref(q);
                const auto off = cell.qp_offset(q);
                const auto sample = coefficients_at(problem.coeffs, problem.obstacles,
                                                    x0 + off[0], y0 + off[1],
                                                    problem.body_force);
                const auto N = Q1Cell::shape(xi, eta);
                const auto dN = cell.grad(xi, eta);
                for (int a = 0; a < 4; ++a) {
                    for (int b = 0; b < 4; ++b) {
                        const double k = w * (sample.nu * (dN[a][0] * dN[b][0] +
                                                           dN[a][1] * dN[b][1]) +
                                              sample.sigma * N[a] * N[b]);
                        sys.triplets.add(map.ux(nodes[a]), map.ux(nodes[b]), k);
                        sys.triplets.add(map.uy(nodes[a]), map.uy(nodes[b]), k);
                        // -int p div v in the momentum rows, -int q div u plus
                        // the stabilization in the pressure rows.
                        const double bx = -w * N[b] * dN[a][0];
                        const double by = -w * N[b] * dN[a][1];
                        sys.triplets.add(map.ux(nodes[a]), map.p(nodes[b]), bx);
                        sys.triplets.add(map.uy(nodes[a]), map.p(nodes[b]), by);
                        sys.triplets.add(map.p(nodes[b]), map.ux(nodes[a]), bx);
                        sys.triplets.add(map.p(nodes[b]), map.uy(nodes[a]), by);
                        sys.triplets.add(map.p(nodes[a]), map.p(nodes[b]),
                                         -stab * w * (dN[a][0] * dN[b][0] +
                                                      dN[a][1] * dN[b][1]));
                    }
                    sys.rhs[map.ux(nodes[a])] += w * N[a] * sample.f.x;
                    sys.rhs[map.uy(nodes[a])] += w * N[a] * sample.f.y;
                }
            }
        }
    }
    return sys;
}

std::map<int, Vec2> dirichlet_values(const FineGrid& grid, const BoundaryPreset& preset) {
    std::map<int, Vec2> fixed;
    auto consider = [&](int ix, int iy, Side side) {
        if (!preset.is_dirichlet(side)) return;
        const int node = grid.node_id(ix, iy);
        fixed[node] = preset.velocity(grid.node_x(ix), grid.node_y(iy), grid.domain);
    };
    for (int ix = 0; ix <= grid.mx; ++ix) {
        consider(ix, 0, Side::Bottom);
        consider(ix, grid.my, Side::Top);
    }
    for (int iy = 0; iy <= grid.my; ++iy) {
        consider(0, iy, Side::Left);
        consider(grid.mx, iy, Side::Right);
    }
    return fixed;
}

void apply_constraints(TripletBuffer& triplets, std::vector<double>& rhs,
                       const std::map<int, double>& fixed) {
    if (fixed.empty()) return;
    std::vector<char> is_fixed(rhs.size(), 0);
    std::vector<double> value(rhs.size(), 0.0);
    for (const auto& [dof, v] : fixed) {
        is_fixed[dof] = 1;
        value[dof] = v;
    }
    TripletBuffer out(triplets.rows(), triplets.cols());
    for (const auto& t : triplets.entries()) {
        const bool rf = is_fixed[t.row()];
        const bool cf = is_fixed[t.col()];
        if (!rf && !cf) {
            out.add(t.row(), t.col(), t.value());
        } else if (!rf && cf) {
            rhs[t.row()] -= t.value() * value[t.col()];
        }
        // rows of fixed dofs are dropped and replaced by identity below
    }
    for (const auto& [dof, v] : fixed) {
        out.add(dof, dof, 1.0);
        rhs[dof] = v;
    }
    triplets = std::move(out);
}

void apply_dirichlet(AssembledSystem& system, const FineGrid& grid,
                     const BoundaryPreset& preset) {
    if (!preset.dirichlet_side[0] && !preset.dirichlet_side[1] &&
        !preset.dirichlet_side[2] && !preset.dirichlet_side[3])
        throw InconsistentBC("apply_dirichlet: all sides natural");

    std::map<int, double> fixed;
    for (const auto& [node, vel] : dirichlet_values(grid, preset)) {
        fixed[system.dof_map.ux(node)] = vel.x;
        fixed[system.dof_map.uy(node)] = vel.y;
    }
    if (preset.all_dirichlet()) {
        // Enclosed flow: the pressure is defined up to a constant; pin one
        // dof and restore the gauge by a mean shift after the solve.
        fixed[system.dof_map.p(0)] = 0.0;
    }
    apply_constraints(system.triplets, system.rhs, fixed);
}

double fluid_mean(const FineGrid& grid, const ObstacleSet& obstacles,
                  const std::vector<double>& nodal) {
    const Q1Cell cell{grid.hx, grid.hy};
    const double w = cell.qp_weight();
    double sum = 0.0, measure = 0.0;
    for (int cy = 0; cy < grid.my; ++cy) {
        for (int cx = 0; cx < grid.mx; ++cx) {
            const double x0 = grid.node_x(cx);
            const double y0 = grid.node_y(cy);
            const std::array<int, 4> nodes = {grid.node_id(cx, cy), grid.node_id(cx + 1, cy),
                                              grid.node_id(cx, cy + 1),
                                              grid.node_id(cx + 1, cy + 1)};
            for (int q = 0; q < Q1Cell::n_qp; ++q) {
                const auto off = cell.qp_offset(q);
                if (obstacles.contains(x0 + off[0], y0 + off[1])) continue;
                const auto [xi, eta] = Q1Cell::qp_ref(q);
                const auto N = Q1Cell::shape(xi, eta);
                double v = 0.0;
                for (int a = 0; a < 4; ++a) v += N[a] * nodal[nodes[a]];
                sum += w * v;
                measure += w;
            }
        }
    }
    return measure > 0.0 ? sum / measure : 0.0;
}

StokesField solve_reference(const FineProblem& problem, SolveReport* report_out) {
    AssembledSystem sys = assemble_fine(problem);
    apply_dirichlet(sys, problem.grid, problem.preset);
    CompressedMatrix A = compress(sys.triplets, /*symmetric=*/true);
    auto [x, report] = solve_direct(A, sys.rhs);
    if (report.residual_norm > 1e-8)
        throw SingularMatrix("solve_reference: residual " +
                             std::to_string(report.residual_norm) + " exceeds 1e-8");

    StokesField field;
    field.grid = problem.grid;
    const int n = problem.grid.n_nodes();
    field.u.resize(n);
    field.p.resize(n);
    for (int i = 0; i < n; ++i) {
        field.u[i] = {x[sys.dof_map.ux(i)], x[sys.dof_map.uy(i)]};
        field.p[i] = x[sys.dof_map.p(i)];
    }
    const double mean = fluid_mean(problem.grid, problem.obstacles, field.p);
    for (double& v : field.p) v -= mean;
    if (report_out) *report_out = report;
    return field;
}

}  // namespace crmsfem
