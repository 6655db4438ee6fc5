#include "crmsfem/basis.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <thread>

#include "crmsfem/errors.hpp"
#include "crmsfem/q1.hpp"

namespace crmsfem {

std::uint64_t BasisSet::provenance() const {
    std::uint64_t h = obstacle_hash;
    auto mix = [&h](std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(static_cast<std::uint64_t>(coarse.nx));
    mix(static_cast<std::uint64_t>(coarse.ny));
    mix(static_cast<std::uint64_t>(fine.mx));
    mix(static_cast<std::uint64_t>(fine.my));
    std::uint64_t tbits;
    static_assert(sizeof(tbits) == sizeof(theta));
    std::memcpy(&tbits, &theta, sizeof(tbits));
    mix(tbits);
    return h;
}

int BasisSet::local_edge_index(int element, int edge_id) const {
    const auto edges = coarse.element_edges(element);
    for (int k = 0; k < 4; ++k)
        if (edges[k] == edge_id) return k;
    return -1;
}

BasisFunction BasisSet::extract(int edge_id, int component) const {
    const CoarseEdge& e = coarse.edges.at(edge_id);
    BasisFunction fn;
    fn.edge_id = edge_id;
    fn.component = component;
    fn.n_elements = e.n_elements;
    for (int k = 0; k < e.n_elements; ++k) {
        const int elem = e.elements[k];
        const int le = local_edge_index(elem, edge_id);
        fn.subgrids[k] = elements[elem].subgrid;
        fn.fields[k] = elements[elem].fields[le * 2 + component];
    }
    return fn;
}

LocalElementSystem::LocalElementSystem(const ElementSubgrid& sub, const FineGrid& fine,
                                       const ObstacleSet& obstacles,
                                       const PenalizedCoefficients& coeffs, double theta)
    : sub_(sub), n_nodes_(sub.n_nodes()) {
    const int sx = sub.sx;
    const int sy = sub.sy;

    // Local node lists and composite-trapezoid weights of the 4 edges, in
    // element-local order bottom, right, top, left.
    auto make_edge = [&](int k) {
        const bool horizontal = (k == 0 || k == 2);
        const int n = horizontal ? sx + 1 : sy + 1;
        const double seg = horizontal ? fine.hx : fine.hy;
        edge_nodes_[k].resize(n);
        // Normalized so that sum_j w_j u_j is the edge average: the coarse
        // degree of freedom is (1/|F|) int_F u, not the plain integral.
        const double len = (n - 1) * seg;
        edge_weights_[k].assign(n, seg / len);
        edge_weights_[k].front() = 0.5 * seg / len;
        edge_weights_[k].back() = 0.5 * seg / len;
        for (int j = 0; j < n; ++j) {
            switch (k) {
                case 0: edge_nodes_[k][j] = sub.local_node(j, 0); break;
                case 1: edge_nodes_[k][j] = sub.local_node(sx, j); break;
                case 2: edge_nodes_[k][j] = sub.local_node(j, sy); break;
                default: edge_nodes_[k][j] = sub.local_node(0, j); break;
            }
        }
    };
    for (int k = 0; k < 4; ++k) make_edge(k);

    const int n_dofs = 3 * n_nodes_ + 8 + 1;
    auto ux = [](int n) { return 3 * n; };
    auto uy = [](int n) { return 3 * n + 1; };
    auto pp = [](int n) { return 3 * n + 2; };
    const int lambda0 = 3 * n_nodes_;
    const int gamma = 3 * n_nodes_ + 8;

    TripletBuffer trip(n_dofs, n_dofs);
    const Q1Cell cell{fine.hx, fine.hy};
    const double w = cell.qp_weight();
    const double h = fine.h();
    const double stab = theta * h * h;

    std::vector<double> pressure_mass(n_nodes_, 0.0);  // int_{T cap fluid} N_a
    double fluid_measure = 0.0;

    for (int cy = 0; cy < sy; ++cy) {
        for (int cx = 0; cx < sx; ++cx) {
            const double x0 = fine.node_x(sub.node0_x + cx);
            const double y0 = fine.node_y(sub.node0_y + cy);
            const std::array<int, 4> nodes = {
                sub.local_node(cx, cy), sub.local_node(cx + 1, cy),
                sub.local_node(cx, cy + 1), sub.local_node(cx + 1, cy + 1)};
            for (int q = 0; q < Q1Cell::n_qp; ++q) {
                const auto [xi, eta] = Q1Cell::qp_ref(q);
                const auto off = cell.qp_offset(q);
                const auto sample =
                    coefficients_at(coeffs, obstacles, x0 + off[0], y0 + off[1]);
                const bool fluid = (sample.sigma == 0.0);
                const auto N = Q1Cell::shape(xi, eta);
                const auto dN = cell.grad(xi, eta);
                for (int a = 0; a < 4; ++a) {
                    for (int b = 0; b < 4; ++b) {
                        const double k = w * (sample.nu * (dN[a][0] * dN[b][0] +
                                                           dN[a][1] * dN[b][1]) +
                                              sample.sigma * N[a] * N[b]);
                        trip.add(ux(nodes[a]), ux(nodes[b]), k);
                        trip.add(uy(nodes[a]), uy(nodes[b]), k);
                        const double bx = -w * N[b] * dN[a][0];
                        const double by = -w * N[b] * dN[a][1];
                        trip.add(ux(nodes[a]), pp(nodes[b]), bx);
                        trip.add(uy(nodes[a]), pp(nodes[b]), by);
                        trip.add(pp(nodes[b]), ux(nodes[a]), bx);
                        trip.add(pp(nodes[b]), uy(nodes[a]), by);
                        trip.add(pp(nodes[a]), pp(nodes[b]),
                                 -stab * w * (dN[a][0] * dN[b][0] + dN[a][1] * dN[b][1]));
                    }
                    if (fluid) pressure_mass[nodes[a]] += w * N[a];
                }
                if (fluid) fluid_measure += w;
            }
        }
    }

    if (fluid_measure == 0.0)
        throw SingularMatrix("local basis problem: coarse element fully obstructed");

    // Edge-average constraints and their multiplier columns.
    for (int k = 0; k < 4; ++k) {
        for (std::size_t j = 0; j < edge_nodes_[k].size(); ++j) {
            const int node = edge_nodes_[k][j];
            const double wt = edge_weights_[k][j];
            for (int comp = 0; comp < 2; ++comp) {
                const int row = lambda0 + 2 * k + comp;
                const int col = comp == 0 ? ux(node) : uy(node);
                trip.add(row, col, wt);
                trip.add(col, row, wt);
            }
        }
    }
    // Pressure zero-mean constraint over the fluid part.
    for (int a = 0; a < n_nodes_; ++a) {
        if (pressure_mass[a] == 0.0) continue;
        trip.add(gamma, pp(a), pressure_mass[a]);
        trip.add(pp(a), gamma, pressure_mass[a]);
    }

    fact_.emplace(compress(trip, /*symmetric=*/true));
}

LocalBasisField LocalElementSystem::solve(int local_edge, int component) const {
    const int n_dofs = 3 * n_nodes_ + 9;
    std::vector<double> rhs(n_dofs, 0.0);
    rhs[3 * n_nodes_ + 2 * local_edge + component] = 1.0;
    std::vector<double> x = fact_->solve(rhs);

    LocalBasisField f;
    f.vx.resize(n_nodes_);
    f.vy.resize(n_nodes_);
    f.pr.resize(n_nodes_);
    for (int a = 0; a < n_nodes_; ++a) {
        f.vx[a] = x[3 * a];
        f.vy[a] = x[3 * a + 1];
        f.pr[a] = x[3 * a + 2];
    }
    for (int k = 0; k < 8; ++k) f.lambda[k] = x[3 * n_nodes_ + k];

    // Constraint residuals, recomputed from the returned field.
    for (int k = 0; k < 4; ++k) {
        double sx = 0.0, sy = 0.0;
        for (std::size_t j = 0; j < edge_nodes_[k].size(); ++j) {
            sx += edge_weights_[k][j] * f.vx[edge_nodes_[k][j]];
            sy += edge_weights_[k][j] * f.vy[edge_nodes_[k][j]];
        }
        const double tx = (k == local_edge && component == 0) ? 1.0 : 0.0;
        const double ty = (k == local_edge && component == 1) ? 1.0 : 0.0;
        f.constraint_residual[2 * k] = std::abs(sx - tx);
        f.constraint_residual[2 * k + 1] = std::abs(sy - ty);
    }
    return f;
}

namespace {

ElementBasis compute_element_basis(int element, const CoarseMesh& coarse,
                                   const FineGrid& fine, const ObstacleSet& obstacles,
                                   const PenalizedCoefficients& coeffs, double theta) {
    ElementBasis eb;
    eb.subgrid = subgrid_of_element(coarse, fine, element);
    LocalElementSystem sys(eb.subgrid, fine, obstacles, coeffs, theta);
    for (int k = 0; k < 4; ++k)
        for (int comp = 0; comp < 2; ++comp)
            eb.fields[k * 2 + comp] = sys.solve(k, comp);
    return eb;
}

}  // namespace

BasisFunction compute_basis_for_edge(int edge_id, int component, const CoarseMesh& coarse,
                                     const FineGrid& fine, const ObstacleSet& obstacles,
                                     const PenalizedCoefficients& coeffs, double theta) {
    Patch patch = patch_of_edge(coarse, fine, edge_id);
    BasisFunction fn;
    fn.edge_id = edge_id;
    fn.component = component;
    fn.n_elements = patch.n_elements;
    for (int k = 0; k < patch.n_elements; ++k) {
        const ElementSubgrid& sub = patch.elements[k];
        LocalElementSystem sys(sub, fine, obstacles, coeffs, theta);
        const auto edges = coarse.element_edges(sub.element);
        int le = -1;
        for (int j = 0; j < 4; ++j)
            if (edges[j] == edge_id) le = j;
        fn.subgrids[k] = sub;
        fn.fields[k] = sys.solve(le, component);
    }
    return fn;
}

BasisSet compute_basis_set(const CoarseMesh& coarse, const FineGrid& fine,
                           const ObstacleSet& obstacles,
                           const PenalizedCoefficients& coeffs, double theta,
                           int parallelism) {
    check_nesting(coarse, fine);
    BasisSet set;
    set.coarse = coarse;
    set.fine = fine;
    set.theta = theta;
    set.obstacle_hash = obstacles.hash();
    set.elements.resize(coarse.n_elements());

    const int n = coarse.n_elements();
    std::atomic<int> next{0};
    std::vector<std::string> failures(n);
    auto worker = [&]() {
        for (;;) {
            const int e = next.fetch_add(1);
            if (e >= n) return;
            try {
                set.elements[e] =
                    compute_element_basis(e, coarse, fine, obstacles, coeffs, theta);
            } catch (const std::exception& ex) {
                failures[e] = ex.what();
            }
        }
    };

    const int jobs = std::max(1, parallelism);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::string all_failures;
    for (int e = 0; e < n; ++e) {
        if (!failures[e].empty())
            all_failures += "element " + std::to_string(e) + ": " + failures[e] + "; ";
    }
    if (!all_failures.empty())
        throw SingularMatrix("compute_basis_set: " + all_failures);
    return set;
}

BasisAuditReport audit_basis(const BasisSet& set, const ObstacleSet& obstacles) {
    BasisAuditReport report;
    const Q1Cell cell{set.fine.hx, set.fine.hy};
    const double w = cell.qp_weight();

    for (int edge_id = 0; edge_id < set.coarse.n_edges(); ++edge_id) {
        for (int comp = 0; comp < 2; ++comp) {
            BasisAuditEntry entry{edge_id, comp, 0.0, 0.0, 0.0, true};
            const CoarseEdge& e = set.coarse.edges[edge_id];
            for (int k = 0; k < e.n_elements; ++k) {
                const int elem = e.elements[k];
                const int le = set.local_edge_index(elem, edge_id);
                const LocalBasisField& f = set.elements[elem].fields[le * 2 + comp];
                const ElementSubgrid& sub = set.elements[elem].subgrid;

                // Recompute the 4 edge averages from the stored field values
                // (trapezoid rule, exact for the nodal trace).
                for (int m = 0; m < 4; ++m) {
                    const bool horizontal = (m == 0 || m == 2);
                    const int n_seg = horizontal ? sub.sx : sub.sy;
                    const double hs = horizontal ? set.fine.hx : set.fine.hy;
                    double ax = 0.0, ay = 0.0;
                    for (int j = 0; j <= n_seg; ++j) {
                        const double wj = (j == 0 || j == n_seg) ? 0.5 * hs : hs;
                        int node;
                        switch (m) {
                            case 0: node = sub.local_node(j, 0); break;
                            case 1: node = sub.local_node(sub.sx, j); break;
                            case 2: node = sub.local_node(j, sub.sy); break;
                            default: node = sub.local_node(0, j); break;
                        }
                        ax += wj * f.vx[node];
                        ay += wj * f.vy[node];
                    }
                    const double len = n_seg * hs;
                    ax /= len;
                    ay /= len;
                    const double tx = (m == le && comp == 0) ? 1.0 : 0.0;
                    const double ty = (m == le && comp == 1) ? 1.0 : 0.0;
                    entry.max_constraint_residual =
                        std::max({entry.max_constraint_residual, std::abs(ax - tx),
                                  std::abs(ay - ty)});
                }

                // Pressure mean and divergence constancy over fluid points.
                double psum = 0.0, pmeasure = 0.0;
                double dsum = 0.0, dmin = 1e300, dmax = -1e300, dscale = 0.0;
                int nfluid = 0;
                for (int cy = 0; cy < sub.sy; ++cy) {
                    for (int cx = 0; cx < sub.sx; ++cx) {
                        const double x0 = set.fine.node_x(sub.node0_x + cx);
                        const double y0 = set.fine.node_y(sub.node0_y + cy);
                        const std::array<int, 4> nodes = {
                            sub.local_node(cx, cy), sub.local_node(cx + 1, cy),
                            sub.local_node(cx, cy + 1), sub.local_node(cx + 1, cy + 1)};
                        for (int q = 0; q < Q1Cell::n_qp; ++q) {
                            const auto off = cell.qp_offset(q);
                            if (obstacles.contains(x0 + off[0], y0 + off[1])) continue;
                            const auto [xi, eta] = Q1Cell::qp_ref(q);
                            const auto N = Q1Cell::shape(xi, eta);
                            const auto dN = cell.grad(xi, eta);
                            double pv = 0.0, div = 0.0, gnorm = 0.0;
                            for (int a = 0; a < 4; ++a) {
                                pv += N[a] * f.pr[nodes[a]];
                                div += dN[a][0] * f.vx[nodes[a]] +
                                       dN[a][1] * f.vy[nodes[a]];
                                gnorm += std::abs(dN[a][0] * f.vx[nodes[a]]) +
                                         std::abs(dN[a][1] * f.vy[nodes[a]]);
                            }
                            psum += w * pv;
                            pmeasure += w;
                            dsum += div;
                            dmin = std::min(dmin, div);
                            dmax = std::max(dmax, div);
                            dscale = std::max(dscale, gnorm);
                            ++nfluid;
                        }
                    }
                }
                double pr_scale = 0.0;
                for (double v : f.pr) pr_scale = std::max(pr_scale, std::abs(v));
                if (pmeasure > 0.0)
                    entry.pressure_mean_residual =
                        std::max(entry.pressure_mean_residual,
                                 std::abs(psum) / std::max(pr_scale * pmeasure, 1e-300));
                if (nfluid > 0 && dscale > 0.0)
                    entry.div_constancy_deviation =
                        std::max(entry.div_constancy_deviation, (dmax - dmin) / dscale);
            }
            entry.ok = entry.max_constraint_residual <= 1e-8 &&
                       entry.pressure_mean_residual <= 1e-8;
            report.max_constraint_residual =
                std::max(report.max_constraint_residual, entry.max_constraint_residual);
            report.max_pressure_mean_residual = std::max(
                report.max_pressure_mean_residual, entry.pressure_mean_residual);
            report.max_div_deviation =
                std::max(report.max_div_deviation, entry.div_constancy_deviation);
            report.ok = report.ok && entry.ok;
            report.entries.push_back(entry);
        }
    }
    return report;
}

}  // namespace crmsfem
