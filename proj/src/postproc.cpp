#include "crmsfem/postproc.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crmsfem/errors.hpp"
#include "crmsfem/q1.hpp"

namespace crmsfem {

double pairwise_sum(const std::vector<double>& values) {
    std::vector<double> buf = values;
    std::size_t n = buf.size();
    if (n == 0) return 0.0;
    while (n > 1) {
        const std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i) buf[i] += buf[i + half];
        n = half;
    }
    return buf[0];
}

ReconstructedField reconstruct(const CoarseSolution& coarse_sol, const BasisSet& set) {
    if (coarse_sol.basis_hash != set.provenance())
        throw ProvenanceMismatch("reconstruct: coarse solution and basis set disagree");

    ReconstructedField out;
    out.grid = set.fine;
    out.coarse = set.coarse;
    out.p_bar = coarse_sol.p_bar;
    out.u.assign(set.fine.n_nodes(), {0.0, 0.0});
    std::vector<int> count(set.fine.n_nodes(), 0);

    for (int e = 0; e < set.coarse.n_elements(); ++e) {
        const ElementBasis& eb = set.elements[e];
        const ElementSubgrid& sub = eb.subgrid;
        const auto edges = set.coarse.element_edges(e);
        std::array<double, 8> coeff;
        for (int m = 0; m < 8; ++m)
            coeff[m] = coarse_sol.velocity(edges[m / 2], m % 2);
        for (int jy = 0; jy <= sub.sy; ++jy) {
            for (int jx = 0; jx <= sub.sx; ++jx) {
                const int ln = sub.local_node(jx, jy);
                const int gn = sub.global_node(set.fine, jx, jy);
                double vx = 0.0, vy = 0.0;
                for (int m = 0; m < 8; ++m) {
                    vx += coeff[m] * eb.fields[m].vx[ln];
                    vy += coeff[m] * eb.fields[m].vy[ln];
                }
                out.u[gn].x += vx;
                out.u[gn].y += vy;
                count[gn] += 1;
            }
        }
    }
    // Fine nodes on coarse edges were visited by every incident element;
    // average the one-sided values.
    for (int n = 0; n < set.fine.n_nodes(); ++n) {
        if (count[n] > 1) {
            out.u[n].x /= count[n];
            out.u[n].y /= count[n];
        }
    }
    return out;
}

ErrorReport error_norms(const ReconstructedField& test, const StokesField& reference,
                        const ObstacleSet& obstacles) {
    const FineGrid& g = test.grid;
    if (g.mx != reference.grid.mx || g.my != reference.grid.my)
        throw GridMismatch("error_norms: fields live on different grids");

    const Q1Cell cell{g.hx, g.hy};
    const double w = cell.qp_weight();
    const int nc = g.n_cells();

    std::vector<double> l1n(nc, 0.0), l1d(nc, 0.0), l2n(nc, 0.0), l2d(nc, 0.0),
        h1n(nc, 0.0), h1d(nc, 0.0);

    for (int cy = 0; cy < g.my; ++cy) {
        for (int cx = 0; cx < g.mx; ++cx) {
            const int c = cy * g.mx + cx;
            const double x0 = g.node_x(cx);
            const double y0 = g.node_y(cy);
            const std::array<int, 4> nodes = {g.node_id(cx, cy), g.node_id(cx + 1, cy),
                                              g.node_id(cx, cy + 1),
                                              g.node_id(cx + 1, cy + 1)};
            for (int q = 0; q < Q1Cell::n_qp; ++q) {
                const auto off = cell.qp_offset(q);
                if (obstacles.contains(x0 + off[0], y0 + off[1])) continue;
                const auto [xi, eta] = Q1Cell::qp_ref(q);
                const auto N = Q1Cell::shape(xi, eta);
                const auto dN = cell.grad(xi, eta);
                double tx = 0, ty = 0, rx = 0, ry = 0;
                double gtxx = 0, gtxy = 0, gtyx = 0, gtyy = 0;
                double grxx = 0, grxy = 0, gryx = 0, gryy = 0;
                for (int a = 0; a < 4; ++a) {
                    const Vec2& ut = test.u[nodes[a]];
                    const Vec2& ur = reference.u[nodes[a]];
                    tx += N[a] * ut.x;
                    ty += N[a] * ut.y;
                    rx += N[a] * ur.x;
                    ry += N[a] * ur.y;
                    gtxx += dN[a][0] * ut.x;
                    gtxy += dN[a][1] * ut.x;
                    gtyx += dN[a][0] * ut.y;
                    gtyy += dN[a][1] * ut.y;
                    grxx += dN[a][0] * ur.x;
                    grxy += dN[a][1] * ur.x;
                    gryx += dN[a][0] * ur.y;
                    gryy += dN[a][1] * ur.y;
                }
                const double dx = tx - rx;
                const double dy = ty - ry;
                l1n[c] += w * std::sqrt(dx * dx + dy * dy);
                l1d[c] += w * std::sqrt(rx * rx + ry * ry);
                l2n[c] += w * (dx * dx + dy * dy);
                l2d[c] += w * (rx * rx + ry * ry);
                const double ddxx = gtxx - grxx, ddxy = gtxy - grxy;
                const double ddyx = gtyx - gryx, ddyy = gtyy - gryy;
                h1n[c] += w * (ddxx * ddxx + ddxy * ddxy + ddyx * ddyx + ddyy * ddyy);
                h1d[c] += w * (grxx * grxx + grxy * grxy + gryx * gryx + gryy * gryy);
            }
        }
    }

    ErrorReport rep;
    rep.l1_rel = pairwise_sum(l1n) / pairwise_sum(l1d);
    rep.l2_rel = std::sqrt(pairwise_sum(l2n) / pairwise_sum(l2d));
    rep.h1_rel = std::sqrt(pairwise_sum(h1n) / pairwise_sum(h1d));

    // Coarse pressure: element-constant test pressure against fluid-weighted
    // element averages of the reference, both shifted to zero weighted mean.
    const CoarseMesh& coarse = test.coarse;
    const int sx = g.mx / coarse.nx;
    const int sy = g.my / coarse.ny;
    std::vector<double> ref_avg(coarse.n_elements(), 0.0);
    std::vector<double> measure(coarse.n_elements(), 0.0);
    for (int cy = 0; cy < g.my; ++cy) {
        for (int cx = 0; cx < g.mx; ++cx) {
            const int elem = coarse.element_id(cx / sx, cy / sy);
            const double x0 = g.node_x(cx);
            const double y0 = g.node_y(cy);
            const std::array<int, 4> nodes = {g.node_id(cx, cy), g.node_id(cx + 1, cy),
                                              g.node_id(cx, cy + 1),
                                              g.node_id(cx + 1, cy + 1)};
            for (int q = 0; q < Q1Cell::n_qp; ++q) {
                const auto off = cell.qp_offset(q);
                if (obstacles.contains(x0 + off[0], y0 + off[1])) continue;
                const auto [xi, eta] = Q1Cell::qp_ref(q);
                const auto N = Q1Cell::shape(xi, eta);
                double pv = 0.0;
                for (int a = 0; a < 4; ++a) pv += N[a] * reference.p[nodes[a]];
                ref_avg[elem] += w * pv;
                measure[elem] += w;
            }
        }
    }
    double total = 0.0, mean_ref = 0.0, mean_test = 0.0;
    for (int e = 0; e < coarse.n_elements(); ++e) {
        if (measure[e] > 0.0) ref_avg[e] /= measure[e];
        total += measure[e];
        mean_ref += measure[e] * ref_avg[e];
        mean_test += measure[e] * test.p_bar[e];
    }
    if (total > 0.0) {
        mean_ref /= total;
        mean_test /= total;
    }
    double num = 0.0, den = 0.0;
    for (int e = 0; e < coarse.n_elements(); ++e) {
        const double a = test.p_bar[e] - mean_test;
        const double b = ref_avg[e] - mean_ref;
        num += measure[e] * (a - b) * (a - b);
        den += measure[e] * b * b;
    }
    rep.l2_p_rel = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return rep;
}

double h_over_eps(const CoarseMesh& coarse, const ObstacleSet& obstacles) {
    if (std::abs(coarse.hx - coarse.hy) > 1e-12 * std::max(coarse.hx, coarse.hy))
        throw ValidationError("h_over_eps: coarse cells are not square");
    if (obstacles.epsilon <= 0.0) return 0.0;
    return coarse.hx / obstacles.epsilon;
}

void write_vtk(const std::string& path, const FineGrid& grid,
               const std::vector<Vec2>& u, const std::vector<double>* p) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << "# vtk DataFile Version 3.0\n";
    out << "crmsfem field\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << grid.mx + 1 << " " << grid.my + 1 << " 1\n";
    out << "ORIGIN " << grid.domain.x_min << " " << grid.domain.y_min << " 0\n";
    out << "SPACING " << grid.hx << " " << grid.hy << " 1\n";
    out << "POINT_DATA " << grid.n_nodes() << "\n";
    out << "VECTORS velocity double\n";
    out.precision(17);
    for (const auto& v : u) out << v.x << " " << v.y << " 0\n";
    if (p) {
        out << "SCALARS pressure double 1\n";
        out << "LOOKUP_TABLE default\n";
        for (double v : *p) out << v << "\n";
    }
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_field_csv(const std::string& path, const FineGrid& grid,
                     const std::vector<Vec2>& u, const std::vector<double>& p) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << "x,y,u_x,u_y,p\r\n";
    for (int iy = 0; iy <= grid.my; ++iy) {
        for (int ix = 0; ix <= grid.mx; ++ix) {
            const int n = grid.node_id(ix, iy);
            out << fmt17(grid.node_x(ix)) << "," << fmt17(grid.node_y(iy)) << ","
                << fmt17(u[n].x) << "," << fmt17(u[n].y) << "," << fmt17(p[n]) << "\r\n";
        }
    }
}

void write_convergence_csv(const std::string& path,
                           const std::vector<ErrorReport>& reports) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << "config,H_over_eps,L1_rel,L2_rel,H1_rel,L2_P_rel\r\n";
    for (const auto& r : reports) {
        out << r.config << "," << fmt17(r.h_over_eps) << "," << fmt17(r.l1_rel) << ","
            << fmt17(r.l2_rel) << "," << fmt17(r.h1_rel) << "," << fmt17(r.l2_p_rel)
            << "\r\n";
    }
}

std::vector<ErrorReport> read_convergence_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open for reading: " + path);
    std::vector<ErrorReport> reports;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string tok;
        ErrorReport r;
        std::getline(ss, r.config, ',');
        std::getline(ss, tok, ',');
        r.h_over_eps = std::stod(tok);
        std::getline(ss, tok, ',');
        r.l1_rel = std::stod(tok);
        std::getline(ss, tok, ',');
        r.l2_rel = std::stod(tok);
        std::getline(ss, tok, ',');
        r.h1_rel = std::stod(tok);
        std::getline(ss, tok, ',');
        r.l2_p_rel = std::stod(tok);
        reports.push_back(r);
    }
    return reports;
}

}  // namespace crmsfem
