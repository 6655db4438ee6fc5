#include "crmsfem/mesh.hpp"

#include <cmath>

#include "crmsfem/errors.hpp"

namespace crmsfem {

double CoarseEdge::length() const {
    return orientation == EdgeOrientation::Horizontal ? (b.x - a.x) : (b.y - a.y);
}

Side CoarseEdge::boundary_side(int nx, int ny) const {
    if (orientation == EdgeOrientation::Horizontal) {
        return iy == 0 ? Side::Bottom : Side::Top;
    }
    return ix == 0 ? Side::Left : Side::Right;
    (void)nx;
    (void)ny;
}

std::array<int, 4> CoarseMesh::element_edges(int e) const {
    const int ex = element_x(e);
    const int ey = element_y(e);
    return {horizontal_edge_id(ex, ey), vertical_edge_id(ex + 1, ey),
            horizontal_edge_id(ex, ey + 1), vertical_edge_id(ex, ey)};
}

Vec2 CoarseMesh::local_edge_normal(int k) {
    switch (k) {
        case 0: return {0.0, -1.0};  // bottom
        case 1: return {1.0, 0.0};   // right
        case 2: return {0.0, 1.0};   // top
        default: return {-1.0, 0.0}; // left
    }
}

CoarseMesh build_coarse(const DomainSpec& domain, int ny, int nx) {
    if (nx < 1 || ny < 1) throw ValidationError("build_coarse: nx, ny must be >= 1");
    CoarseMesh m;
    m.domain = domain;
    m.nx = nx;
    m.ny = ny;
    m.hx = domain.width() / nx;
    m.hy = domain.height() / ny;
    m.edges.reserve(nx * (ny + 1) + ny * (nx + 1));

    // Horizontal edges first, row-major with x fastest.
    for (int iy = 0; iy <= ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            CoarseEdge e;
            e.orientation = EdgeOrientation::Horizontal;
            e.ix = ix;
            e.iy = iy;
            const double y = domain.y_min + iy * m.hy;
            e.a = {domain.x_min + ix * m.hx, y};
            e.b = {domain.x_min + (ix + 1) * m.hx, y};
            e.elements = {-1, -1};
            e.n_elements = 0;
            if (iy > 0) e.elements[e.n_elements++] = m.element_id(ix, iy - 1);
            if (iy < ny) e.elements[e.n_elements++] = m.element_id(ix, iy);
            e.on_boundary = (e.n_elements == 1);
            m.edges.push_back(e);
        }
    }
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix <= nx; ++ix) {
            CoarseEdge e;
            e.orientation = EdgeOrientation::Vertical;
            e.ix = ix;
            e.iy = iy;
            const double x = domain.x_min + ix * m.hx;
            e.a = {x, domain.y_min + iy * m.hy};
            e.b = {x, domain.y_min + (iy + 1) * m.hy};
            e.elements = {-1, -1};
            e.n_elements = 0;
            if (ix > 0) e.elements[e.n_elements++] = m.element_id(ix - 1, iy);
            if (ix < nx) e.elements[e.n_elements++] = m.element_id(ix, iy);
            e.on_boundary = (e.n_elements == 1);
            m.edges.push_back(e);
        }
    }
    return m;
}

FineGrid build_fine(const DomainSpec& domain, int my, int mx) {
    if (mx < 1 || my < 1) throw ValidationError("build_fine: mx, my must be >= 1");
    FineGrid g;
    g.domain = domain;
    g.mx = mx;
    g.my = my;
    g.hx = domain.width() / mx;
    g.hy = domain.height() / my;
    return g;
}

void check_nesting(const CoarseMesh& coarse, const FineGrid& fine) {
    if (fine.mx % coarse.nx != 0 || fine.my % coarse.ny != 0)
        throw NestingError("fine grid does not nest in coarse mesh: " +
                           std::to_string(fine.mx) + "x" + std::to_string(fine.my) +
                           " vs " + std::to_string(coarse.nx) + "x" +
                           std::to_string(coarse.ny));
}

ElementSubgrid subgrid_of_element(const CoarseMesh& coarse, const FineGrid& fine,
                                  int element) {
    check_nesting(coarse, fine);
    ElementSubgrid s;
    s.element = element;
    s.ex = coarse.element_x(element);
    s.ey = coarse.element_y(element);
    s.sx = fine.mx / coarse.nx;
    s.sy = fine.my / coarse.ny;
    s.node0_x = s.ex * s.sx;
    s.node0_y = s.ey * s.sy;
    return s;
}

Patch patch_of_edge(const CoarseMesh& coarse, const FineGrid& fine, int edge_id) {
    check_nesting(coarse, fine);
    const CoarseEdge& e = coarse.edges.at(edge_id);
    Patch p;
    p.edge_id = edge_id;
    p.n_elements = e.n_elements;
    for (int k = 0; k < e.n_elements; ++k)
        p.elements[k] = subgrid_of_element(coarse, fine, e.elements[k]);
    return p;
}

}  // namespace crmsfem
