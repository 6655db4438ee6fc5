#pragma once

#include <array>
#include <vector>

#include "crmsfem/geometry.hpp"

namespace crmsfem {

enum class EdgeOrientation { Horizontal, Vertical };

/// One edge of the coarse mesh. Horizontal edges run along x at a fixed y
/// level; vertical edges run along y at a fixed x level.
struct CoarseEdge {
    EdgeOrientation orientation;
    int ix, iy;              // lattice position of the edge
    Vec2 a, b;               // endpoints, a precedes b along the edge axis
    bool on_boundary;
    std::array<int, 2> elements;  // adjacent element ids, -1 if absent
    int n_elements;

    double length() const;
    /// Boundary side this edge lies on; only valid when on_boundary.
    Side boundary_side(int nx, int ny) const;
};

/// Uniform rectangular coarse partition. Elements and edges are enumerated
/// row-major, x fastest. Edge ids: all horizontal edges first (nx*(ny+1)),
/// then vertical edges (ny*(nx+1)).
struct CoarseMesh {
    DomainSpec domain;
    int nx = 0, ny = 0;
    double hx = 0.0, hy = 0.0;  // element widths H_x, H_y
    std::vector<CoarseEdge> edges;

    int n_elements() const { return nx * ny; }
    int n_edges() const { return static_cast<int>(edges.size()); }

    int element_id(int ex, int ey) const { return ey * nx + ex; }
    int element_x(int e) const { return e % nx; }
    int element_y(int e) const { return e / nx; }

    int horizontal_edge_id(int ix, int iy) const { return iy * nx + ix; }
    int vertical_edge_id(int ix, int iy) const { return nx * (ny + 1) + iy * (nx + 1) + ix; }

    /// The 4 edges of an element, in local order {bottom, right, top, left}.
    std::array<int, 4> element_edges(int e) const;
    /// Outward unit normal of local edge k of an element.
    static Vec2 local_edge_normal(int k);
};

/// Uniform global fine grid. Nodes are enumerated row-major, x fastest:
/// node(ix,iy) = iy*(mx+1)+ix; cells likewise with stride mx.
struct FineGrid {
    DomainSpec domain;
    int mx = 0, my = 0;
    double hx = 0.0, hy = 0.0;

    int n_nodes() const { return (mx + 1) * (my + 1); }
    int n_cells() const { return mx * my; }
    int node_id(int ix, int iy) const { return iy * (mx + 1) + ix; }
    double node_x(int ix) const { return domain.x_min + ix * hx; }
    double node_y(int iy) const { return domain.y_min + iy * hy; }
    /// Minimum cell width; the h of the penalization and stabilization.
    double h() const { return hx < hy ? hx : hy; }
};

/// Fine subgrid owned by one coarse element: local nodes are enumerated
/// row-major over an (sx+1) x (sy+1) lattice.
struct ElementSubgrid {
    int element = -1;
    int ex = 0, ey = 0;   // coarse lattice position
    int sx = 0, sy = 0;   // fine cells per coarse element in x and y
    int node0_x = 0, node0_y = 0;  // global fine-node indices of the SW corner

    int n_nodes() const { return (sx + 1) * (sy + 1); }
    int n_cells() const { return sx * sy; }
    int local_node(int jx, int jy) const { return jy * (sx + 1) + jx; }
    int global_node(const FineGrid& fine, int jx, int jy) const {
        return fine.node_id(node0_x + jx, node0_y + jy);
    }
};

/// The patch omega_E of an edge: its 1 or 2 adjacent coarse elements with
/// their fine subgrids.
struct Patch {
    int edge_id = -1;
    std::array<ElementSubgrid, 2> elements;
    int n_elements = 0;
};

CoarseMesh build_coarse(const DomainSpec& domain, int ny, int nx);
FineGrid build_fine(const DomainSpec& domain, int my, int mx);

/// Throws NestingError unless mx % nx == 0 and my % ny == 0.
void check_nesting(const CoarseMesh& coarse, const FineGrid& fine);

ElementSubgrid subgrid_of_element(const CoarseMesh& coarse, const FineGrid& fine, int element);
Patch patch_of_edge(const CoarseMesh& coarse, const FineGrid& fine, int edge_id);

}  // namespace crmsfem
