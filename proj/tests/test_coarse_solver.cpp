#include <doctest.h>

#include <cmath>

#include "crmsfem/coarse_solver.hpp"
#include "crmsfem/errors.hpp"

using namespace crmsfem;

namespace {

const DomainSpec kCavity{-1.0, 1.0, 0.0, 1.0};
const DomainSpec kChannel{0.0, 4.0, -1.0, 1.0};

struct Setup {
    CoarseMesh coarse;
    FineGrid fine;
    ObstacleSet obstacles;
    PenalizedCoefficients coeffs;
    BasisSet set;
};

Setup make_setup(const DomainSpec& domain, int ny, int nx, int my, int mx,
                 ObstacleSet obstacles = {}) {
    Setup s;
    s.coarse = build_coarse(domain, ny, nx);
    s.fine = build_fine(domain, my, mx);
    s.obstacles = std::move(obstacles);
    s.coeffs = PenalizedCoefficients{1.0, s.fine.h()};
    s.set = compute_basis_set(s.coarse, s.fine, s.obstacles, s.coeffs, 0.05);
    return s;
}

}  // namespace

TEST_CASE("velocity dofs of edges with disjoint patches never couple") {
    const Setup s = make_setup(kCavity, 2, 4, 16, 32);
    CoarseSystem sys = assemble_coarse(s.set, s.coeffs, s.obstacles);
    const auto D = to_dense(compress(sys.triplets));
    const int n = sys.n_dofs();
    for (int e1 = 0; e1 < s.coarse.n_edges(); ++e1) {
        for (int e2 = e1 + 1; e2 < s.coarse.n_edges(); ++e2) {
            const auto& a = s.coarse.edges[e1];
            const auto& b = s.coarse.edges[e2];
            bool share = false;
            for (int i = 0; i < a.n_elements; ++i)
                for (int j = 0; j < b.n_elements; ++j)
                    if (a.elements[i] == b.elements[j]) share = true;
            if (share) continue;
            for (int ci = 0; ci < 2; ++ci)
                for (int cj = 0; cj < 2; ++cj)
                    CHECK(D[sys.u_dof(e1, ci) * n + sys.u_dof(e2, cj)] == 0.0);
        }
    }
}

TEST_CASE("zero body force gives a zero right-hand side") {
    const Setup s = make_setup(kCavity, 2, 2, 8, 8);
    const CoarseSystem sys = assemble_coarse(s.set, s.coeffs, s.obstacles);
    for (double v : sys.rhs) CHECK(v == 0.0);
}

TEST_CASE("divergence entries equal signed edge lengths on one element") {
    // -int_T div Phi_{E,i} = -|E| (n_E . e_i) by the divergence theorem and
    // the unit edge-average constraints. Unit square: |E| = 1.
    const Setup s = make_setup(DomainSpec{0, 1, 0, 1}, 1, 1, 8, 8);
    CoarseSystem sys = assemble_coarse(s.set, s.coeffs, s.obstacles);
    const auto D = to_dense(compress(sys.triplets));
    const int n = sys.n_dofs();
    const int p = sys.p_dof(0);
    const auto edges = s.coarse.element_edges(0);
    for (int k = 0; k < 4; ++k) {
        const Vec2 normal = CoarseMesh::local_edge_normal(k);
        const double bx = D[p * n + sys.u_dof(edges[k], 0)];
        const double by = D[p * n + sys.u_dof(edges[k], 1)];
        CHECK(bx == doctest::Approx(-normal.x).epsilon(1e-6));
        CHECK(by == doctest::Approx(-normal.y).epsilon(1e-6));
    }
}

TEST_CASE("boundary averages of the parabolic inflow profile") {
    const CoarseMesh coarse = build_coarse(kChannel, 4, 8);
    const BoundaryPreset preset = BoundaryPreset::channel_parabolic();
    // Left edge spanning y in [0, 0.5]: average of 1 - y^2 is 11/12.
    const int e = coarse.vertical_edge_id(0, 2);
    REQUIRE(coarse.edges[e].a.y == doctest::Approx(0.0));
    const Vec2 avg = boundary_edge_average(coarse.edges[e], preset, kChannel);
    CHECK(avg.x == doctest::Approx(11.0 / 12.0).epsilon(1e-12));
    CHECK(avg.y == doctest::Approx(0.0));
    // Top edge is no-slip.
    const Vec2 top = boundary_edge_average(
        coarse.edges[coarse.horizontal_edge_id(0, 4)], preset, kChannel);
    CHECK(top.x == 0.0);
    CHECK(top.y == 0.0);
}

TEST_CASE("lid edges average to (1,0), walls to (0,0)") {
    const CoarseMesh coarse = build_coarse(kCavity, 2, 4);
    const BoundaryPreset preset = BoundaryPreset::cavity_lid();
    const Vec2 lid = boundary_edge_average(
        coarse.edges[coarse.horizontal_edge_id(1, 2)], preset, kCavity);
    CHECK(lid.x == doctest::Approx(1.0));
    CHECK(lid.y == doctest::Approx(0.0));
    const Vec2 wall = boundary_edge_average(
        coarse.edges[coarse.vertical_edge_id(0, 1)], preset, kCavity);
    CHECK(wall.x == doctest::Approx(0.0));
    CHECK(wall.y == doctest::Approx(0.0));
}

TEST_CASE("constrained coarse system matches the dense LU oracle") {
    const Setup s = make_setup(kCavity, 2, 4, 16, 32);
    CoarseSystem sys = assemble_coarse(s.set, s.coeffs, s.obstacles);
    apply_coarse_bc(sys, s.coarse, BoundaryPreset::cavity_lid());
    const CompressedMatrix A = compress(sys.triplets);
    const auto [xs, report] = solve_direct(A, sys.rhs);
    const auto xd = dense_oracle_solve(to_dense(A), sys.rhs);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        scale = std::max(scale, std::abs(xd[i]));
        diff = std::max(diff, std::abs(xs[i] - xd[i]));
    }
    CHECK(diff <= 1e-10 * scale);
}

TEST_CASE("solved cavity flow balances mass on every interior element") {
    ObstacleSet obs;
    obs.epsilon = 0.1;
    obs.squares.push_back({-0.3, 0.45, 0.1});
    obs.squares.push_back({0.4, 0.6, 0.1});
    const Setup s = make_setup(kCavity, 2, 4, 32, 64, obs);
    CoarseSystem sys = assemble_coarse(s.set, s.coeffs, s.obstacles);
    const auto D = to_dense(compress(sys.triplets));  // pre-BC divergence rows
    apply_coarse_bc(sys, s.coarse, BoundaryPreset::cavity_lid());
    const CoarseSolution sol =
        solve_coarse(sys, s.set, s.obstacles, BoundaryPreset::cavity_lid());

    const int n = sys.n_dofs();
    double umax = 0.0;
    for (double v : sol.u) umax = std::max(umax, std::abs(v));
    REQUIRE(umax > 0.0);
    // p_dof(0) is the pressure pin, its row was replaced; check the others.
    for (int e = 1; e < s.coarse.n_elements(); ++e) {
        const int p = sys.p_dof(e);
        double div = 0.0;
        for (int j = 0; j < 2 * s.coarse.n_edges(); ++j) div += D[p * n + j] * sol.u[j];
        CHECK(std::abs(div) <= 1e-6 * umax);
    }
}

TEST_CASE("enclosed-flow pressure has zero fluid-weighted mean") {
    ObstacleSet obs;
    obs.epsilon = 0.15;
    obs.squares.push_back({0.0, 0.5, 0.15});
    const Setup s = make_setup(kCavity, 2, 4, 16, 32, obs);
    CoarseSystem sys = assemble_coarse(s.set, s.coeffs, s.obstacles);
    apply_coarse_bc(sys, s.coarse, BoundaryPreset::cavity_lid());
    const CoarseSolution sol =
        solve_coarse(sys, s.set, s.obstacles, BoundaryPreset::cavity_lid());

    // Fluid measure per element: the obstacle sits in elements 1 and 5.
    double mean = 0.0, measure = 0.0, pmax = 0.0;
    const double cellw = s.fine.hx * s.fine.hy / 4.0;
    for (int e = 0; e < s.coarse.n_elements(); ++e) {
        const ElementSubgrid sub = subgrid_of_element(s.coarse, s.fine, e);
        double fluid = 0.0;
        for (int cy = 0; cy < sub.sy; ++cy)
            for (int cx = 0; cx < sub.sx; ++cx)
                for (int q = 0; q < 4; ++q) {
                    const double gx = s.fine.node_x(sub.node0_x + cx) +
                                      s.fine.hx * (0.5 + ((q % 2) ? 1 : -1) * 0.288675134594813);
                    const double gy = s.fine.node_y(sub.node0_y + cy) +
                                      s.fine.hy * (0.5 + ((q / 2) ? 1 : -1) * 0.288675134594813);
                    if (!s.obstacles.contains(gx, gy)) fluid += cellw;
                }
        mean += fluid * sol.p_bar[e];
        measure += fluid;
        pmax = std::max(pmax, std::abs(sol.p_bar[e]));
    }
    REQUIRE(pmax > 0.0);
    CHECK(std::abs(mean / measure) <= 1e-10 * pmax);
}

TEST_CASE("obstacle-free channel solution is symmetric about the midline") {
    const Setup s = make_setup(kChannel, 2, 4, 16, 32);
    CoarseSystem sys = assemble_coarse(s.set, s.coeffs, s.obstacles);
    const BoundaryPreset preset = BoundaryPreset::channel_parabolic();
    apply_coarse_bc(sys, s.coarse, preset);
    const CoarseSolution sol = solve_coarse(sys, s.set, s.obstacles, preset);

    double umax = 0.0;
    for (double v : sol.u) umax = std::max(umax, std::abs(v));
    const int ny = s.coarse.ny, nx = s.coarse.nx;
    for (int iy = 0; iy <= ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const int a = s.coarse.horizontal_edge_id(ix, iy);
            const int b = s.coarse.horizontal_edge_id(ix, ny - iy);
            CHECK(std::abs(sol.velocity(a, 0) - sol.velocity(b, 0)) <= 1e-9 * umax);
            CHECK(std::abs(sol.velocity(a, 1) + sol.velocity(b, 1)) <= 1e-9 * umax);
        }
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix <= nx; ++ix) {
            const int a = s.coarse.vertical_edge_id(ix, iy);
            const int b = s.coarse.vertical_edge_id(ix, ny - 1 - iy);
            CHECK(std::abs(sol.velocity(a, 0) - sol.velocity(b, 0)) <= 1e-9 * umax);
            CHECK(std::abs(sol.velocity(a, 1) + sol.velocity(b, 1)) <= 1e-9 * umax);
        }
}

TEST_CASE("assembling against foreign obstacles is rejected") {
    const Setup s = make_setup(kCavity, 2, 2, 8, 8);
    ObstacleSet other;
    other.epsilon = 0.1;
    other.squares.push_back({0.0, 0.5, 0.1});
    CHECK_THROWS_AS(assemble_coarse(s.set, s.coeffs, other), ProvenanceMismatch);
}
