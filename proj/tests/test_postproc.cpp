#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "crmsfem/errors.hpp"
#include "crmsfem/postproc.hpp"

using namespace crmsfem;

namespace {

const DomainSpec kUnit{0.0, 1.0, 0.0, 1.0};
const DomainSpec kCavity{-1.0, 1.0, 0.0, 1.0};

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

CoarseSolution zero_solution(const Setup& s) {
    CoarseSolution sol;
    sol.coarse = s.coarse;
    sol.u.assign(2 * s.coarse.n_edges(), 0.0);
    sol.p_bar.assign(s.coarse.n_elements(), 0.0);
    sol.basis_hash = s.set.provenance();
    return sol;
}

}  // namespace

TEST_CASE("pairwise_sum agrees with sequential accumulation") {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * i);
    const double seq = std::accumulate(v.begin(), v.end(), 0.0);
    CHECK(pairwise_sum(v) == doctest::Approx(seq).epsilon(1e-14));
    CHECK(pairwise_sum({}) == 0.0);
    CHECK(pairwise_sum({3.5}) == 3.5);
}

TEST_CASE("zero coefficients reconstruct the zero field") {
    const Setup s = make_setup(kUnit, 2, 2, 8, 8);
    const ReconstructedField f = reconstruct(zero_solution(s), s.set);
    for (const auto& v : f.u) {
        CHECK(v.x == 0.0);
        CHECK(v.y == 0.0);
    }
}

TEST_CASE("a single unit coefficient reproduces its basis function") {
    const Setup s = make_setup(kUnit, 2, 2, 16, 16);
    // Interior vertical edge between elements 0 and 1, x component.
    const int edge = s.coarse.vertical_edge_id(1, 0);
    CoarseSolution sol = zero_solution(s);
    sol.u[2 * edge + 0] = 1.0;
    const ReconstructedField f = reconstruct(sol, s.set);
    const BasisFunction phi = s.set.extract(edge, 0);

    for (int k = 0; k < phi.n_elements; ++k) {
        const ElementSubgrid& sub = phi.subgrids[k];
        // Strict interior nodes of the element are single-valued.
        for (int jy = 1; jy < sub.sy; ++jy)
            for (int jx = 1; jx < sub.sx; ++jx) {
                const int g = sub.global_node(s.fine, jx, jy);
                const int l = sub.local_node(jx, jy);
                CHECK(f.u[g].x == doctest::Approx(phi.fields[k].vx[l]).epsilon(1e-14));
                CHECK(f.u[g].y == doctest::Approx(phi.fields[k].vy[l]).epsilon(1e-14));
            }
    }
    // Nodes outside the patch stay zero (e.g. the far corner of element 3).
    const ElementSubgrid far = subgrid_of_element(s.coarse, s.fine, 3);
    const int g = far.global_node(s.fine, far.sx - 1, far.sy - 1);
    CHECK(f.u[g].x == 0.0);
    CHECK(f.u[g].y == 0.0);
}

TEST_CASE("reconstruction is linear in the coarse coefficients") {
    const Setup s = make_setup(kUnit, 2, 2, 8, 8);
    CoarseSolution a = zero_solution(s), b = zero_solution(s), c = zero_solution(s);
    for (int j = 0; j < (int)a.u.size(); ++j) {
        a.u[j] = std::sin(0.7 * j);
        b.u[j] = std::cos(1.3 * j);
        c.u[j] = a.u[j] + b.u[j];
    }
    const ReconstructedField fa = reconstruct(a, s.set);
    const ReconstructedField fb = reconstruct(b, s.set);
    const ReconstructedField fc = reconstruct(c, s.set);
    double scale = 0.0;
    for (const auto& v : fc.u) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
    for (std::size_t i = 0; i < fc.u.size(); ++i) {
        CHECK(std::abs(fc.u[i].x - fa.u[i].x - fb.u[i].x) <= 1e-12 * scale);
        CHECK(std::abs(fc.u[i].y - fa.u[i].y - fb.u[i].y) <= 1e-12 * scale);
    }
}

TEST_CASE("provenance mismatch between solution and basis is rejected") {
    const Setup s = make_setup(kUnit, 2, 2, 8, 8);
    CoarseSolution sol = zero_solution(s);
    sol.basis_hash ^= 1;
    CHECK_THROWS_AS(reconstruct(sol, s.set), ProvenanceMismatch);
}

TEST_CASE("error norms of a field against itself vanish") {
    const Setup s = make_setup(kUnit, 2, 2, 8, 8);
    CoarseSolution sol = zero_solution(s);
    for (int j = 0; j < (int)sol.u.size(); ++j) sol.u[j] = std::sin(0.3 * j);
    for (int e = 0; e < (int)sol.p_bar.size(); ++e) sol.p_bar[e] = 0.1 * e;
    const ReconstructedField f = reconstruct(sol, s.set);

    StokesField ref;
    ref.grid = s.fine;
    ref.u = f.u;
    ref.p.assign(s.fine.n_nodes(), 0.0);
    // Nodal pressure whose element averages match p_bar exactly.
    for (int iy = 0; iy <= s.fine.my; ++iy)
        for (int ix = 0; ix <= s.fine.mx; ++ix) {
            const int ex = std::min(ix * s.coarse.nx / s.fine.mx, s.coarse.nx - 1);
            const int ey = std::min(iy * s.coarse.ny / s.fine.my, s.coarse.ny - 1);
            ref.p[s.fine.node_id(ix, iy)] = sol.p_bar[s.coarse.element_id(ex, ey)];
        }
    const ErrorReport r = error_norms(f, ref, s.obstacles);
    CHECK(r.l1_rel <= 1e-13);
    CHECK(r.l2_rel <= 1e-13);
    CHECK(r.h1_rel <= 1e-13);
}

TEST_CASE("doubling the test field gives relative errors of exactly 1") {
    const Setup s = make_setup(kUnit, 2, 2, 8, 8);
    CoarseSolution sol = zero_solution(s);
    for (int j = 0; j < (int)sol.u.size(); ++j) sol.u[j] = std::cos(0.9 * j);
    ReconstructedField f = reconstruct(sol, s.set);

    StokesField ref;
    ref.grid = s.fine;
    ref.u = f.u;
    ref.p.assign(s.fine.n_nodes(), 0.0);
    for (auto& v : f.u) {
        v.x *= 2.0;
        v.y *= 2.0;
    }
    const ErrorReport r = error_norms(f, ref, s.obstacles);
    CHECK(r.l1_rel == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.l2_rel == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.h1_rel == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("values buried inside an obstacle do not affect the norms") {
    ObstacleSet obs;
    obs.epsilon = 0.5;
    obs.squares.push_back({0.5, 0.5, 0.5});
    const Setup s = make_setup(kUnit, 2, 2, 16, 16, obs);
    CoarseSolution sol = zero_solution(s);
    for (int j = 0; j < (int)sol.u.size(); ++j) sol.u[j] = std::sin(0.4 * j + 0.2);
    const ReconstructedField f = reconstruct(sol, s.set);

    StokesField ref;
    ref.grid = s.fine;
    ref.u.assign(s.fine.n_nodes(), Vec2{0.1, -0.2});
    ref.p.assign(s.fine.n_nodes(), 0.0);
    const ErrorReport before = error_norms(f, ref, s.obstacles);

    // Node (8,8) sits at the obstacle center; its whole Q1 support is solid.
    ref.u[s.fine.node_id(8, 8)] = Vec2{100.0, -50.0};
    const ErrorReport after = error_norms(f, ref, s.obstacles);
    CHECK(after.l2_rel == before.l2_rel);
    CHECK(after.h1_rel == before.h1_rel);
    CHECK(after.l1_rel == before.l1_rel);
}

TEST_CASE("grid mismatch between test and reference is rejected") {
    const Setup s = make_setup(kUnit, 2, 2, 8, 8);
    const ReconstructedField f = reconstruct(zero_solution(s), s.set);
    StokesField ref;
    ref.grid = build_fine(kUnit, 16, 16);
    ref.u.assign(ref.grid.n_nodes(), Vec2{});
    ref.p.assign(ref.grid.n_nodes(), 0.0);
    CHECK_THROWS_AS(error_norms(f, ref, s.obstacles), GridMismatch);
}

TEST_CASE("coarse-to-obstacle size ratios") {
    ObstacleSet obs;
    obs.epsilon = 0.0285;
    obs.squares.push_back({0.0, 0.5, 0.0285});
    const CoarseMesh c24 = build_coarse(kCavity, 2, 4);
    CHECK(h_over_eps(c24, obs) == doctest::Approx(17.544).epsilon(1e-4));

    ObstacleSet small;
    small.epsilon = 0.00832;
    small.squares.push_back({0.5, 0.5, 0.00832});
    const CoarseMesh c11 = build_coarse(kUnit, 1, 1);
    CHECK(h_over_eps(c11, small) == doctest::Approx(120.192).epsilon(1e-4));

    CHECK(h_over_eps(c11, ObstacleSet{}) == 0.0);

    // Non-square coarse cells have no single H.
    const CoarseMesh skew = build_coarse(kUnit, 2, 4);
    CHECK_THROWS_AS(h_over_eps(skew, obs), ValidationError);
}

TEST_CASE("convergence CSV round trip") {
    std::vector<ErrorReport> rows(3);
    rows[0] = {0.125, 0.1, 0.09, 0.5, 0.2, "2x4"};
    rows[1] = {0.0625, 0.05, 0.045, 0.35, 0.1, "4x8"};
    rows[2] = {1.0 / 3.0, 0.3333333333333333, 0.3, 0.9, 0.4, "8x16"};
    const std::string path = "/tmp/crmsfem_conv.csv";
    write_convergence_csv(path, rows);
    const auto back = read_convergence_csv(path);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].config == rows[i].config);
        CHECK(back[i].l1_rel == rows[i].l1_rel);  // 17 digits: exact round trip
        CHECK(back[i].l2_rel == rows[i].l2_rel);
        CHECK(back[i].h1_rel == rows[i].h1_rel);
        CHECK(back[i].l2_p_rel == rows[i].l2_p_rel);
        CHECK(back[i].h_over_eps == rows[i].h_over_eps);
    }
    std::remove(path.c_str());
}

TEST_CASE("header-only convergence CSV reads as empty") {
    const std::string path = "/tmp/crmsfem_conv_empty.csv";
    write_convergence_csv(path, {});
    CHECK(read_convergence_csv(path).empty());
    std::remove(path.c_str());
}

TEST_CASE("field outputs carry the expected headers") {
    const FineGrid grid = build_fine(kUnit, 2, 2);
    const std::vector<Vec2> u(grid.n_nodes(), Vec2{1.0, 2.0});
    const std::vector<double> p(grid.n_nodes(), 0.5);

    write_vtk("/tmp/crmsfem_f.vtk", grid, u, &p);
    std::ifstream vtk("/tmp/crmsfem_f.vtk");
    std::string line;
    std::getline(vtk, line);
    CHECK(line.rfind("# vtk DataFile", 0) == 0);

    write_field_csv("/tmp/crmsfem_f.csv", grid, u, p);
    std::ifstream csv("/tmp/crmsfem_f.csv");
    std::getline(csv, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    CHECK(line == "x,y,u_x,u_y,p");
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == grid.n_nodes());
    std::remove("/tmp/crmsfem_f.vtk");
    std::remove("/tmp/crmsfem_f.csv");
}
