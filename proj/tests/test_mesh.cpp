#include <doctest.h>

#include "crmsfem/errors.hpp"
#include "crmsfem/mesh.hpp"

using namespace crmsfem;

namespace {
const DomainSpec kCavity{-1.0, 1.0, 0.0, 1.0};
const DomainSpec kChannel{0.0, 4.0, -1.0, 1.0};
}  // namespace

TEST_CASE("coarse mesh counts and square cells for the cavity 2x4 config") {
    const CoarseMesh m = build_coarse(kCavity, 2, 4);
    CHECK(m.n_elements() == 8);
    CHECK(m.n_edges() == 22);  // nx(ny+1) + ny(nx+1) = 12 + 10
    CHECK(m.hx == doctest::Approx(0.5));
    CHECK(m.hy == doctest::Approx(0.5));
}

TEST_CASE("single element mesh: 4 edges, all boundary") {
    const CoarseMesh m = build_coarse(kCavity, 1, 1);
    CHECK(m.n_elements() == 1);
    CHECK(m.n_edges() == 4);
    for (const auto& e : m.edges) {
        CHECK(e.on_boundary);
        CHECK(e.n_elements == 1);
    }
}

TEST_CASE("interior edges have 2 elements, boundary edges 1") {
    const CoarseMesh m = build_coarse(kChannel, 3, 5);
    int interior = 0, boundary = 0;
    for (const auto& e : m.edges) {
        if (e.on_boundary) {
            CHECK(e.n_elements == 1);
            ++boundary;
        } else {
            CHECK(e.n_elements == 2);
            ++interior;
        }
    }
    CHECK(boundary == 2 * 3 + 2 * 5);
    CHECK(interior + boundary == m.n_edges());
}

TEST_CASE("edge-element incidence is symmetric") {
    const CoarseMesh m = build_coarse(kCavity, 3, 6);
    for (int e = 0; e < m.n_elements(); ++e) {
        for (int edge : m.element_edges(e)) {
            const CoarseEdge& ce = m.edges[edge];
            const bool listed = ce.elements[0] == e || ce.elements[1] == e;
            CHECK(listed);
        }
    }
    for (int edge = 0; edge < m.n_edges(); ++edge) {
        const CoarseEdge& ce = m.edges[edge];
        for (int k = 0; k < ce.n_elements; ++k) {
            const auto edges = m.element_edges(ce.elements[k]);
            const bool listed = edges[0] == edge || edges[1] == edge ||
                                edges[2] == edge || edges[3] == edge;
            CHECK(listed);
        }
    }
}

TEST_CASE("fine grid spacing matches the reference resolutions") {
    const FineGrid a = build_fine(kChannel, 640, 1280);
    CHECK(a.hx == doctest::Approx(0.003125));
    CHECK(a.hy == doctest::Approx(0.003125));

    const FineGrid b = build_fine(DomainSpec{0, 1, 0, 1}, 1, 1);
    CHECK(b.n_nodes() == 4);
    CHECK(b.n_cells() == 1);

    const FineGrid c = build_fine(kCavity, 640, 1280);
    CHECK(c.hx == doctest::Approx(0.0015625));
    CHECK(c.hy == doctest::Approx(0.0015625));
}

TEST_CASE("patch of an interior edge on a nested grid") {
    const CoarseMesh coarse = build_coarse(DomainSpec{0, 1, 0, 1}, 2, 2);
    const FineGrid fine = build_fine(DomainSpec{0, 1, 0, 1}, 8, 8);
    // Interior vertical edge between elements (0,0) and (1,0).
    const int edge = coarse.vertical_edge_id(1, 0);
    const Patch p = patch_of_edge(coarse, fine, edge);
    CHECK(p.n_elements == 2);
    for (int k = 0; k < 2; ++k) {
        CHECK(p.elements[k].sx == 4);
        CHECK(p.elements[k].sy == 4);
    }
}

TEST_CASE("boundary edge patch has one element") {
    const CoarseMesh coarse = build_coarse(DomainSpec{0, 1, 0, 1}, 2, 2);
    const FineGrid fine = build_fine(DomainSpec{0, 1, 0, 1}, 8, 8);
    const Patch p = patch_of_edge(coarse, fine, coarse.horizontal_edge_id(0, 0));
    CHECK(p.n_elements == 1);
}

TEST_CASE("nesting violation raises") {
    const CoarseMesh coarse = build_coarse(DomainSpec{0, 1, 0, 1}, 3, 3);
    const FineGrid fine = build_fine(DomainSpec{0, 1, 0, 1}, 8, 8);
    CHECK_THROWS_AS(patch_of_edge(coarse, fine, 0), NestingError);
}

TEST_CASE("every fine cell belongs to exactly one coarse element") {
    const CoarseMesh coarse = build_coarse(kCavity, 2, 4);
    const FineGrid fine = build_fine(kCavity, 8, 16);
    std::vector<int> owner(fine.n_cells(), 0);
    for (int e = 0; e < coarse.n_elements(); ++e) {
        const ElementSubgrid sub = subgrid_of_element(coarse, fine, e);
        for (int cy = 0; cy < sub.sy; ++cy)
            for (int cx = 0; cx < sub.sx; ++cx)
                owner[(sub.node0_y + cy) * fine.mx + sub.node0_x + cx] += 1;
    }
    for (int c : owner) CHECK(c == 1);
}
