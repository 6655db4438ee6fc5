#pragma once

#include <vector>

#include "crmsfem/basis.hpp"
#include "crmsfem/geometry.hpp"
#include "crmsfem/linsys.hpp"
#include "crmsfem/mesh.hpp"

namespace crmsfem {

/// Coarse saddle-point system in the multiscale basis. Velocity dof
/// (edge E, component i) -> 2*E + i; element pressures follow.
struct CoarseSystem {
    int n_edges = 0;
    int n_elements = 0;
    TripletBuffer triplets;
    std::vector<double> rhs;

    CoarseSystem(int edges, int elements)
        : n_edges(edges),
          n_elements(elements),
          triplets(2 * edges + elements, 2 * edges + elements),
          rhs(2 * edges + elements, 0.0) {}

    int u_dof(int edge, int component) const { return 2 * edge + component; }
    int p_dof(int element) const { return 2 * n_edges + element; }
    int n_dofs() const { return 2 * n_edges + n_elements; }
};

/// Per-(edge, component) velocity coefficients and element-wise pressures.
struct CoarseSolution {
    CoarseMesh coarse;
    std::vector<double> u;       // 2 per edge: u[2*E+i]
    std::vector<double> p_bar;   // 1 per element
    std::uint64_t basis_hash = 0;

    double velocity(int edge, int component) const { return u[2 * edge + component]; }
};

/// A entries: int nu^k grad Phi : grad Phi' + int sigma^k Phi . Phi';
/// B entries: -int_T div Phi; rhs: int f^k . Phi. All with the 2x2 Gauss rule
/// on the fine cells of the shared element(s).
CoarseSystem assemble_coarse(const BasisSet& set, const PenalizedCoefficients& coeffs,
                             const ObstacleSet& obstacles,
                             const BodyForce& body_force = nullptr);

/// Fixes boundary-edge velocity dofs to edge averages of the boundary data
/// (5-point Gauss-Legendre per edge); natural sides stay free. For enclosed
/// flow pins one element pressure.
void apply_coarse_bc(CoarseSystem& system, const CoarseMesh& coarse,
                     const BoundaryPreset& preset);

/// Solves the constrained coarse system; for enclosed flow the pressure is
/// shifted to zero fluid-weighted mean.
CoarseSolution solve_coarse(const CoarseSystem& system, const BasisSet& set,
                            const ObstacleSet& obstacles, const BoundaryPreset& preset,
                            SolveReport* report = nullptr);

/// Edge average (1/|e|) int_e w of the prescribed boundary velocity.
Vec2 boundary_edge_average(const CoarseEdge& edge, const BoundaryPreset& preset,
                           const DomainSpec& domain);

}  // namespace crmsfem
