#pragma once

#include <map>
#include <vector>

#include "crmsfem/geometry.hpp"
#include "crmsfem/linsys.hpp"
#include "crmsfem/mesh.hpp"

namespace crmsfem {

/// Nodal Q1-Q1 Stokes field on the fine grid.
struct StokesField {
    FineGrid grid;
    std::vector<Vec2> u;     // one per node
    std::vector<double> p;   // one per node
};

/// Penalized, stabilized fine-grid Stokes problem.
struct FineProblem {
    FineGrid grid;
    ObstacleSet obstacles;
    PenalizedCoefficients coeffs;
    BoundaryPreset preset;
    BodyForce body_force;  // may be null (zero force)
    double theta = 0.05;
};

/// Unknown ordering: (u_x, u_y, p) per node, so dof = 3*node + component.
struct FineDofMap {
    int n_nodes = 0;
    int n_dofs() const { return 3 * n_nodes; }
    int ux(int node) const { return 3 * node; }
    int uy(int node) const { return 3 * node + 1; }
    int p(int node) const { return 3 * node + 2; }
};

struct AssembledSystem {
    TripletBuffer triplets;
    std::vector<double> rhs;
    FineDofMap dof_map;

    AssembledSystem(int n, FineDofMap map) : triplets(n, n), rhs(n, 0.0), dof_map(map) {}
};

/// Assembles the stabilized penalized Q1-Q1 system:
///   nu^k grad-grad + sigma^k mass - pressure coupling,
///   -div row - theta h^2 pressure Laplacian,
/// with the 2x2 Gauss rule and per-quadrature-point coefficients.
AssembledSystem assemble_fine(const FineProblem& problem);

/// Dirichlet velocity values for every constrained boundary node, according
/// to the preset (natural sides are left unconstrained).
std::map<int, Vec2> dirichlet_values(const FineGrid& grid, const BoundaryPreset& preset);

/// Replaces constrained rows by identity rows with symmetric column
/// elimination, working on the triplet representation. Pairs (dof, value).
void apply_constraints(TripletBuffer& triplets, std::vector<double>& rhs,
                       const std::map<int, double>& fixed);

/// Velocity Dirichlet rows from the preset plus, for enclosed flow, one
/// pinned pressure dof. Throws InconsistentBC if no side is Dirichlet.
void apply_dirichlet(AssembledSystem& system, const FineGrid& grid,
                     const BoundaryPreset& preset);

/// Assemble, constrain, solve; pressure is mean-normalized over fluid
/// quadrature points. Residual is checked against 1e-8.
StokesField solve_reference(const FineProblem& problem, SolveReport* report = nullptr);

/// Mean of a nodal field over fluid quadrature points (2x2 Gauss, masked).
double fluid_mean(const FineGrid& grid, const ObstacleSet& obstacles,
                  const std::vector<double>& nodal);

}  // namespace crmsfem
