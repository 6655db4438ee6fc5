#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crmsfem/geometry.hpp"
#include "crmsfem/linsys.hpp"
#include "crmsfem/mesh.hpp"

namespace crmsfem {

/// Solution of one local constrained Stokes problem on one coarse element:
/// fine velocity and pressure on the element's subgrid nodes, plus the
/// Lagrange multipliers of the 4 edge-average constraints.
struct LocalBasisField {
    std::vector<double> vx, vy, pr;   // per local node
    std::array<double, 8> lambda{};   // (local edge, component)
    std::array<double, 8> constraint_residual{};
};

/// The 8 basis fields of a coarse element, indexed local_edge*2 + component
/// (local edges in element order bottom, right, top, left).
struct ElementBasis {
    ElementSubgrid subgrid;
    std::array<LocalBasisField, 8> fields;
};

/// Basis function Phi_{E,i}: its data on the 1 or 2 elements of the patch
/// omega_E. Evaluation outside the patch is identically zero by storage.
struct BasisFunction {
    int edge_id = -1;
    int component = 0;  // 0 = x, 1 = y
    int n_elements = 0;
    std::array<ElementSubgrid, 2> subgrids;
    std::array<LocalBasisField, 2> fields;
};

/// Complete basis over all edges and both components, stored per element.
struct BasisSet {
    CoarseMesh coarse;
    FineGrid fine;
    double theta = 0.0;
    std::uint64_t obstacle_hash = 0;
    std::vector<ElementBasis> elements;

    int n_basis() const { return 2 * coarse.n_edges(); }
    /// Provenance stamp over meshes, theta and obstacle hash.
    std::uint64_t provenance() const;
    /// Copy out the basis function of (edge, component).
    BasisFunction extract(int edge_id, int component) const;
    /// Index of edge_id within element e's 4 local edges; -1 if not incident.
    int local_edge_index(int element, int edge_id) const;
};

/// Local saddle system of one coarse element, reusable for all 8 right-hand
/// sides. Unknowns: (u_x, u_y, p) per local node, then 8 edge multipliers,
/// then the pressure-mean multiplier.
class LocalElementSystem {
public:
    LocalElementSystem(const ElementSubgrid& sub, const FineGrid& fine,
                       const ObstacleSet& obstacles, const PenalizedCoefficients& coeffs,
                       double theta);

    /// Solve for the field whose edge-average datum is e_component on local
    /// edge `local_edge` and zero on the others.
    LocalBasisField solve(int local_edge, int component) const;

    const std::array<std::vector<double>, 4>& edge_weights() const { return edge_weights_; }

private:
    ElementSubgrid sub_;
    std::array<std::vector<double>, 4> edge_weights_;  // trapezoid, per local edge node
    std::array<std::vector<int>, 4> edge_nodes_;       // local node ids along each edge
    std::optional<SparseFactorization> fact_;
    int n_nodes_ = 0;
};

BasisFunction compute_basis_for_edge(int edge_id, int component, const CoarseMesh& coarse,
                                     const FineGrid& fine, const ObstacleSet& obstacles,
                                     const PenalizedCoefficients& coeffs, double theta);

/// All (edge, component) pairs; one factorization per element, solved for all
/// 8 data vectors. Result is independent of the parallelism degree.
BasisSet compute_basis_set(const CoarseMesh& coarse, const FineGrid& fine,
                           const ObstacleSet& obstacles,
                           const PenalizedCoefficients& coeffs, double theta,
                           int parallelism = 1);

struct BasisAuditEntry {
    int edge_id;
    int component;
    double max_constraint_residual;
    double pressure_mean_residual;
    double div_constancy_deviation;  // warned, not failed, in obstacle runs
    bool ok;
};

struct BasisAuditReport {
    std::vector<BasisAuditEntry> entries;
    double max_constraint_residual = 0.0;
    double max_pressure_mean_residual = 0.0;
    double max_div_deviation = 0.0;
    bool ok = true;
};

/// Recomputes the edge-average constraints and pressure means from the stored
/// fields; fails an entry when either exceeds 1e-8.
BasisAuditReport audit_basis(const BasisSet& set, const ObstacleSet& obstacles);

}  // namespace crmsfem
