#pragma once

#include <string>
#include <vector>

#include "crmsfem/basis.hpp"
#include "crmsfem/coarse_solver.hpp"
#include "crmsfem/fine_solver.hpp"

namespace crmsfem {

/// Fine-node MsFEM velocity plus the element-constant coarse pressure.
/// Fields are discontinuous across coarse edges; nodes on a coarse edge hold
/// the average of the one-sided reconstructions.
struct ReconstructedField {
    FineGrid grid;
    std::vector<Vec2> u;
    std::vector<double> p_bar;  // per coarse element
    CoarseMesh coarse;
};

struct ErrorReport {
    double l1_rel = 0.0;
    double l2_rel = 0.0;
    double h1_rel = 0.0;
    double l2_p_rel = 0.0;
    double h_over_eps = 0.0;
    std::string config;
};

/// Deterministic pairwise summation; used so parallel runs stay bit-stable.
double pairwise_sum(const std::vector<double>& values);

ReconstructedField reconstruct(const CoarseSolution& coarse_sol, const BasisSet& set);

/// L1/L2/H1 relative velocity errors over fluid quadrature points, plus the
/// relative L2 coarse-pressure error against fluid-weighted element averages
/// of the reference pressure.
ErrorReport error_norms(const ReconstructedField& test, const StokesField& reference,
                        const ObstacleSet& obstacles);

double h_over_eps(const CoarseMesh& coarse, const ObstacleSet& obstacles);

/// VTK legacy structured-points file holding u_x, u_y (and p if given).
void write_vtk(const std::string& path, const FineGrid& grid,
               const std::vector<Vec2>& u, const std::vector<double>* p = nullptr);

/// CSV (x, y, u_x, u_y, p) at 17 significant digits.
void write_field_csv(const std::string& path, const FineGrid& grid,
                     const std::vector<Vec2>& u, const std::vector<double>& p);

/// Convergence table mirroring the study columns.
void write_convergence_csv(const std::string& path,
                           const std::vector<ErrorReport>& reports);
std::vector<ErrorReport> read_convergence_csv(const std::string& path);

}  // namespace crmsfem
