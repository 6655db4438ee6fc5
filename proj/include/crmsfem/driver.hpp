#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crmsfem/basis.hpp"
#include "crmsfem/coarse_solver.hpp"
#include "crmsfem/fine_solver.hpp"
#include "crmsfem/postproc.hpp"

namespace crmsfem {

/// A named experiment: domain, boundary preset and obstacle recipe.
struct Scenario {
    std::string name;
    DomainSpec domain;
    BoundaryPreset preset;
    int obstacle_count = 0;
    double epsilon = 0.0;
    double margin = 0.0;
};

/// Presets: cavity49, channelA16, channelB144, and the obstacle-free
/// cavity0 / channel0 variants. Throws ValidationError for unknown names.
Scenario resolve_scenario(const std::string& name);

struct RunConfig {
    std::string scenario = "cavity49";
    int fine_my = 160, fine_mx = 320;
    std::vector<std::pair<int, int>> coarse;  // (ny, nx) sweep entries
    double theta = 0.05;
    std::uint64_t seed = 7;
    std::string out_dir = "out";
    int jobs = 1;
    // Optional overrides of the scenario's obstacle recipe.
    int obstacle_count = -1;
    double epsilon = -1.0;

    /// Throws ValidationError on bad divisibility, theta <= 0, or an
    /// unresolvable scenario.
    void validate() const;
};

struct RunStats {
    int reference_solves = 0;
    int basis_sets = 0;
    int coarse_solves = 0;
    double seconds_reference = 0.0;
    double seconds_basis = 0.0;
    double seconds_coarse = 0.0;
};

struct MsfemResult {
    BasisSet basis;
    CoarseSolution coarse_sol;
    ReconstructedField field;
};

ObstacleSet scenario_obstacles(const RunConfig& config, const Scenario& scenario);

/// Fine reference solve; writes VTK/CSV fields and the obstacle JSON.
StokesField run_reference(const RunConfig& config, RunStats* stats = nullptr,
                          bool write_files = true);

/// Full MsFEM pipeline for a single coarse config; writes reconstructed
/// fields and the coarse-solution JSON.
MsfemResult run_msfem(const RunConfig& config, int ny, int nx,
                      RunStats* stats = nullptr, bool write_files = true);

/// Reference once, then every sweep entry scored against it; writes the
/// convergence CSV and returns the table.
std::vector<ErrorReport> run_sweep(const RunConfig& config, RunStats* stats = nullptr);

/// Writes per-basis fields of one edge for inspection.
void run_basis_dump(const RunConfig& config, int ny, int nx, int edge_id);

/// JSON serialization of a coarse solution (edge dofs, element pressures,
/// provenance).
std::string coarse_solution_to_json(const CoarseSolution& sol);

}  // namespace crmsfem
