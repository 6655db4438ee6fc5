#include "crmsfem/driver.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "crmsfem/errors.hpp"

namespace crmsfem {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string config_label(int ny, int nx) {
    return std::to_string(ny) + "x" + std::to_string(nx);
}

void ensure_dir(const std::string& dir) {
    std::filesystem::create_directories(dir);
}

}  // namespace

Scenario resolve_scenario(const std::string& name) {
    if (name == "cavity49")
        return {name, {-1.0, 1.0, 0.0, 1.0}, BoundaryPreset::cavity_lid(), 49, 0.0285,
                0.05};
    if (name == "cavity0")
        return {name, {-1.0, 1.0, 0.0, 1.0}, BoundaryPreset::cavity_lid(), 0, 0.0, 0.0};
    if (name == "channelA16")
        return {name, {0.0, 4.0, -1.0, 1.0}, BoundaryPreset::channel_parabolic(), 16,
                0.02, 0.1};
    if (name == "channelB144")
        return {name, {0.0, 4.0, -1.0, 1.0}, BoundaryPreset::channel_parabolic(), 144,
                0.00832, 0.1};
    if (name == "channel0")
        return {name, {0.0, 4.0, -1.0, 1.0}, BoundaryPreset::channel_parabolic(), 0, 0.0,
                0.0};
    throw ValidationError("unknown scenario: " + name);
}

void RunConfig::validate() const {
    resolve_scenario(scenario);
    if (theta <= 0.0) throw ValidationError("theta must be > 0");
    if (fine_mx < 1 || fine_my < 1) throw ValidationError("fine resolution must be >= 1");
    if (jobs < 1) throw ValidationError("jobs must be >= 1");
    for (const auto& [ny, nx] : coarse) {
        if (ny < 1 || nx < 1) throw ValidationError("coarse config must be >= 1x1");
        if (fine_mx % nx != 0 || fine_my % ny != 0)
            throw ValidationError("coarse config " + config_label(ny, nx) +
                                  " does not divide fine " + config_label(fine_my, fine_mx));
    }
}

ObstacleSet scenario_obstacles(const RunConfig& config, const Scenario& scenario) {
    const int count = config.obstacle_count >= 0 ? config.obstacle_count
                                                 : scenario.obstacle_count;
    const double eps = config.epsilon > 0.0 ? config.epsilon : scenario.epsilon;
    if (count == 0) return ObstacleSet{};
    return generate_obstacles(count, eps, scenario.domain, scenario.margin, config.seed);
}

StokesField run_reference(const RunConfig& config, RunStats* stats, bool write_files) {
    config.validate();
    const Scenario scenario = resolve_scenario(config.scenario);
    const ObstacleSet obstacles = scenario_obstacles(config, scenario);

    FineProblem problem;
    problem.grid = build_fine(scenario.domain, config.fine_my, config.fine_mx);
    problem.obstacles = obstacles;
    problem.coeffs = PenalizedCoefficients{1.0, problem.grid.h()};
    problem.preset = scenario.preset;
    problem.theta = config.theta;

    const auto t0 = std::chrono::steady_clock::now();
    StokesField field = solve_reference(problem);
    if (stats) {
        stats->reference_solves += 1;
        stats->seconds_reference += seconds_since(t0);
    }

    if (write_files) {
        ensure_dir(config.out_dir);
        const std::string base = config.out_dir + "/" + config.scenario + "_" +
                                 config_label(config.fine_my, config.fine_mx);
        write_vtk(base + "_reference.vtk", field.grid, field.u, &field.p);
        write_field_csv(base + "_reference.csv", field.grid, field.u, field.p);
        std::ofstream(base + "_obstacles.json") << obstacles.to_json();
    }
    return field;
}

MsfemResult run_msfem(const RunConfig& config, int ny, int nx, RunStats* stats,
                      bool write_files) {
    config.validate();
    if (config.fine_mx % nx != 0 || config.fine_my % ny != 0)
        throw ValidationError("coarse config " + config_label(ny, nx) +
                              " does not divide fine grid");
    const Scenario scenario = resolve_scenario(config.scenario);
    const ObstacleSet obstacles = scenario_obstacles(config, scenario);

    const CoarseMesh coarse = build_coarse(scenario.domain, ny, nx);
    const FineGrid fine = build_fine(scenario.domain, config.fine_my, config.fine_mx);
    const PenalizedCoefficients coeffs{1.0, fine.h()};

    MsfemResult result;
    auto t0 = std::chrono::steady_clock::now();
    result.basis = compute_basis_set(coarse, fine, obstacles, coeffs, config.theta,
                                     config.jobs);
    if (stats) {
        stats->basis_sets += 1;
        stats->seconds_basis += seconds_since(t0);
    }

    t0 = std::chrono::steady_clock::now();
    CoarseSystem system = assemble_coarse(result.basis, coeffs, obstacles);
    apply_coarse_bc(system, coarse, scenario.preset);
    result.coarse_sol = solve_coarse(system, result.basis, obstacles, scenario.preset);
    if (stats) {
        stats->coarse_solves += 1;
        stats->seconds_coarse += seconds_since(t0);
    }

    result.field = reconstruct(result.coarse_sol, result.basis);

    if (write_files) {
        ensure_dir(config.out_dir);
        const std::string base = config.out_dir + "/" + config.scenario + "_" +
                                 config_label(ny, nx);
        // Element-constant pressure sampled at nodes; interior element wins at
        // coarse-edge nodes (clamped integer division).
        std::vector<double> nodal_p(fine.n_nodes(), 0.0);
        for (int iy = 0; iy <= fine.my; ++iy) {
            const int ey = std::min(iy * ny / fine.my, ny - 1);
            for (int ix = 0; ix <= fine.mx; ++ix) {
                const int ex = std::min(ix * nx / fine.mx, nx - 1);
                nodal_p[fine.node_id(ix, iy)] =
                    result.coarse_sol.p_bar[coarse.element_id(ex, ey)];
            }
        }
        write_vtk(base + "_msfem.vtk", fine, result.field.u);
        write_field_csv(base + "_msfem.csv", fine, result.field.u, nodal_p);
        std::ofstream(base + "_coarse.json") << coarse_solution_to_json(result.coarse_sol);
    }
    return result;
}

std::vector<ErrorReport> run_sweep(const RunConfig& config, RunStats* stats) {
    config.validate();
    const Scenario scenario = resolve_scenario(config.scenario);
    const ObstacleSet obstacles = scenario_obstacles(config, scenario);

    StokesField reference = run_reference(config, stats, /*write_files=*/false);

    std::vector<ErrorReport> reports;
    for (const auto& [ny, nx] : config.coarse) {
        MsfemResult result = run_msfem(config, ny, nx, stats, /*write_files=*/false);
        ErrorReport rep = error_norms(result.field, reference, obstacles);
        rep.config = config_label(ny, nx);
        rep.h_over_eps = h_over_eps(result.basis.coarse, obstacles);
        reports.push_back(rep);
    }

    ensure_dir(config.out_dir);
    write_convergence_csv(config.out_dir + "/" + config.scenario + "_convergence.csv",
                          reports);
    return reports;
}

void run_basis_dump(const RunConfig& config, int ny, int nx, int edge_id) {
    config.validate();
    const Scenario scenario = resolve_scenario(config.scenario);
    const ObstacleSet obstacles = scenario_obstacles(config, scenario);
    const CoarseMesh coarse = build_coarse(scenario.domain, ny, nx);
    const FineGrid fine = build_fine(scenario.domain, config.fine_my, config.fine_mx);
    const PenalizedCoefficients coeffs{1.0, fine.h()};

    ensure_dir(config.out_dir);
    for (int comp = 0; comp < 2; ++comp) {
        BasisFunction fn = compute_basis_for_edge(edge_id, comp, coarse, fine, obstacles,
                                                  coeffs, config.theta);
        // Scatter the patch-local field into a zero global field for viewing.
        std::vector<Vec2> u(fine.n_nodes(), {0.0, 0.0});
        std::vector<double> p(fine.n_nodes(), 0.0);
        for (int k = 0; k < fn.n_elements; ++k) {
            const ElementSubgrid& sub = fn.subgrids[k];
            for (int jy = 0; jy <= sub.sy; ++jy) {
                for (int jx = 0; jx <= sub.sx; ++jx) {
                    const int gn = sub.global_node(fine, jx, jy);
                    const int ln = sub.local_node(jx, jy);
                    u[gn] = {fn.fields[k].vx[ln], fn.fields[k].vy[ln]};
                    p[gn] = fn.fields[k].pr[ln];
                }
            }
        }
        const std::string path = config.out_dir + "/" + config.scenario + "_" +
                                 config_label(ny, nx) + "_basis_e" +
                                 std::to_string(edge_id) + "_" +
                                 (comp == 0 ? "x" : "y") + ".vtk";
        write_vtk(path, fine, u, &p);
    }
}

std::string coarse_solution_to_json(const CoarseSolution& sol) {
    nlohmann::json j;
    j["basis_hash"] = sol.basis_hash;
    j["ny"] = sol.coarse.ny;
    j["nx"] = sol.coarse.nx;
    j["edge_dofs"] = sol.u;
    j["element_pressures"] = sol.p_bar;
    return j.dump(2);
}

}  // namespace crmsfem
