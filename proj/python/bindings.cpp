#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "crmsfem/driver.hpp"

namespace py = pybind11;
using namespace crmsfem;

namespace {

RunConfig make_config(const std::string& scenario, int fine_my, int fine_mx,
                      double theta, std::uint64_t seed, int jobs, int obstacle_count,
                      double epsilon) {
    RunConfig c;
    c.scenario = scenario;
    c.fine_my = fine_my;
    c.fine_mx = fine_mx;
    c.theta = theta;
    c.seed = seed;
    c.jobs = jobs;
    c.obstacle_count = obstacle_count;
    c.epsilon = epsilon;
    return c;
}

py::array_t<double> nodal_grid(const FineGrid& grid, int component) {
    py::array_t<double> out({grid.my + 1, grid.mx + 1});
    auto r = out.mutable_unchecked<2>();
    for (int iy = 0; iy <= grid.my; ++iy)
        for (int ix = 0; ix <= grid.mx; ++ix)
            r(iy, ix) = component == 0 ? grid.node_x(ix) : grid.node_y(iy);
    return out;
}

py::array_t<double> nodal_array(const FineGrid& grid, const std::vector<double>& v) {
    py::array_t<double> out({grid.my + 1, grid.mx + 1});
    auto r = out.mutable_unchecked<2>();
    for (int iy = 0; iy <= grid.my; ++iy)
        for (int ix = 0; ix <= grid.mx; ++ix) r(iy, ix) = v[grid.node_id(ix, iy)];
    return out;
}

py::dict velocity_dict(const FineGrid& grid, const std::vector<Vec2>& u) {
    py::array_t<double> ux({grid.my + 1, grid.mx + 1});
    py::array_t<double> uy({grid.my + 1, grid.mx + 1});
    auto rx = ux.mutable_unchecked<2>();
    auto ry = uy.mutable_unchecked<2>();
    for (int iy = 0; iy <= grid.my; ++iy)
        for (int ix = 0; ix <= grid.mx; ++ix) {
            rx(iy, ix) = u[grid.node_id(ix, iy)].x;
            ry(iy, ix) = u[grid.node_id(ix, iy)].y;
        }
    py::dict d;
    d["ux"] = ux;
    d["uy"] = uy;
    d["x"] = nodal_grid(grid, 0);
    d["y"] = nodal_grid(grid, 1);
    return d;
}

py::dict report_dict(const ErrorReport& r) {
    py::dict d;
    d["config"] = r.config;
    d["H_over_eps"] = r.h_over_eps;
    d["L1_rel"] = r.l1_rel;
    d["L2_rel"] = r.l2_rel;
    d["H1_rel"] = r.h1_rel;
    d["L2_P_rel"] = r.l2_p_rel;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multiscale Stokes solver on penalized Cartesian grids";

    m.def(
        "obstacles",
        [](const std::string& scenario, std::uint64_t seed, int count, double epsilon) {
            const RunConfig config =
                make_config(scenario, 160, 320, 0.05, seed, 1, count, epsilon);
            const ObstacleSet set =
                scenario_obstacles(config, resolve_scenario(scenario));
            py::array_t<double> out({(py::ssize_t)set.squares.size(), (py::ssize_t)3});
            auto r = out.mutable_unchecked<2>();
            for (py::ssize_t i = 0; i < (py::ssize_t)set.squares.size(); ++i) {
                r(i, 0) = set.squares[i].cx;
                r(i, 1) = set.squares[i].cy;
                r(i, 2) = set.squares[i].side;
            }
            return out;
        },
        py::arg("scenario"), py::arg("seed") = 7, py::arg("count") = -1,
        py::arg("epsilon") = -1.0,
        "Obstacle layout of a scenario as an (n, 3) array of (cx, cy, side).");

    m.def(
        "reference",
        [](const std::string& scenario, int fine_my, int fine_mx, double theta,
           std::uint64_t seed, int count, double epsilon) {
            const RunConfig config =
                make_config(scenario, fine_my, fine_mx, theta, seed, 1, count, epsilon);
            const StokesField f = run_reference(config, nullptr, /*write_files=*/false);
            py::dict d = velocity_dict(f.grid, f.u);
            d["p"] = nodal_array(f.grid, f.p);
            return d;
        },
        py::arg("scenario"), py::arg("fine_my") = 160, py::arg("fine_mx") = 320,
        py::arg("theta") = 0.05, py::arg("seed") = 7, py::arg("count") = -1,
        py::arg("epsilon") = -1.0,
        "Fine-grid reference solve; returns nodal ux, uy, p and coordinates.");

    m.def(
        "msfem",
        [](const std::string& scenario, int ny, int nx, int fine_my, int fine_mx,
           double theta, std::uint64_t seed, int jobs, int count, double epsilon) {
            const RunConfig config = make_config(scenario, fine_my, fine_mx, theta, seed,
                                                 jobs, count, epsilon);
            const MsfemResult r =
                run_msfem(config, ny, nx, nullptr, /*write_files=*/false);
            py::dict d = velocity_dict(r.field.grid, r.field.u);
            py::array_t<double> p_bar({ny, nx});
            auto rp = p_bar.mutable_unchecked<2>();
            for (int ey = 0; ey < ny; ++ey)
                for (int ex = 0; ex < nx; ++ex)
                    rp(ey, ex) = r.coarse_sol.p_bar[r.coarse_sol.coarse.element_id(ex, ey)];
            d["p_bar"] = p_bar;
            d["edge_dofs"] = r.coarse_sol.u;
            return d;
        },
        py::arg("scenario"), py::arg("ny"), py::arg("nx"), py::arg("fine_my") = 160,
        py::arg("fine_mx") = 320, py::arg("theta") = 0.05, py::arg("seed") = 7,
        py::arg("jobs") = 1, py::arg("count") = -1, py::arg("epsilon") = -1.0,
        "Multiscale solve: reconstructed nodal velocity plus element pressures.");

    m.def(
        "sweep",
        [](const std::string& scenario, const std::vector<std::pair<int, int>>& coarse,
           int fine_my, int fine_mx, double theta, std::uint64_t seed, int jobs,
           const std::string& out_dir, int count, double epsilon) {
            RunConfig config = make_config(scenario, fine_my, fine_mx, theta, seed, jobs,
                                           count, epsilon);
            config.coarse = coarse;
            config.out_dir = out_dir;
            py::list rows;
            for (const auto& r : run_sweep(config)) rows.append(report_dict(r));
            return rows;
        },
        py::arg("scenario"), py::arg("coarse"), py::arg("fine_my") = 160,
        py::arg("fine_mx") = 320, py::arg("theta") = 0.05, py::arg("seed") = 7,
        py::arg("jobs") = 1, py::arg("out_dir") = "out", py::arg("count") = -1,
        py::arg("epsilon") = -1.0,
        "Convergence study: one reference, one row of error norms per coarse grid.");
}
