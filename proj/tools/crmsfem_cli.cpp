#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crmsfem/driver.hpp"
#include "crmsfem/errors.hpp"

namespace {

std::pair<int, int> parse_dims(const std::string& text) {
    const auto pos = text.find('x');
    if (pos == std::string::npos || pos == 0 || pos + 1 >= text.size())
        throw crmsfem::ValidationError("expected AxB, got: " + text);
    return {std::stoi(text.substr(0, pos)), std::stoi(text.substr(pos + 1))};
}

struct CliOptions {
    std::string scenario = "cavity49";
    std::string fine = "160x320";
    std::vector<std::string> coarse;
    double theta = 0.05;
    std::uint64_t seed = 7;
    std::string out = "out";
    int jobs = 1;
    int obstacle_count = -1;
    double epsilon = -1.0;
    int edge_id = 0;

    crmsfem::RunConfig to_config() const {
        crmsfem::RunConfig cfg;
        cfg.scenario = scenario;
        const auto [my, mx] = parse_dims(fine);
        cfg.fine_my = my;
        cfg.fine_mx = mx;
        for (const auto& c : coarse) cfg.coarse.push_back(parse_dims(c));
        cfg.theta = theta;
        cfg.seed = seed;
        cfg.out_dir = out;
        cfg.jobs = jobs;
        cfg.obstacle_count = obstacle_count;
        cfg.epsilon = epsilon;
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crouzeix-Raviart multiscale Stokes solver on penalized Cartesian grids"};
    app.set_config("--config", "", "TOML config file; flags override its fields");
    app.require_subcommand(1);
    app.fallthrough();  // flags may follow the subcommand

    CliOptions opt;
    app.add_option("--scenario", opt.scenario, "Scenario preset name");
    app.add_option("--fine", opt.fine, "Fine resolution MYxMX");
    app.add_option("--coarse", opt.coarse, "Coarse config(s) NYxNX[,NYxNX...]")
        ->delimiter(',');
    app.add_option("--theta", opt.theta, "Stabilization parameter");
    app.add_option("--seed", opt.seed, "Obstacle placement seed");
    app.add_option("--out", opt.out, "Output directory");
    app.add_option("--jobs", opt.jobs, "Parallel basis workers");
    app.add_option("--obstacles", opt.obstacle_count, "Override obstacle count");
    app.add_option("--epsilon", opt.epsilon, "Override obstacle width");
    app.add_option("--edge", opt.edge_id, "Coarse edge id (basis-dump)");

    auto* reference = app.add_subcommand("reference", "Solve the fine reference problem");
    auto* msfem = app.add_subcommand("msfem", "Single MsFEM solve at one coarse config");
    auto* sweep = app.add_subcommand("sweep", "Convergence sweep against the reference");
    auto* dump = app.add_subcommand("basis-dump", "Write one edge's basis fields");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad arguments are a validation error
    }

    try {
        const crmsfem::RunConfig cfg = opt.to_config();
        if (!reference->parsed() && cfg.coarse.empty())
            throw crmsfem::ValidationError("--coarse is required for this subcommand");
        cfg.validate();
        crmsfem::RunStats stats;
        if (reference->parsed()) {
            crmsfem::run_reference(cfg, &stats);
            std::printf("reference solved in %.2fs -> %s\n", stats.seconds_reference,
                        cfg.out_dir.c_str());
        } else if (msfem->parsed()) {
            const auto [ny, nx] = cfg.coarse.at(0);
            crmsfem::run_msfem(cfg, ny, nx, &stats);
            std::printf("msfem %dx%d: basis %.2fs, coarse %.2fs -> %s\n", ny, nx,
                        stats.seconds_basis, stats.seconds_coarse, cfg.out_dir.c_str());
        } else if (sweep->parsed()) {
            const auto reports = crmsfem::run_sweep(cfg, &stats);
            std::printf("config  H/eps     L1_rel    L2_rel    H1_rel    L2_P_rel\n");
            for (const auto& r : reports)
                std::printf("%-7s %-9.4g %-9.4g %-9.4g %-9.4g %-9.4g\n", r.config.c_str(),
                            r.h_over_eps, r.l1_rel, r.l2_rel, r.h1_rel, r.l2_p_rel);
            std::printf("reference %.2fs (solved %d time), basis %.2fs, coarse %.2fs\n",
                        stats.seconds_reference, stats.reference_solves,
                        stats.seconds_basis, stats.seconds_coarse);
        } else if (dump->parsed()) {
            const auto [ny, nx] = cfg.coarse.at(0);
            crmsfem::run_basis_dump(cfg, ny, nx, opt.edge_id);
        }
    } catch (const crmsfem::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const crmsfem::PackingFailure& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 1;
    }
    return 0;
}
