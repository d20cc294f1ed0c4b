#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rplsim/expctl.hpp"
#include "rplsim/report.hpp"
#include "rplsim/scenario.hpp"
#include "rplsim/simulator.hpp"

namespace {

// exit code categories
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int cmd_simulate(const std::string& scenario_path, const std::string& cell_spec,
                 const std::string& out_dir, bool trace, std::uint64_t seed,
                 bool seed_set, int reps, int threads) {
    rplsim::Scenario base;
    try {
        if (!scenario_path.empty()) base = rplsim::load_scenario(scenario_path);
        if (seed_set) base.base_seed = seed;
        if (reps > 0) base.replications = reps;
        base.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: invalid configuration: " << e.what() << "\n";
        return kExitConfig;
    }

    std::vector<rplsim::MatrixCell> cells;
    try {
        if (!cell_spec.empty())
            cells.push_back(rplsim::parse_cell_spec(cell_spec));
        else
            cells = rplsim::paper_matrix(!base.mobility, base.mobility);
    } catch (const std::exception& e) {
        std::cerr << "error: invalid cell spec: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (trace && cells.size() == 1 && base.replications == 1) {
            // single traced run to stderr, metrics still summarized below
            rplsim::Scenario s = rplsim::apply_cell(base, cells[0]);
            rplsim::Simulator sim(s, s.base_seed);
            sim.set_trace_sink(
                [](const std::string& line) { std::cerr << line << "\n"; });
            rplsim::RunMetrics m = sim.run();
            rplsim::MatrixResult result;
            result.cells = cells;
            result.metrics = {{m}};
            result.rows = {rplsim::summarize_run(cells[0].name(), 0, s.base_seed, m)};
            rplsim::write_all(out_dir, result);
        } else {
            rplsim::MatrixResult result = rplsim::run_matrix(
                base, cells, threads,
                [](const std::string& cell) { std::cerr << "done " << cell << "\n"; });
            rplsim::write_all(out_dir, result);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: run failed: " << e.what() << "\n";
        return kExitRuntime;
    }
    std::cout << "wrote " << out_dir << "/runs.csv, summary.csv, figure data\n";
    return 0;
}

int cmd_report(const std::string& in_dir) {
    try {
        rplsim::MatrixResult result = rplsim::load_runs_csv(in_dir + "/runs.csv");
        {
            std::ofstream out(in_dir + "/summary.csv");
            if (!out) throw std::runtime_error("cannot write summary.csv");
            rplsim::write_summary_csv(out, result);
        }
        rplsim::write_figure_files(in_dir, result);
        std::cout << rplsim::comparison_table(result);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RPL DAO-attack simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string cell_spec;
    std::string out_dir = "out";
    bool trace = false;
    std::uint64_t seed = 0;
    int reps = 0;
    int threads = 0;

    auto* sim = app.add_subcommand("simulate", "run the experiment matrix");
    sim->add_option("--scenario", scenario_path, "scenario file (key = value)");
    sim->add_option("--cell", cell_spec,
                    "single cell, e.g. limsd,static,1s (default: full matrix)");
    sim->add_option("--out", out_dir, "output directory");
    sim->add_flag("--trace", trace, "per-event trace on stderr (single run only)");
    auto* seed_opt = sim->add_option("--seed", seed, "override base seed");
    sim->add_option("--reps", reps, "override replication count");
    sim->add_option("--threads", threads, "worker threads (default: hardware)");

    std::string in_dir;
    auto* rep = app.add_subcommand("report", "re-render tables from runs.csv");
    rep->add_option("--in", in_dir, "directory holding runs.csv")->required();

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed())
        return cmd_simulate(scenario_path, cell_spec, out_dir, trace, seed,
                            seed_opt->count() > 0, reps, threads);
    return cmd_report(in_dir);
}
