#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rplsim/metrics.hpp"
#include "rplsim/scenario.hpp"

namespace rplsim {

/// One replication of one matrix cell, reduced to the reported metrics.
struct RunRow {
    std::string cell;
    int rep = 0;
    std::uint64_t seed = 0;
    std::optional<double> pdr;
    std::optional<double> plr;
    std::optional<double> ae2ed;
    std::optional<double> apc;
    std::optional<double> fpr;
};

struct MatrixResult {
    std::vector<MatrixCell> cells;
    /// Cell-major, replication order inside each cell.
    std::vector<RunRow> rows;
    /// Full per-run metrics, [cell][rep]; empty when rows were loaded from
    /// a runs.csv rather than produced by run_matrix.
    std::vector<std::vector<RunMetrics>> metrics;

    std::vector<const RunRow*> rows_for(const std::string& cell) const;
};

RunRow summarize_run(const std::string& cell_name, int rep, std::uint64_t seed,
                     const RunMetrics& m);

/// Executes one replication of one cell (seed = base_seed + rep).
RunMetrics execute_cell_rep(const Scenario& base, const MatrixCell& cell, int rep);

/// Runs every cell x replication with a bounded worker pool. Results are
/// stored by (cell, rep) slot, so ordering is independent of thread timing.
/// A progress line per finished cell goes to `progress` when non-null.
MatrixResult run_matrix(const Scenario& base, const std::vector<MatrixCell>& cells,
                        int threads = 0,
                        std::function<void(const std::string&)> progress = nullptr);

}  // namespace rplsim
