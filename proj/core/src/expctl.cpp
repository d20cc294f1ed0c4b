#include "rplsim/expctl.hpp"

#include <atomic>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rplsim/simulator.hpp"

namespace rplsim {

std::vector<const RunRow*> MatrixResult::rows_for(const std::string& cell) const {
    std::vector<const RunRow*> out;
    for (const auto& r : rows)
        if (r.cell == cell) out.push_back(&r);
    return out;
}

RunRow summarize_run(const std::string& cell_name, int rep, std::uint64_t seed,
                     const RunMetrics& m) {
    RunRow row;
    row.cell = cell_name;
    row.rep = rep;
    row.seed = seed;
    row.pdr = pdr(m);
    row.plr = plr(m);
    row.ae2ed = ae2ed(m);
    row.apc = apc(m, EnergyModel{});
    row.fpr = fpr(m);
    return row;
}

RunMetrics execute_cell_rep(const Scenario& base, const MatrixCell& cell, int rep) {
    Scenario s = apply_cell(base, cell);
    const std::uint64_t seed = s.base_seed + static_cast<std::uint64_t>(rep);
    Simulator sim(s, seed);
    return sim.run();
}

MatrixResult run_matrix(const Scenario& base, const std::vector<MatrixCell>& cells,
                        int threads,
                        std::function<void(const std::string&)> progress) {
    const int reps = base.replications;
    MatrixResult result;
    result.cells = cells;
    result.metrics.assign(cells.size(), std::vector<RunMetrics>(
                                            static_cast<std::size_t>(reps)));
    result.rows.resize(cells.size() * static_cast<std::size_t>(reps));

    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 4;
    }
    const std::size_t jobs = cells.size() * static_cast<std::size_t>(reps);
    std::atomic<std::size_t> next{0};
    std::mutex err_mtx;
    std::string first_error;
    std::vector<std::atomic<int>> cell_done(cells.size());
    for (auto& c : cell_done) c.store(0);
    std::mutex progress_mtx;

    auto worker = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs) return;
            const std::size_t ci = job / static_cast<std::size_t>(reps);
            const int rep = static_cast<int>(job % static_cast<std::size_t>(reps));
            const std::uint64_t seed = base.base_seed + static_cast<std::uint64_t>(rep);
            try {
                RunMetrics m = execute_cell_rep(base, cells[ci], rep);
                result.rows[job] = summarize_run(cells[ci].name(), rep, seed, m);
                result.metrics[ci][static_cast<std::size_t>(rep)] = std::move(m);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(err_mtx);
                if (first_error.empty()) {
                    std::ostringstream ss;
                    ss << "cell " << cells[ci].name() << " rep " << rep << " seed "
                       << seed << ": " << e.what();
                    first_error = ss.str();
                }
                return;
            }
            if (progress &&
                cell_done[ci].fetch_add(1) + 1 == reps) {
                std::lock_guard<std::mutex> lk(progress_mtx);
                progress(cells[ci].name());
            }
        }
    };

    std::vector<std::thread> pool;
    const int nthreads = std::min<std::size_t>(static_cast<std::size_t>(threads), jobs);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    if (!first_error.empty())
        throw std::runtime_error("matrix run failed at " + first_error);
    return result;
}

}  // namespace rplsim
