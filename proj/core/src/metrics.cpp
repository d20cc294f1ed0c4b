#include "rplsim/metrics.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace rplsim {

std::optional<double> pdr(const RunMetrics& run) {
    if (run.data_sent == 0) return std::nullopt;
    return static_cast<double>(run.data_received) / static_cast<double>(run.data_sent);
}

std::optional<double> ae2ed(const RunMetrics& run) {
    if (run.delays.empty()) return std::nullopt;
    const double sum = std::accumulate(run.delays.begin(), run.delays.end(), 0.0);
    return sum / static_cast<double>(run.delays.size());
}

double apc(const RunMetrics& run, const EnergyModel& model) {
    double total = 0.0;
    int n = 0;
    for (const auto& [node, ledger] : run.energy) {
        if (node == 0) continue;  // root excluded
        total += ledger.milliwatts(model, run.duration);
        ++n;
    }
    return n ? total / n : 0.0;
}

std::optional<double> plr(const RunMetrics& run) {
    auto p = pdr(run);
    if (!p) return std::nullopt;
    return 1.0 - *p;
}

double fpr(const RunMetrics& run) {
    if (run.legitimate_clients.empty()) return 0.0;
    std::set<NodeId> blocked_legit;
    for (const auto& ev : run.block_events)
        if (run.legitimate_clients.count(ev.target)) blocked_legit.insert(ev.target);
    return static_cast<double>(blocked_legit.size()) /
           static_cast<double>(run.legitimate_clients.size());
}

double fpr_event_level(const RunMetrics& run) {
    if (run.block_events.empty()) return 0.0;
    std::uint64_t false_events = 0;
    for (const auto& ev : run.block_events)
        if (run.legitimate_clients.count(ev.target)) ++false_events;
    return static_cast<double>(false_events) /
           static_cast<double>(run.block_events.size());
}

double t_critical_95(int df) {
    boost::math::students_t dist(df);
    return boost::math::quantile(dist, 0.975);
}

AggregateStats aggregate(const std::vector<double>& values) {
    AggregateStats s;
    s.samples = static_cast<int>(values.size());
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    if (values.size() < 2) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    const double se = sd / std::sqrt(static_cast<double>(values.size()));
    s.ci95_halfwidth = t_critical_95(static_cast<int>(values.size()) - 1) * se;
    return s;
}

}  // namespace rplsim
