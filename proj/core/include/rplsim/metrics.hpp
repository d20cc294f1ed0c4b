#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rplsim/defense.hpp"
#include "rplsim/types.hpp"

namespace rplsim {

/// CC2420/Z1-class current draws at 3 V (powertrace constants).
struct EnergyModel {
    double voltage = 3.0;       // V
    double tx_ma = 17.4;        // transmit
    double rx_ma = 18.8;        // listen/receive
    double cpu_ma = 1.8;        // active CPU
    double lpm_ma = 0.0545;     // low-power mode
    double cpu_per_message_s = 0.001;
};

/// Seconds spent in each radio/CPU state; the four states partition run time.
struct EnergyLedger {
    double tx_s = 0.0;
    double rx_s = 0.0;
    double cpu_s = 0.0;

    double lpm_s(double duration) const {
        return duration - tx_s - rx_s - cpu_s;
    }

    double milliwatts(const EnergyModel& m, double duration) const {
        const double mws = tx_s * m.tx_ma * m.voltage + rx_s * m.rx_ma * m.voltage +
                           cpu_s * m.cpu_ma * m.voltage +
                           lpm_s(duration) * m.lpm_ma * m.voltage;
        return mws / duration;
    }
};

struct LinkTally {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
};

struct ControlCounters {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
    std::uint64_t suppressed = 0;
};

struct RunMetrics {
    double duration = 0.0;

    // legitimate-client data plane
    std::uint64_t data_sent = 0;
    std::uint64_t data_received = 0;
    std::vector<double> delays;

    // attacker-originated data, tracked separately (excluded from PDR/PLR)
    std::uint64_t attacker_data_sent = 0;
    std::uint64_t attacker_data_received = 0;

    std::map<NodeId, EnergyLedger> energy;
    std::map<MsgKind, ControlCounters> control;
    std::map<MsgKind, LinkTally> link;  // per message class, summed over links
    std::uint64_t attack_replays = 0;
    std::uint64_t data_no_parent_drops = 0;   // at origin or forwarder
    std::uint64_t data_rank_guard_drops = 0;
    std::uint64_t data_ttl_drops = 0;
    std::uint64_t queue_overflow_drops = 0;
    std::uint64_t mac_busy_drops = 0;
    std::uint64_t daos_originated = 0;
    std::uint64_t daos_aggregated = 0;  // new DAOs created by intermediate parents
    std::uint64_t daos_discarded_by_defense = 0;

    std::vector<BlockEvent> block_events;
    std::set<NodeId> ground_truth_attackers;
    std::set<NodeId> legitimate_clients;

    std::size_t defense_table_bytes_peak = 0;
    std::uint64_t defense_invocations = 0;
    std::uint64_t defense_comparisons = 0;
};

/// Packet delivery ratio; empty when no legitimate data was sent.
std::optional<double> pdr(const RunMetrics& run);

/// Mean end-to-end delay over delivered packets, seconds.
std::optional<double> ae2ed(const RunMetrics& run);

/// Mean power over non-root nodes, milliwatts.
double apc(const RunMetrics& run, const EnergyModel& model);

std::optional<double> plr(const RunMetrics& run);

/// Node-level FPR: legitimate nodes ever blocked / legitimate nodes.
double fpr(const RunMetrics& run);

/// Event-level FPR alternative: block events aimed at legitimate nodes over
/// all block events (0 when there are none).
double fpr_event_level(const RunMetrics& run);

struct AggregateStats {
    double mean = 0.0;
    std::optional<double> ci95_halfwidth;  // absent when fewer than 2 samples
    int samples = 0;
};

/// Mean and Student-t 95% CI half-width over replications.
AggregateStats aggregate(const std::vector<double>& values);

/// Two-sided Student-t critical value at 95% confidence for `df` degrees of
/// freedom.
double t_critical_95(int df);

}  // namespace rplsim
