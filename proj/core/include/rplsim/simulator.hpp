#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rplsim/defense.hpp"
#include "rplsim/events.hpp"
#include "rplsim/metrics.hpp"
#include "rplsim/rng.hpp"
#include "rplsim/scenario.hpp"
#include "rplsim/trickle.hpp"
#include "rplsim/types.hpp"

namespace rplsim {

inline constexpr std::uint16_t kRankInfinite = 0xFFFF;
inline constexpr std::uint16_t kMinHopRankIncrease = 256;
inline constexpr std::uint16_t kRootRank = 256;
inline constexpr std::uint16_t kParentSwitchHysteresis = 192;

/// CSMA-flavoured MAC timing: serialization at 250 kbit/s, random backoff,
/// fixed turnaround, plus a receiver rendezvous wait that stands in for
/// low-power-listening latency. No link-layer retransmissions.
struct MacParams {
    double bitrate_bps = 250000.0;
    double backoff_max_s = 0.008;
    double turnaround_s = 0.002;
    double wake_max_s = 0.125;
    int queue_capacity = 16;
    int csma_max_attempts = 4;
};

/// Forced topology for unit tests (chains, victim trees).
struct TopologyOverride {
    std::vector<Position> positions;  // one per node, index = node id
    std::vector<NodeId> armed;        // explicit attacker set
};

class Simulator {
public:
    struct Candidate {
        std::uint16_t rank = kRankInfinite;
        double etx = 1.0;
        double ewma_success = 1.0;
        double last_heard = 0.0;
        double last_rssi_dist = 0.0;  // distance at last reception (RSSI proxy)
    };

    struct RouteEntry {
        NodeId next_hop = kNoNode;
        double expires = 0.0;
    };

    struct PendingDao {
        bool active = false;
        std::uint32_t seq = 0;
        int retries = 0;
        EventId timer = 0;
        Message dao;
    };

    struct Node {
        NodeId id = kNoNode;
        bool is_root = false;
        bool armed = false;
        Position pos;
        MobilityState mob;

        bool joined = false;
        std::uint16_t rank = kRankInfinite;
        NodeId preferred = kNoNode;
        std::map<NodeId, Candidate> candidates;
        TrickleState trickle;
        EventId trickle_event = 0;

        std::uint32_t dao_seq = 0;
        std::map<NodeId, RouteEntry> routes;  // key: global prefix token
        std::vector<NodeId> root_source_routes_seen;
        PendingDao pending_dao;
        double last_originated_dao = -1.0e9;

        std::optional<Message> captured_dao;
        double last_parent_change_dao = -1.0e9;
        std::map<NodeId, double> last_dao_to;  // newest originated DAO per parent
        double last_repair = -1.0e9;
        double last_dis_reset = -1.0e9;
        double last_move_reset = -1.0e9;

        // MAC state
        std::deque<Message> txq;
        int csma_attempts = 0;
        bool tx_active = false;
        double tx_free_at = 0.0;
        double busy_from = 0.0;
        double medium_busy_until = 0.0;

        std::unique_ptr<DefenseHook> defense;
    };

    Simulator(const Scenario& scenario, std::uint64_t seed,
              const TopologyOverride* topo = nullptr);

    /// Processes events with fire_at < t_end in (fire_at, seq) order and
    /// returns the collected metrics.
    RunMetrics run_until(double t_end);
    RunMetrics run() { return run_until(scenario_.duration); }

    // -- spec-level primitives, also used by tests --
    EventId schedule(double fire_at, EventKind kind, NodeId node, std::uint64_t payload = 0);
    DeliveryOutcome try_deliver(NodeId src, NodeId dst, const Message& msg);
    std::vector<DeliveryOutcome> broadcast(NodeId src, const Message& msg);
    Position mobility_step(NodeId node, double dt);

    double now() const { return clock_.now(); }
    const Node& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    Node& node_mut(NodeId id) { return nodes_.at(static_cast<std::size_t>(id)); }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    const Scenario& scenario() const { return scenario_; }
    const RunMetrics& metrics() const { return metrics_; }
    const MacParams& mac() const { return mac_; }

    void set_trace_sink(std::function<void(const std::string&)> sink) {
        trace_sink_ = std::move(sink);
    }

    double serialization_time(const Message& msg) const {
        return static_cast<double>(msg.size_bytes()) * 8.0 / mac_.bitrate_bps;
    }
    double airtime(const Message& msg) const {
        return serialization_time(msg) + mac_.turnaround_s;
    }

private:
    // topology / bootstrap
    void build_topology(const TopologyOverride* topo);
    void seed_initial_events();

    // event dispatch
    void dispatch(const Event& ev);
    void handle_mac_tx_start(NodeId id);
    void handle_delivery(std::uint64_t payload);
    void handle_trickle_fire(NodeId id);
    void handle_dao_timer(NodeId id);
    void handle_data_generation(NodeId id);
    void handle_mobility_step(NodeId id);
    void handle_defense_reinit(NodeId id);
    void handle_attack_replay(NodeId id);
    void handle_solicit(NodeId id);

    // protocol
    void on_receive(NodeId self, const Message& msg);
    void on_receive_dis(NodeId self, const Message& msg);
    void on_receive_dio(NodeId self, const Message& msg);
    void on_receive_dao(NodeId self, const Message& msg);
    void on_receive_dao_ack(NodeId self, const Message& msg);
    void on_receive_data(NodeId self, const Message& msg);

    void process_dao_storing(NodeId self, const Message& dao);
    void process_dao_nonstoring(NodeId self, const Message& dao);
    void root_process_dao(NodeId self, const Message& dao);
    void install_route(NodeId self, GlobalPrefix prefix, NodeId next_hop);
    void send_dao_ack(NodeId self, NodeId to, const Message& dao);

    enum class DaoReason { DioRefresh, ParentChange, RouteError };
    void send_dao(NodeId self, DaoReason reason);
    void select_parent(NodeId self);
    void update_rank(NodeId self);
    void trickle_reset(NodeId self);
    void schedule_trickle(NodeId self);
    void lose_parent(NodeId self, NodeId failed_parent);

    // MAC
    static void mark_busy(Node& m, double from, double until);
    static bool busy_overlap(const Node& m, double from, double until);
    void enqueue_tx(NodeId src, Message msg);
    void transmit_frame(NodeId src, const Message& msg);
    DeliveryOutcome resolve_delivery(NodeId src, NodeId dst, const Message& msg,
                                     double air_start, double air_end);

    DefenseHook& defense(NodeId id) { return *nodes_[static_cast<std::size_t>(id)].defense; }
    bool attack_active() const {
        return scenario_.attack_enabled && scenario_.attackers > 0;
    }
    double backoff() { return mac_rng_.uniform(0.0, mac_.backoff_max_s); }
    void trace(const std::string& line) {
        if (trace_sink_) trace_sink_(line);
    }

    Scenario scenario_;
    MacParams mac_;
    SimClock clock_;
    EventQueue queue_;
    std::vector<Node> nodes_;
    RunMetrics metrics_;

    RngStream topo_rng_;
    RngStream radio_rng_;
    RngStream mobility_rng_;
    RngStream mac_rng_;
    RngStream trickle_rng_;
    RngStream app_rng_;
    RngStream attack_rng_;

    // side table for in-flight deliveries
    struct InFlight {
        Message msg;
        NodeId dst = kNoNode;
        double rx_airtime = 0.0;
    };
    std::vector<InFlight> inflight_;
    std::vector<std::uint64_t> free_inflight_;

    std::function<void(const std::string&)> trace_sink_;
    double dao_refresh_min_gap_ = 300.0;
    double solicit_interval_ = 5.0;
    double probe_age_ = 15.0;
    double parent_change_dao_gap_ = 20.0;
    double repair_cooldown_ = 60.0;
    double dis_reset_gap_ = 15.0;
    double move_reset_period_ = 20.0;
    double pause_min_ = 10.0;
    double pause_max_ = 30.0;
    double dao_same_parent_gap_ = 180.0;
    double neighbor_timeout_ = 60.0;
    double route_lifetime_ = 1800.0;
    double dao_ack_timeout_ = 4.0;
    int dao_max_retries_ = 1;
};

}  // namespace rplsim
