#include "rplsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace rplsim {

namespace {

std::uint16_t rank_increment(double etx) {
    double inc = etx * kMinHopRankIncrease;
    if (inc < 1.0) inc = 1.0;
    if (inc > 0x7FFF) inc = 0x7FFF;
    return static_cast<std::uint16_t>(std::lround(inc));
}

}  // namespace

void Simulator::mark_busy(Node& m, double from, double until) {
    if (from < m.medium_busy_until && m.busy_from < until) {
        m.busy_from = std::min(m.busy_from, from);
        m.medium_busy_until = std::max(m.medium_busy_until, until);
    } else if (from >= m.medium_busy_until) {
        m.busy_from = from;
        m.medium_busy_until = until;
    }
}

bool Simulator::busy_overlap(const Node& m, double from, double until) {
    return from < m.medium_busy_until && m.busy_from < until;
}

Simulator::Simulator(const Scenario& scenario, std::uint64_t seed,
                     const TopologyOverride* topo)
    : scenario_(scenario),
      topo_rng_(derive_seed(seed, "topology")),
      radio_rng_(derive_seed(seed, "radio")),
      mobility_rng_(derive_seed(seed, "mobility")),
      mac_rng_(derive_seed(seed, "mac")),
      trickle_rng_(derive_seed(seed, "trickle")),
      app_rng_(derive_seed(seed, "app")),
      attack_rng_(derive_seed(seed, "attack")) {
    scenario_.validate();
    build_topology(topo);
    seed_initial_events();
}

void Simulator::build_topology(const TopologyOverride* topo) {
    const int n = scenario_.total_nodes();
    nodes_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        nodes_[static_cast<std::size_t>(i)].id = i;
    }
    Node& root = nodes_[0];
    root.is_root = true;
    root.joined = true;
    root.rank = kRootRank;

    if (topo) {
        if (static_cast<int>(topo->positions.size()) != n)
            throw std::logic_error("topology override must cover every node");
        for (int i = 0; i < n; ++i)
            nodes_[static_cast<std::size_t>(i)].pos = topo->positions[static_cast<std::size_t>(i)];
        for (NodeId a : topo->armed) {
            if (a <= 0 || a >= n) throw std::logic_error("cannot arm this node id");
            if (scenario_.attack_enabled) nodes_[static_cast<std::size_t>(a)].armed = true;
        }
    } else {
        // border router in a corner, clients spread over the arena: keeps the
        // DODAG several hops deep
        root.pos = Position{0.0, 0.0};
        // uniform placement, resampled until the graph is connected under
        // tx_range so a DODAG can always form
        const int max_tries = 20000;
        bool connected = false;
        for (int attempt = 0; attempt < max_tries && !connected; ++attempt) {
            for (int i = 1; i < n; ++i) {
                nodes_[static_cast<std::size_t>(i)].pos =
                    Position{topo_rng_.uniform(0.0, scenario_.arena),
                             topo_rng_.uniform(0.0, scenario_.arena)};
            }
            std::vector<bool> seen(static_cast<std::size_t>(n), false);
            std::queue<int> bfs;
            bfs.push(0);
            seen[0] = true;
            int reached = 1;
            while (!bfs.empty()) {
                int u = bfs.front();
                bfs.pop();
                for (int v = 0; v < n; ++v) {
                    if (seen[static_cast<std::size_t>(v)]) continue;
                    if (distance(nodes_[static_cast<std::size_t>(u)].pos,
                                 nodes_[static_cast<std::size_t>(v)].pos) <=
                        scenario_.radio.tx_range) {
                        seen[static_cast<std::size_t>(v)] = true;
                        ++reached;
                        bfs.push(v);
                    }
                }
            }
            connected = reached == n;
        }
        if (!connected)
            throw std::runtime_error("could not sample a connected topology");

        // attacker designation draws always happen so matched seeds give the
        // same topology whether or not the attack is enabled
        if (scenario_.attackers > 0) {
            std::vector<NodeId> pool;
            for (int i = 1; i < n; ++i) pool.push_back(i);
            for (int k = 0; k < scenario_.attackers; ++k) {
                std::size_t pick = attack_rng_.uniform_int(pool.size());
                NodeId chosen = pool[pick];
                pool.erase(pool.begin() + static_cast<long>(pick));
                if (scenario_.attack_enabled)
                    nodes_[static_cast<std::size_t>(chosen)].armed = true;
            }
        }
    }

    for (auto& node : nodes_) {
        if (node.armed) metrics_.ground_truth_attackers.insert(node.id);
        else if (!node.is_root) metrics_.legitimate_clients.insert(node.id);

        switch (scenario_.defense.mode) {
            case DefenseMode::None:
                node.defense = std::make_unique<NoDefense>();
                break;
            case DefenseMode::LiMsd:
                node.defense = std::make_unique<LiMsdDefense>(node.id, scenario_.defense);
                break;
            case DefenseMode::SecRpl:
                node.defense = std::make_unique<SecRplDefense>(node.id, scenario_.defense);
                break;
        }
        node.defense->set_block_sink(
            [this](const BlockEvent& ev) { metrics_.block_events.push_back(ev); });

        if (scenario_.mobility && !node.is_root) {
            node.mob.enabled = true;
            node.mob.waypoint = Position{mobility_rng_.uniform(0.0, scenario_.arena),
                                         mobility_rng_.uniform(0.0, scenario_.arena)};
            node.mob.speed = mobility_rng_.uniform(scenario_.speed_min, scenario_.speed_max);
        }
    }
}

void Simulator::seed_initial_events() {
    schedule_trickle(0);
    for (auto& node : nodes_) {
        if (node.is_root) continue;
        schedule(app_rng_.uniform(0.0, 2.0), EventKind::SolicitTimer, node.id);
        schedule(app_rng_.uniform(0.0, scenario_.data_interval), EventKind::DataGeneration,
                 node.id);
        if (node.mob.enabled)
            schedule(scenario_.mobility_dt, EventKind::MobilityStep, node.id);
        if (node.armed)
            schedule(scenario_.attack_start, EventKind::AttackReplay, node.id);
    }
    for (auto& node : nodes_)
        schedule(scenario_.defense.reinit_period, EventKind::DefenseReinit, node.id);
}

EventId Simulator::schedule(double fire_at, EventKind kind, NodeId node,
                            std::uint64_t payload) {
    return queue_.schedule(clock_.now(), fire_at, kind, node, payload);
}

RunMetrics Simulator::run_until(double t_end) {
    while (const Event* next = queue_.peek()) {
        if (next->fire_at >= t_end) break;  // t_end is an exclusive horizon
        Event ev = queue_.pop();
        clock_.advance_to(ev.fire_at);
        dispatch(ev);
    }
    metrics_.duration = t_end;
    for (auto& node : nodes_) {
        metrics_.energy[node.id];  // make sure every node has a ledger
        metrics_.defense_table_bytes_peak =
            std::max(metrics_.defense_table_bytes_peak, node.defense->table_bytes());
    }
    return metrics_;
}

void Simulator::dispatch(const Event& ev) {
    switch (ev.kind) {
        case EventKind::MacTxStart: handle_mac_tx_start(ev.node); break;
        case EventKind::MessageDelivery: handle_delivery(ev.payload); break;
        case EventKind::TrickleFire:
            if (ev.id == nodes_[static_cast<std::size_t>(ev.node)].trickle_event)
                handle_trickle_fire(ev.node);
            break;
        case EventKind::DaoTimer: handle_dao_timer(ev.node); break;
        case EventKind::DataGeneration: handle_data_generation(ev.node); break;
        case EventKind::MobilityStep: handle_mobility_step(ev.node); break;
        case EventKind::DefenseReinit: handle_defense_reinit(ev.node); break;
        case EventKind::AttackReplay: handle_attack_replay(ev.node); break;
        case EventKind::SolicitTimer: handle_solicit(ev.node); break;
        case EventKind::MetricsSample: break;
    }
}

// ---------------------------------------------------------------------------
// MAC

void Simulator::enqueue_tx(NodeId src, Message msg) {
    Node& n = nodes_.at(static_cast<std::size_t>(src));
    if (static_cast<int>(n.txq.size()) >= mac_.queue_capacity) {
        ++metrics_.queue_overflow_drops;
        return;
    }
    msg.src = src;
    n.txq.push_back(std::move(msg));
    if (!n.tx_active) {
        n.tx_active = true;
        n.csma_attempts = 0;
        schedule(std::max(now(), n.tx_free_at) + backoff(), EventKind::MacTxStart, src);
    }
}

void Simulator::handle_mac_tx_start(NodeId id) {
    Node& n = nodes_.at(static_cast<std::size_t>(id));
    if (n.txq.empty()) {
        n.tx_active = false;
        return;
    }
    if (now() < n.medium_busy_until) {
        // a current or already-announced transmission: defer with fresh backoff
        if (++n.csma_attempts > mac_.csma_max_attempts) {
            n.txq.pop_front();
            n.csma_attempts = 0;
            ++metrics_.mac_busy_drops;
            if (n.txq.empty()) {
                n.tx_active = false;
                return;
            }
        }
        schedule(n.medium_busy_until + backoff(), EventKind::MacTxStart, id);
        return;
    }
    Message msg = n.txq.front();
    n.txq.pop_front();
    n.csma_attempts = 0;
    transmit_frame(id, msg);
    if (!n.txq.empty())
        schedule(n.tx_free_at + backoff(), EventKind::MacTxStart, id);
    else
        n.tx_active = false;
}

void Simulator::transmit_frame(NodeId src, const Message& msg) {
    Node& n = nodes_.at(static_cast<std::size_t>(src));
    const bool is_broadcast = msg.dst == kNoNode;
    // broadcasts strobe the full wake interval; unicasts wait for the
    // receiver's next wake-up
    const double wake =
        is_broadcast ? mac_.wake_max_s : mac_rng_.uniform(0.0, mac_.wake_max_s);
    const double at = airtime(msg);
    const double air_start = now() + wake;
    const double air_end = air_start + at;

    auto& ledger = metrics_.energy[src];
    ledger.tx_s += wake + at;
    ledger.cpu_s += EnergyModel{}.cpu_per_message_s;
    ++metrics_.control[msg.kind].sent;
    n.tx_free_at = air_end;

    if (trace_sink_) {
        std::ostringstream ss;
        ss << now() << " tx " << msg_kind_name(msg.kind) << " src=" << src
           << " dst=" << msg.dst;
        trace(ss.str());
    }

    if (is_broadcast) {
        for (auto& m : nodes_) {
            if (m.id == src) continue;
            if (distance(n.pos, m.pos) <= scenario_.radio.tx_range)
                resolve_delivery(src, m.id, msg, air_start, air_end);
        }
    } else {
        resolve_delivery(src, msg.dst, msg, air_start, air_end);
    }

    // the airtime occupies the medium for everyone in interference range
    for (auto& m : nodes_) {
        if (m.id == src) continue;
        if (distance(n.pos, m.pos) <= scenario_.radio.interference_range)
            mark_busy(m, air_start, air_end);
    }
}

DeliveryOutcome Simulator::resolve_delivery(NodeId src, NodeId dst, const Message& msg,
                                            double air_start, double air_end) {
    if (src < 0 || src >= node_count() || dst < 0 || dst >= node_count())
        throw std::logic_error("delivery with unknown node id");
    Node& s = nodes_[static_cast<std::size_t>(src)];
    Node& r = nodes_[static_cast<std::size_t>(dst)];
    LinkTally& tally = metrics_.link[msg.kind];
    ++tally.sent;

    DeliveryOutcome out;
    out.dst = dst;
    const double d = distance(s.pos, r.pos);
    const bool unicast = msg.dst != kNoNode;

    if (d > scenario_.radio.tx_range) {
        ++tally.dropped;
        out.delivered = false;
        out.reason = DropReason::OutOfRange;
        if (unicast && !s.is_root && s.preferred == dst) {
            lose_parent(src, dst);
            // reroute the frame once through the repaired path
            if (msg.kind == MsgKind::Data && msg.ttl > 1 && s.preferred != kNoNode) {
                Message retry = msg;
                retry.dst = s.preferred;
                --retry.ttl;
                enqueue_tx(src, retry);
            }
        }
        return out;
    }
    if (busy_overlap(r, air_start, air_end)) {
        ++tally.dropped;
        out.delivered = false;
        out.reason = DropReason::Collision;
        return out;
    }
    const bool ok = radio_rng_.chance(scenario_.radio.rx_success);
    if (unicast && scenario_.radio.rx_success < 1.0) {
        // stands in for MAC-ACK feedback when links are lossy
        auto it = s.candidates.find(dst);
        if (it != s.candidates.end()) {
            constexpr double alpha = 0.1;
            it->second.ewma_success =
                (1.0 - alpha) * it->second.ewma_success + alpha * (ok ? 1.0 : 0.0);
            it->second.etx = 1.0 / std::max(it->second.ewma_success, 0.1);
        }
    }
    if (!ok) {
        ++tally.dropped;
        out.delivered = false;
        out.reason = DropReason::RadioLoss;
        return out;
    }

    ++tally.delivered;
    std::uint64_t slot;
    if (!free_inflight_.empty()) {
        slot = free_inflight_.back();
        free_inflight_.pop_back();
        inflight_[slot] = InFlight{msg, dst, air_end - air_start};
    } else {
        slot = inflight_.size();
        inflight_.push_back(InFlight{msg, dst, air_end - air_start});
    }
    schedule(air_end, EventKind::MessageDelivery, dst, slot);
    out.delivered = true;
    out.at = air_end;
    return out;
}

DeliveryOutcome Simulator::try_deliver(NodeId src, NodeId dst, const Message& msg) {
    Message m = msg;
    m.src = src;
    m.dst = dst;
    const double wake = mac_rng_.uniform(0.0, mac_.wake_max_s);
    const double air_start = now() + backoff() + wake;
    const double air_end = air_start + airtime(m);
    metrics_.energy[src].tx_s += wake + airtime(m);
    ++metrics_.control[m.kind].sent;
    DeliveryOutcome out = resolve_delivery(src, dst, m, air_start, air_end);
    Node& s = nodes_[static_cast<std::size_t>(src)];
    for (auto& n : nodes_) {
        if (n.id == src) continue;
        if (distance(s.pos, n.pos) <= scenario_.radio.interference_range)
            mark_busy(n, air_start, air_end);
    }
    return out;
}

std::vector<DeliveryOutcome> Simulator::broadcast(NodeId src, const Message& msg) {
    Message m = msg;
    m.src = src;
    m.dst = kNoNode;
    const double air_start = now() + backoff() + mac_.wake_max_s;
    const double air_end = air_start + airtime(m);
    metrics_.energy[src].tx_s += mac_.wake_max_s + airtime(m);
    ++metrics_.control[m.kind].sent;
    Node& s = nodes_[static_cast<std::size_t>(src)];
    std::vector<DeliveryOutcome> outs;
    for (auto& n : nodes_) {
        if (n.id == src) continue;
        if (distance(s.pos, n.pos) <= scenario_.radio.tx_range)
            outs.push_back(resolve_delivery(src, n.id, m, air_start, air_end));
    }
    for (auto& n : nodes_) {
        if (n.id == src) continue;
        if (distance(s.pos, n.pos) <= scenario_.radio.interference_range)
            mark_busy(n, air_start, air_end);
    }
    return outs;
}

void Simulator::handle_delivery(std::uint64_t payload) {
    InFlight rec = inflight_.at(payload);
    free_inflight_.push_back(payload);
    auto& ledger = metrics_.energy[rec.dst];
    ledger.rx_s += rec.rx_airtime;
    ledger.cpu_s += EnergyModel{}.cpu_per_message_s;
    ++metrics_.control[rec.msg.kind].received;
    if (trace_sink_) {
        std::ostringstream ss;
        ss << now() << " rx " << msg_kind_name(rec.msg.kind) << " src=" << rec.msg.src
           << " dst=" << rec.dst;
        trace(ss.str());
    }
    on_receive(rec.dst, rec.msg);
}

// ---------------------------------------------------------------------------
// RPL control plane

void Simulator::on_receive(NodeId self, const Message& msg) {
    switch (msg.kind) {
        case MsgKind::Dis: on_receive_dis(self, msg); break;
        case MsgKind::Dio: on_receive_dio(self, msg); break;
        case MsgKind::Dao: on_receive_dao(self, msg); break;
        case MsgKind::DaoAck: on_receive_dao_ack(self, msg); break;
        case MsgKind::Data: on_receive_data(self, msg); break;
    }
}

void Simulator::on_receive_dis(NodeId self, const Message&) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    if (!(n.is_root || n.joined)) return;
    // rate-limit solicited resets so probe bursts cannot melt the channel
    if (now() - n.last_dis_reset < dis_reset_gap_) return;
    n.last_dis_reset = now();
    trickle_reset(self);
}

void Simulator::on_receive_dio(NodeId self, const Message& msg) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    if (n.is_root) {
        n.trickle.heard_consistent();
        return;
    }
    const NodeId from = msg.src;

    if (msg.rank == kRankInfinite) {
        n.candidates.erase(from);
        if (n.preferred == from) lose_parent(self, from);
        return;
    }

    auto it = n.candidates.find(from);
    const bool known = it != n.candidates.end();
    const bool rank_changed = known && it->second.rank != msg.rank;
    Candidate& cand = n.candidates[from];
    if (!known) {
        cand.etx = 1.0;
        cand.ewma_success = 1.0;
    }
    cand.rank = msg.rank;
    cand.last_heard = now();
    cand.last_rssi_dist = distance(n.pos, nodes_[static_cast<std::size_t>(from)].pos);

    if (rank_changed && from == n.preferred)
        trickle_reset(self);
    else
        n.trickle.heard_consistent();

    const NodeId old_pref = n.preferred;
    select_parent(self);

    if (n.preferred != old_pref && n.preferred != kNoNode) {
        if (old_pref == kNoNode) {
            n.joined = true;
            schedule_trickle(self);
        } else {
            trickle_reset(self);
        }
        send_dao(self, DaoReason::ParentChange);
    } else if (n.preferred != kNoNode && from == n.preferred) {
        if (now() - n.last_originated_dao >= dao_refresh_min_gap_)
            send_dao(self, DaoReason::DioRefresh);
    }
}

void Simulator::select_parent(NodeId self) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    NodeId best = kNoNode;
    std::uint32_t best_cost = kRankInfinite;
    // with mobility, first try parents last heard with link margin to spare
    const double edge = scenario_.radio.tx_range * 0.85;
    bool only_strong = scenario_.mobility;
retry_weak:
    for (const auto& [id, c] : n.candidates) {
        if (c.rank >= kRankInfinite) continue;
        // moving nodes cannot trust neighbors they have not heard recently
        if (scenario_.mobility && now() - c.last_heard > neighbor_timeout_) continue;
        if (only_strong && c.last_rssi_dist > edge) continue;
        // loop avoidance: likely descendants are not parent material
        if (n.rank != kRankInfinite && id != n.preferred &&
            c.rank >= static_cast<std::uint32_t>(n.rank) + kParentSwitchHysteresis)
            continue;
        const std::uint32_t cost = c.rank + rank_increment(c.etx);
        if (cost >= kRankInfinite) continue;
        if (cost < best_cost || (cost == best_cost && id < best)) {
            best = id;
            best_cost = cost;
        }
    }
    if (best == kNoNode && only_strong) {
        only_strong = false;
        goto retry_weak;
    }
    if (best == kNoNode) return;

    if (n.preferred != kNoNode && best != n.preferred) {
        auto it = n.candidates.find(n.preferred);
        const bool still_usable =
            it != n.candidates.end() && it->second.rank < kRankInfinite &&
            !(scenario_.mobility && now() - it->second.last_heard > neighbor_timeout_);
        if (still_usable) {
            const std::uint32_t cur_cost = it->second.rank + rank_increment(it->second.etx);
            // switch only on an improvement of at least the hysteresis
            if (best_cost + kParentSwitchHysteresis > cur_cost) {
                best = n.preferred;
                best_cost = cur_cost;
            }
        }
    }
    n.preferred = best;
    n.rank = static_cast<std::uint16_t>(std::min<std::uint32_t>(best_cost, kRankInfinite - 1));
}

void Simulator::update_rank(NodeId self) { select_parent(self); }

void Simulator::lose_parent(NodeId self, NodeId failed_parent) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    n.candidates.erase(failed_parent);
    if (n.preferred != failed_parent) return;
    n.preferred = kNoNode;
    n.rank = kRankInfinite;
    select_parent(self);
    if (n.preferred != kNoNode) {
        trickle_reset(self);
        send_dao(self, DaoReason::RouteError);
    } else {
        n.joined = false;
        // mobile nodes already run a periodic solicit timer
        if (!scenario_.mobility)
            schedule(now() + 1.0, EventKind::SolicitTimer, self);
    }
}

void Simulator::schedule_trickle(NodeId self) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    n.trickle.reset(now(), trickle_rng_);
    n.trickle_event = schedule(n.trickle.next_fire, EventKind::TrickleFire, self);
}

void Simulator::trickle_reset(NodeId self) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    if (!(n.is_root || n.joined)) return;
    if (n.trickle.current_interval <= n.trickle.i_min_s * 1.0001 && n.trickle_event != 0)
        return;  // already at the minimum interval
    if (n.trickle_event != 0) queue_.cancel(n.trickle_event);
    schedule_trickle(self);
}

void Simulator::handle_trickle_fire(NodeId id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!(n.is_root || n.joined)) {
        n.trickle_event = 0;
        return;
    }
    if (!n.trickle.suppressed()) {
        Message dio;
        dio.kind = MsgKind::Dio;
        dio.dst = kNoNode;
        dio.rank = n.rank;
        enqueue_tx(id, dio);
        n.defense->on_dio_sent(now());
    } else {
        ++metrics_.control[MsgKind::Dio].suppressed;
    }
    double interval_end = n.trickle.interval_start + n.trickle.current_interval;
    if (interval_end < now()) interval_end = now();
    n.trickle.advance_interval(interval_end, trickle_rng_);
    n.trickle_event = schedule(n.trickle.next_fire, EventKind::TrickleFire, id);
}

void Simulator::handle_solicit(NodeId id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.is_root) return;
    bool probe = !n.joined;
    if (!probe && scenario_.mobility) {
        // under mobility, re-solicit when the preferred parent has gone quiet
        auto it = n.candidates.find(n.preferred);
        probe = n.preferred == kNoNode || it == n.candidates.end() ||
                now() - it->second.last_heard > probe_age_;
    }
    if (probe) {
        Message dis;
        dis.kind = MsgKind::Dis;
        dis.dst = kNoNode;
        enqueue_tx(id, dis);
    }
    if (!n.joined || scenario_.mobility)
        schedule(now() + solicit_interval_, EventKind::SolicitTimer, id);
}

// ---------------------------------------------------------------------------
// DAO machinery

void Simulator::send_dao(NodeId self, DaoReason reason) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    if (scenario_.mop == Mop::NoDownwardRoutes) return;
    if (n.preferred == kNoNode) return;
    if (reason == DaoReason::ParentChange || reason == DaoReason::RouteError) {
        // damp churn: at most one parent-switch DAO per gap, and none at all
        // when the parent already holds our fresh route from a recent DAO
        if (now() - n.last_parent_change_dao < parent_change_dao_gap_) return;
        auto it = n.last_dao_to.find(n.preferred);
        if (it != n.last_dao_to.end() && now() - it->second < dao_same_parent_gap_)
            return;
        n.last_parent_change_dao = now();
    }
    n.last_dao_to[n.preferred] = now();

    Message dao;
    dao.kind = MsgKind::Dao;
    dao.dst = n.preferred;
    dao.dao_prefix = GlobalPrefix{self};
    dao.dao_sequence = ++n.dao_seq;
    ++metrics_.daos_originated;
    n.last_originated_dao = now();
    if (n.armed) n.captured_dao = dao;  // verbatim copy for later replay

    if (n.pending_dao.active && n.pending_dao.timer != 0)
        queue_.cancel(n.pending_dao.timer);
    n.pending_dao.active = true;
    n.pending_dao.seq = dao.dao_sequence;
    n.pending_dao.retries = 0;
    n.pending_dao.dao = dao;
    n.pending_dao.timer = schedule(now() + dao_ack_timeout_, EventKind::DaoTimer, self);

    enqueue_tx(self, dao);
}

void Simulator::handle_dao_timer(NodeId id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.pending_dao.active) return;
    if (n.pending_dao.retries >= dao_max_retries_) {
        // repeated unacked DAOs mean the parent stopped serving us: treat it
        // as unreachable and repair. Compromised nodes skip the repair and
        // stay attached to keep their flood target.
        n.pending_dao.active = false;
        if (!n.armed && n.preferred != kNoNode &&
            now() - n.last_repair >= repair_cooldown_) {
            n.last_repair = now();
            lose_parent(id, n.preferred);
        }
        return;
    }
    ++n.pending_dao.retries;
    Message resend = n.pending_dao.dao;
    resend.dst = n.preferred;
    if (n.preferred == kNoNode) {
        n.pending_dao.active = false;
        return;
    }
    enqueue_tx(id, resend);
    n.pending_dao.timer = schedule(now() + dao_ack_timeout_, EventKind::DaoTimer, id);
}

void Simulator::on_receive_dao(NodeId self, const Message& msg) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    if (scenario_.mop == Mop::NoDownwardRoutes) return;
    if (n.is_root) {
        root_process_dao(self, msg);
        return;
    }
    if (scenario_.mop == Mop::NonStoring)
        process_dao_nonstoring(self, msg);
    else
        process_dao_storing(self, msg);
}

void Simulator::install_route(NodeId self, GlobalPrefix prefix, NodeId next_hop) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    auto it = n.routes.find(prefix.token);
    if (it != n.routes.end()) {
        it->second.next_hop = next_hop;
        it->second.expires = now() + route_lifetime_;
        return;
    }
    if (static_cast<int>(n.routes.size()) >= scenario_.defense.node_max * 2) {
        // table full: evict the entry closest to expiry
        auto victim = n.routes.begin();
        for (auto r = n.routes.begin(); r != n.routes.end(); ++r)
            if (r->second.expires < victim->second.expires) victim = r;
        n.routes.erase(victim);
    }
    n.routes[prefix.token] = RouteEntry{next_hop, now() + route_lifetime_};
}

void Simulator::send_dao_ack(NodeId self, NodeId to, const Message& dao) {
    Message ack;
    ack.kind = MsgKind::DaoAck;
    ack.dst = to;
    ack.acked_sequence = dao.dao_sequence;
    ack.ack_target = dao.dao_prefix;
    enqueue_tx(self, ack);
}

void Simulator::process_dao_storing(NodeId self, const Message& dao) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    DaoVerdict verdict = n.defense->on_dao(dao.src, dao.dao_prefix, now());
    ++metrics_.defense_invocations;
    metrics_.defense_comparisons +=
        static_cast<std::uint64_t>(n.defense->last_decision().comparisons);
    metrics_.defense_table_bytes_peak =
        std::max(metrics_.defense_table_bytes_peak, n.defense->table_bytes());
    if (verdict == DaoVerdict::Discard || verdict == DaoVerdict::BlacklistAndDiscard) {
        ++metrics_.daos_discarded_by_defense;
        return;
    }

    install_route(self, dao.dao_prefix, dao.src);
    send_dao_ack(self, dao.src, dao);

    if (n.preferred != kNoNode) {
        // storing mode: a NEW aggregated DAO travels one hop up, preserving
        // the originator's prefix
        Message up;
        up.kind = MsgKind::Dao;
        up.dst = n.preferred;
        up.dao_prefix = dao.dao_prefix;
        up.dao_sequence = ++n.dao_seq;
        ++metrics_.daos_aggregated;
        enqueue_tx(self, up);
    }
}

void Simulator::process_dao_nonstoring(NodeId self, const Message& dao) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    DaoVerdict verdict = n.defense->on_dao(dao.src, dao.dao_prefix, now());
    ++metrics_.defense_invocations;
    metrics_.defense_comparisons +=
        static_cast<std::uint64_t>(n.defense->last_decision().comparisons);
    metrics_.defense_table_bytes_peak =
        std::max(metrics_.defense_table_bytes_peak, n.defense->table_bytes());
    if (verdict == DaoVerdict::Discard || verdict == DaoVerdict::BlacklistAndDiscard) {
        ++metrics_.daos_discarded_by_defense;
        return;
    }
    if (std::find(dao.reverse_route_stack.begin(), dao.reverse_route_stack.end(), self) !=
        dao.reverse_route_stack.end())
        return;  // loop
    if (n.preferred == kNoNode) return;
    Message fwd = dao;
    fwd.dst = n.preferred;
    fwd.reverse_route_stack.push_back(self);
    enqueue_tx(self, fwd);
}

void Simulator::root_process_dao(NodeId self, const Message& dao) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    DaoVerdict verdict = n.defense->on_dao(dao.src, dao.dao_prefix, now());
    ++metrics_.defense_invocations;
    metrics_.defense_comparisons +=
        static_cast<std::uint64_t>(n.defense->last_decision().comparisons);
    if (verdict == DaoVerdict::Discard || verdict == DaoVerdict::BlacklistAndDiscard) {
        ++metrics_.daos_discarded_by_defense;
        return;
    }

    if (scenario_.mop == Mop::NonStoring) {
        // downward source route: reversed stack then the originator
        Message ack;
        ack.kind = MsgKind::DaoAck;
        ack.acked_sequence = dao.dao_sequence;
        ack.ack_target = dao.dao_prefix;
        if (dao.reverse_route_stack.empty()) {
            ack.dst = dao.dao_prefix.token;  // direct, if in range
        } else {
            std::vector<NodeId> route(dao.reverse_route_stack.rbegin(),
                                      dao.reverse_route_stack.rend());
            route.push_back(dao.dao_prefix.token);
            ack.dst = route.front();
            ack.source_route.assign(route.begin() + 1, route.end());
        }
        install_route(self, dao.dao_prefix, ack.dst);
        enqueue_tx(self, ack);
    } else {
        install_route(self, dao.dao_prefix, dao.src);
        send_dao_ack(self, dao.src, dao);
    }
}

void Simulator::on_receive_dao_ack(NodeId self, const Message& msg) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    if (auto it = n.candidates.find(msg.src); it != n.candidates.end())
        it->second.last_heard = now();
    if (msg.ack_target.token != self && !msg.source_route.empty()) {
        // forward along the remaining source route
        Message fwd = msg;
        fwd.dst = msg.source_route.front();
        fwd.source_route.erase(fwd.source_route.begin());
        enqueue_tx(self, fwd);
        return;
    }
    if (msg.ack_target.token != self) return;
    if (n.pending_dao.active && n.pending_dao.seq == msg.acked_sequence) {
        n.pending_dao.active = false;
        if (n.pending_dao.timer != 0) queue_.cancel(n.pending_dao.timer);
    }
}

// ---------------------------------------------------------------------------
// data plane

void Simulator::handle_data_generation(NodeId id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    schedule(now() + scenario_.data_interval, EventKind::DataGeneration, id);

    Message d;
    d.kind = MsgKind::Data;
    d.origin = id;
    d.created_at = now();
    d.packet_id = static_cast<std::uint32_t>(metrics_.data_sent +
                                             metrics_.attacker_data_sent + 1);
    if (n.armed)
        ++metrics_.attacker_data_sent;
    else
        ++metrics_.data_sent;

    if (n.preferred == kNoNode) {  // lost at source, no parent yet
        ++metrics_.data_no_parent_drops;
        return;
    }
    d.sender_rank = n.rank;
    d.dst = n.preferred;
    enqueue_tx(id, d);
}

void Simulator::on_receive_data(NodeId self, const Message& msg) {
    Node& n = nodes_[static_cast<std::size_t>(self)];
    if (n.is_root) {
        const bool from_attacker =
            metrics_.ground_truth_attackers.count(msg.origin) > 0;
        if (from_attacker) {
            ++metrics_.attacker_data_received;
        } else {
            ++metrics_.data_received;
            metrics_.delays.push_back(now() - msg.created_at);
        }
        return;
    }
    if (msg.ttl <= 1) {
        ++metrics_.data_ttl_drops;
        return;
    }
    if (n.preferred == kNoNode) {  // dropped: no upward route
        ++metrics_.data_no_parent_drops;
        return;
    }
    // loop detection on the rank carried in the packet: upward traffic must
    // strictly decrease rank.  A first inconsistency marks the packet and
    // still forwards it; a second one drops it.  Either way we reset our
    // trickle so fresh DIOs repair the neighborhood.
    Message fwd = msg;
    if (msg.sender_rank <= n.rank) {
        trickle_reset(self);
        if (msg.rank_error) {
            ++metrics_.data_rank_guard_drops;
            return;
        }
        fwd.rank_error = true;
    }
    fwd.dst = n.preferred;
    fwd.sender_rank = n.rank;
    --fwd.ttl;
    enqueue_tx(self, fwd);
}

// ---------------------------------------------------------------------------
// mobility, adversary, defense upkeep

Position Simulator::mobility_step(NodeId id, double dt) {
    Node& n = nodes_.at(static_cast<std::size_t>(id));
    if (!n.mob.enabled) return n.pos;
    if (now() < n.mob.paused_until) return n.pos;
    const double dx = n.mob.waypoint.x - n.pos.x;
    const double dy = n.mob.waypoint.y - n.pos.y;
    const double dist = std::hypot(dx, dy);
    const double step = n.mob.speed * dt;
    if (dist <= step) {
        n.pos = n.mob.waypoint;
        n.mob.waypoint = Position{mobility_rng_.uniform(0.0, scenario_.arena),
                                  mobility_rng_.uniform(0.0, scenario_.arena)};
        n.mob.speed = mobility_rng_.uniform(scenario_.speed_min, scenario_.speed_max);
        n.mob.paused_until = now() + mobility_rng_.uniform(pause_min_, pause_max_);
    } else {
        n.pos.x += dx / dist * step;
        n.pos.y += dy / dist * step;
    }
    n.pos.x = std::clamp(n.pos.x, 0.0, scenario_.arena);
    n.pos.y = std::clamp(n.pos.y, 0.0, scenario_.arena);
    return n.pos;
}

void Simulator::handle_mobility_step(NodeId id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    mobility_step(id, scenario_.mobility_dt);
    // movement-aware trickle: a moving node re-advertises periodically so
    // neighbours track its rank while it crosses their cells
    if (n.joined && now() - n.last_move_reset >= move_reset_period_) {
        n.last_move_reset = now();
        trickle_reset(id);
    }
    schedule(now() + scenario_.mobility_dt, EventKind::MobilityStep, id);
}

void Simulator::handle_defense_reinit(NodeId id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    n.defense->reinitialize(now());
    schedule(now() + scenario_.defense.reinit_period, EventKind::DefenseReinit, id);
}

void Simulator::handle_attack_replay(NodeId id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (!n.armed) return;
    schedule(now() + scenario_.replay_interval, EventKind::AttackReplay, id);
    ++metrics_.attack_replays;
    if (n.preferred == kNoNode) return;  // orphaned: skip this fire
    if (!n.captured_dao) {
        // nothing captured yet: originate one legitimate DAO and capture it
        send_dao(id, DaoReason::DioRefresh);
        return;
    }
    Message m = *n.captured_dao;
    m.dst = n.preferred;
    m.replayed = true;
    enqueue_tx(id, m);
}

}  // namespace rplsim
