#include "rplsim/defense.hpp"

#include <algorithm>

namespace rplsim {

LiMsdDefense::LiMsdDefense(NodeId self, const DefenseConfig& cfg)
    : self_(self), cfg_(cfg), neighbors_(cfg.node_max), blacklist_(cfg.node_max) {
    reinitialize(0.0);
}

void LiMsdDefense::reinitialize(double /*now*/) {
    neighbors_.clear();
    blacklist_.clear();
    ++init_calls_;
}

std::size_t LiMsdDefense::table_bytes() const {
    // entry sizes on the modelled mote: <from, global_id, dao_count> = 6 B,
    // <bl_src_ip> = 2 B
    return static_cast<std::size_t>(neighbors_.size()) * 6 +
           static_cast<std::size_t>(blacklist_.size()) * 2;
}

DaoVerdict LiMsdDefense::on_dao(NodeId sender, GlobalPrefix dao_prefix, double now) {
    DaoDecisionRecord r;
    r.time = now;
    r.sender = sender;
    r.dao_prefix = dao_prefix;
    const bool active = now >= cfg_.activate_at;

    int comparisons = 0;
    if (active && blacklist_.contains(sender, comparisons)) {
        // early mitigation: no neighbor-table scan for a blacklisted sender
        r.verdict = DaoVerdict::Discard;
        r.n_blacklist = blacklist_.size();
        r.t_child = neighbors_.size();
        r.comparisons = comparisons;
        r.neighbor_scans = 0;
        record(r);
        return DaoVerdict::Discard;
    }
    if (!active) comparisons = 0;  // blacklist is not consulted before activation

    int neighbor_scans = 0;
    NeighborEntry* entry = neighbors_.find(sender, neighbor_scans);
    if (!entry) {
        // first DAO ever from this child; global id derived from the sender's
        // own identity token
        entry = &neighbors_.insert(sender, GlobalPrefix{sender});
    }

    DaoVerdict verdict;
    if (dao_prefix == entry->global_id) {
        // sender is the originator
        if (entry->dao_count < cfg_.beta) {
            ++entry->dao_count;
            verdict = DaoVerdict::Forward;
        } else if (active) {
            blacklist_.add(sender);
            if (std::find(ever_blacklisted_.begin(), ever_blacklisted_.end(), sender) ==
                ever_blacklisted_.end())
                ever_blacklisted_.push_back(sender);
            emit_block(BlockEvent{now, self_, sender, DefenseMode::LiMsd});
            verdict = DaoVerdict::BlacklistAndDiscard;
        } else {
            // pre-activation: table stays warm but no blacklisting yet
            verdict = DaoVerdict::Forward;
        }
    } else {
        // sender forwards on behalf of a descendant: not counted (victim fix)
        verdict = DaoVerdict::ForwardUncounted;
    }

    r.verdict = verdict;
    r.dao_count = entry->dao_count;
    r.n_blacklist = blacklist_.size();
    r.t_child = neighbors_.size();
    r.comparisons = comparisons + neighbor_scans;
    r.neighbor_scans = neighbor_scans;
    record(r);
    return verdict;
}

SecRplDefense::SecRplDefense(NodeId self, const DefenseConfig& cfg)
    : self_(self), cfg_(cfg) {}

SecRplDefense::ChildCounter* SecRplDefense::find(NodeId child, int& comparisons) {
    for (auto& c : counters_) {
        ++comparisons;
        if (c.child == child) return &c;
    }
    return nullptr;
}

bool SecRplDefense::is_blocked(NodeId child) const {
    for (const auto& c : counters_)
        if (c.child == child) return c.blocked;
    return false;
}

std::size_t SecRplDefense::table_bytes() const {
    return counters_.size() * 6;
}

DaoVerdict SecRplDefense::on_dao(NodeId sender, GlobalPrefix dao_prefix, double now) {
    DaoDecisionRecord r;
    r.time = now;
    r.sender = sender;
    r.dao_prefix = dao_prefix;

    int comparisons = 0;
    ChildCounter* c = find(sender, comparisons);
    if (!c) {
        counters_.push_back(ChildCounter{sender, 0, false});
        c = &counters_.back();
    }

    // every DAO from the child counts, regardless of originator
    ++c->forwarded;

    const bool active = now >= cfg_.activate_at;
    DaoVerdict verdict = DaoVerdict::Forward;
    if (active && c->forwarded > cfg_.secrpl_threshold) {
        if (!c->blocked) {
            c->blocked = true;
            if (std::find(ever_blocked_.begin(), ever_blocked_.end(), sender) ==
                ever_blocked_.end())
                ever_blocked_.push_back(sender);
            emit_block(BlockEvent{now, self_, sender, DefenseMode::SecRpl});
        }
        verdict = DaoVerdict::Discard;
    } else if (c->blocked) {
        verdict = DaoVerdict::Discard;
    }

    r.verdict = verdict;
    r.dao_count = c->forwarded;
    r.t_child = static_cast<int>(counters_.size());
    r.comparisons = comparisons;
    record(r);
    return verdict;
}

void SecRplDefense::on_dio_sent(double /*now*/) {
    for (auto& c : counters_) {
        c.forwarded = 0;
        c.blocked = false;
    }
}

}  // namespace rplsim
