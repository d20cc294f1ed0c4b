#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rplsim/types.hpp"

namespace rplsim {

enum class DefenseMode { None, LiMsd, SecRpl };

inline const char* defense_mode_name(DefenseMode m) {
    switch (m) {
        case DefenseMode::None: return "none";
        case DefenseMode::LiMsd: return "limsd";
        case DefenseMode::SecRpl: return "secrpl";
    }
    return "?";
}

struct DefenseConfig {
    DefenseMode mode = DefenseMode::None;
    int beta = 10;                 // DAO receive threshold
    double activate_at = 120.0;    // seconds after boot
    double reinit_period = 1800.0; // table re-initialization interval
    int secrpl_threshold = 10;     // same budget as beta by default
    int node_max = 32;             // table capacity
};

enum class DaoVerdict { Forward, ForwardUncounted, Discard, BlacklistAndDiscard };

inline const char* verdict_name(DaoVerdict v) {
    switch (v) {
        case DaoVerdict::Forward: return "forward";
        case DaoVerdict::ForwardUncounted: return "forward-uncounted";
        case DaoVerdict::Discard: return "discard";
        case DaoVerdict::BlacklistAndDiscard: return "blacklist-discard";
    }
    return "?";
}

/// Emitted whenever a parent blocks or blacklists a child; the metrics module
/// turns these into FPR.
struct BlockEvent {
    double time = 0.0;
    NodeId parent = kNoNode;
    NodeId target = kNoNode;
    DefenseMode by = DefenseMode::None;
};

/// One row of the per-node decision log, enough to re-check every verdict
/// offline.
struct DaoDecisionRecord {
    double time = 0.0;
    NodeId sender = kNoNode;
    GlobalPrefix dao_prefix;
    DaoVerdict verdict = DaoVerdict::Forward;
    int dao_count = 0;
    int n_blacklist = 0;
    int t_child = 0;
    int comparisons = 0;        // table comparisons spent on this call
    int neighbor_scans = 0;     // neighbor-table comparisons only
};

/// Per-child entry of the neighbor table: sender, its global prefix, and the
/// count of DAOs it originated itself.
struct NeighborEntry {
    NodeId from = kNoNode;
    GlobalPrefix global_id;
    int dao_count = 0;
};

class NeighborTableQ {
public:
    explicit NeighborTableQ(int capacity) : capacity_(capacity) {}

    int size() const { return static_cast<int>(entries_.size()); }
    const std::vector<NeighborEntry>& entries() const { return entries_; }
    std::vector<NeighborEntry>& entries() { return entries_; }
    int capacity() const { return capacity_; }
    void clear() { entries_.clear(); }

    /// Linear scan; `comparisons` is incremented per entry looked at.
    NeighborEntry* find(NodeId from, int& comparisons) {
        for (auto& e : entries_) {
            ++comparisons;
            if (e.from == from) return &e;
        }
        return nullptr;
    }

    /// Inserts, evicting the smallest-dao_count entry when full.
    NeighborEntry& insert(NodeId from, GlobalPrefix global_id) {
        if (size() >= capacity_) {
            std::size_t victim = 0;
            for (std::size_t i = 1; i < entries_.size(); ++i)
                if (entries_[i].dao_count < entries_[victim].dao_count) victim = i;
            entries_.erase(entries_.begin() + static_cast<long>(victim));
        }
        entries_.push_back(NeighborEntry{from, global_id, 0});
        return entries_.back();
    }

private:
    int capacity_;
    std::vector<NeighborEntry> entries_;
};

class BlacklistTableZ {
public:
    explicit BlacklistTableZ(int capacity) : capacity_(capacity) {}

    int size() const { return static_cast<int>(entries_.size()); }
    const std::vector<NodeId>& entries() const { return entries_; }
    void clear() { entries_.clear(); }

    bool contains(NodeId sender, int& comparisons) const {
        for (NodeId e : entries_) {
            ++comparisons;
            if (e == sender) return true;
        }
        return false;
    }

    void add(NodeId sender) {
        int c = 0;
        if (!contains(sender, c) && size() < capacity_) entries_.push_back(sender);
    }

private:
    int capacity_;
    std::vector<NodeId> entries_;
};

/// Parent-side DAO admission control. One instance per node; consulted before
/// any DAO processing in either MOP.
class DefenseHook {
public:
    using BlockSink = std::function<void(const BlockEvent&)>;

    virtual ~DefenseHook() = default;
    virtual DaoVerdict on_dao(NodeId sender, GlobalPrefix dao_prefix, double now) = 0;
    virtual void on_dio_sent(double /*now*/) {}
    virtual void reinitialize(double /*now*/) {}

    /// Node ids blocked or blacklisted at least once during the run.
    virtual std::vector<NodeId> ever_blocked() const { return {}; }

    /// Bytes of table state currently allocated (capacity accounting).
    virtual std::size_t table_bytes() const { return 0; }

    const std::vector<DaoDecisionRecord>& decision_log() const { return log_; }
    const DaoDecisionRecord& last_decision() const { return log_.back(); }
    void set_block_sink(BlockSink sink) { block_sink_ = std::move(sink); }

protected:
    void record(const DaoDecisionRecord& r) { log_.push_back(r); }
    void emit_block(const BlockEvent& ev) {
        if (block_sink_) block_sink_(ev);
    }

    std::vector<DaoDecisionRecord> log_;
    BlockSink block_sink_;
};

/// Pass-through hook for undefended runs.
class NoDefense final : public DefenseHook {
public:
    DaoVerdict on_dao(NodeId sender, GlobalPrefix dao_prefix, double now) override {
        DaoDecisionRecord r;
        r.time = now;
        r.sender = sender;
        r.dao_prefix = dao_prefix;
        r.verdict = DaoVerdict::Forward;
        record(r);
        return DaoVerdict::Forward;
    }
};

/// Threshold-plus-blacklist admission control with per-originator counting.
/// The sender's global id is derived from its link-local identity token, not
/// trusted from the first DAO seen, so a replayed foreign prefix cannot
/// poison the table.
class LiMsdDefense final : public DefenseHook {
public:
    LiMsdDefense(NodeId self, const DefenseConfig& cfg);

    DaoVerdict on_dao(NodeId sender, GlobalPrefix dao_prefix, double now) override;
    void reinitialize(double now) override;

    std::vector<NodeId> ever_blocked() const override { return ever_blacklisted_; }
    std::size_t table_bytes() const override;

    bool search_blacklist(NodeId sender, int& comparisons) const {
        return blacklist_.contains(sender, comparisons);
    }

    const NeighborTableQ& neighbor_table() const { return neighbors_; }
    const BlacklistTableZ& blacklist() const { return blacklist_; }
    int n_blacklist() const { return blacklist_.size(); }
    int t_child() const { return neighbors_.size(); }
    int init_calls() const { return init_calls_; }

private:
    NodeId self_;
    DefenseConfig cfg_;
    NeighborTableQ neighbors_;
    BlacklistTableZ blacklist_;
    std::vector<NodeId> ever_blacklisted_;
    int init_calls_ = 0;
};

/// Baseline: per-child forwarded-DAO budget, counters and blocks cleared
/// every time the parent sends a DIO.
class SecRplDefense final : public DefenseHook {
public:
    SecRplDefense(NodeId self, const DefenseConfig& cfg);

    DaoVerdict on_dao(NodeId sender, GlobalPrefix dao_prefix, double now) override;
    void on_dio_sent(double now) override;

    std::vector<NodeId> ever_blocked() const override { return ever_blocked_; }
    std::size_t table_bytes() const override;

    bool is_blocked(NodeId child) const;

private:
    struct ChildCounter {
        NodeId child = kNoNode;
        int forwarded = 0;
        bool blocked = false;
    };

    ChildCounter* find(NodeId child, int& comparisons);

    NodeId self_;
    DefenseConfig cfg_;
    std::vector<ChildCounter> counters_;
    std::vector<NodeId> ever_blocked_;
};

}  // namespace rplsim
