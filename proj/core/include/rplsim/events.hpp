#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace rplsim {

using NodeId = int;
inline constexpr NodeId kNoNode = -1;

enum class EventKind {
    MessageDelivery,
    MacTxStart,
    TrickleFire,
    DaoTimer,
    DataGeneration,
    MobilityStep,
    DefenseReinit,
    AttackReplay,
    MetricsSample,
    SolicitTimer,
};

using EventId = std::uint64_t;

struct Event {
    double fire_at = 0.0;
    std::uint64_t seq = 0;  // insertion order, breaks fire_at ties
    EventKind kind = EventKind::MessageDelivery;
    NodeId node = kNoNode;
    std::uint64_t payload = 0;  // index into a kind-specific side table
    EventId id = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
        return a.seq > b.seq;
    }
};

class SimClock {
public:
    double now() const { return now_; }

    void advance_to(double t) {
        if (t < now_) throw std::logic_error("clock moved backwards");
        now_ = t;
    }

private:
    double now_ = 0.0;
};

/// Time-ordered queue with (fire_at, seq) total order and lazy cancellation.
class EventQueue {
public:
    EventId schedule(double now, double fire_at, EventKind kind, NodeId node,
                     std::uint64_t payload = 0) {
        if (fire_at < now)
            throw std::logic_error("event scheduled in the past");
        Event ev;
        ev.fire_at = fire_at;
        ev.seq = next_seq_++;
        ev.kind = kind;
        ev.node = node;
        ev.payload = payload;
        ev.id = next_id_++;
        heap_.push(ev);
        return ev.id;
    }

    void cancel(EventId id) { cancelled_.insert(id); }

    bool empty() {
        drop_cancelled();
        return heap_.empty();
    }

    /// Next live event, or nullptr when the queue is exhausted.
    const Event* peek() {
        drop_cancelled();
        return heap_.empty() ? nullptr : &heap_.top();
    }

    Event pop() {
        drop_cancelled();
        if (heap_.empty()) throw std::logic_error("pop on empty event queue");
        Event ev = heap_.top();
        heap_.pop();
        return ev;
    }

    std::size_t size() const { return heap_.size(); }

private:
    void drop_cancelled() {
        while (!heap_.empty() && cancelled_.count(heap_.top().id)) {
            cancelled_.erase(heap_.top().id);
            heap_.pop();
        }
    }

    std::priority_queue<Event, std::vector<Event>, EventAfter> heap_;
    std::unordered_set<EventId> cancelled_;
    std::uint64_t next_seq_ = 0;
    EventId next_id_ = 1;
};

}  // namespace rplsim
