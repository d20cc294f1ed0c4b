#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rplsim/events.hpp"

namespace rplsim {

/// Global prefix advertised in DAO messages. The identity token equals the
/// node id, mirroring interface-identifier address autoconfiguration, so the
/// link-local / global mapping is bijective by construction.
struct GlobalPrefix {
    NodeId token = kNoNode;
    friend bool operator==(const GlobalPrefix&, const GlobalPrefix&) = default;
};

struct NodeAddress {
    NodeId node_id = kNoNode;
    NodeId link_local() const { return node_id; }
    GlobalPrefix global() const { return GlobalPrefix{node_id}; }
};

struct Position {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct RadioModel {
    double tx_range = 50.0;            // meters
    double interference_range = 100.0; // meters
    double rx_success = 1.0;           // flat delivery probability inside the disk
};

struct MobilityState {
    Position waypoint;
    double speed = 0.0;  // m/s
    double paused_until = 0.0;
    bool enabled = false;
};

enum class Mop { NoDownwardRoutes = 0, NonStoring = 1, Storing = 2, StoringMulticast = 3 };

enum class MsgKind { Dis, Dio, Dao, DaoAck, Data };

inline const char* msg_kind_name(MsgKind k) {
    switch (k) {
        case MsgKind::Dis: return "DIS";
        case MsgKind::Dio: return "DIO";
        case MsgKind::Dao: return "DAO";
        case MsgKind::DaoAck: return "DAO-ACK";
        case MsgKind::Data: return "DATA";
    }
    return "?";
}

struct Message {
    MsgKind kind = MsgKind::Dio;
    NodeId src = kNoNode;
    NodeId dst = kNoNode;  // kNoNode means link-local broadcast

    // DIO
    std::uint16_t rank = 0;
    std::uint8_t dodag_version = 0;
    std::uint8_t instance_id = 0;

    // DAO
    GlobalPrefix dao_prefix;
    std::uint32_t dao_sequence = 0;
    std::vector<NodeId> reverse_route_stack;  // non-storing only
    bool replayed = false;  // attack bookkeeping, not visible to the protocol

    // DAO-ACK
    std::uint32_t acked_sequence = 0;
    GlobalPrefix ack_target;
    std::vector<NodeId> source_route;  // non-storing root ACK

    // Data
    std::uint32_t packet_id = 0;
    std::uint16_t sender_rank = 0;  // RPL option: rank of the previous hop
    bool rank_error = false;        // RPL option: one rank inconsistency already seen
    NodeId origin = kNoNode;
    double created_at = 0.0;
    int ttl = 32;

    std::size_t size_bytes() const {
        switch (kind) {
            case MsgKind::Dis: return 8;
            case MsgKind::Dio: return 80;
            case MsgKind::Dao: return 160 + 2 * reverse_route_stack.size();
            case MsgKind::DaoAck: return 16 + 2 * source_route.size();
            case MsgKind::Data: return 30;
        }
        return 0;
    }
};

enum class DropReason {
    OutOfRange,
    RadioLoss,
    Collision,
    QueueOverflow,
    NoRoute,
};

inline const char* drop_reason_name(DropReason r) {
    switch (r) {
        case DropReason::OutOfRange: return "out-of-range";
        case DropReason::RadioLoss: return "radio-loss";
        case DropReason::Collision: return "collision";
        case DropReason::QueueOverflow: return "queue-overflow";
        case DropReason::NoRoute: return "no-route";
    }
    return "?";
}

struct DeliveryOutcome {
    NodeId dst = kNoNode;
    bool delivered = false;
    double at = 0.0;  // arrival time when delivered
    DropReason reason = DropReason::OutOfRange;
};

}  // namespace rplsim
