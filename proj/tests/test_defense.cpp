#include "doctest.h"

#include <vector>

#include "rplsim/defense.hpp"
#include "rplsim/rng.hpp"

using namespace rplsim;

namespace {

DefenseConfig cfg() {
    DefenseConfig c;
    c.beta = 10;
    c.activate_at = 120.0;
    c.node_max = 32;
    return c;
}

}  // namespace

TEST_CASE("Li-MSD forwards up to beta, blacklists on the next, then short-circuits") {
    LiMsdDefense d(1, cfg());
    const NodeId attacker = 8;
    for (int i = 1; i <= 10; ++i) {
        auto v = d.on_dao(attacker, GlobalPrefix{attacker}, 130.0);
        CHECK(v == DaoVerdict::Forward);
        CHECK(d.last_decision().dao_count == i);
    }
    CHECK(d.on_dao(attacker, GlobalPrefix{attacker}, 131.0) ==
          DaoVerdict::BlacklistAndDiscard);
    CHECK(d.n_blacklist() == 1);
    for (int i = 0; i < 5; ++i) {
        CHECK(d.on_dao(attacker, GlobalPrefix{attacker}, 132.0 + i) ==
              DaoVerdict::Discard);
        // early mitigation: the neighbor table is never scanned again
        CHECK(d.last_decision().neighbor_scans == 0);
        CHECK(d.last_decision().comparisons == d.n_blacklist());
    }
}

TEST_CASE("before activation Li-MSD counts but never blacklists") {
    LiMsdDefense d(1, cfg());
    for (int i = 0; i < 25; ++i)
        CHECK(d.on_dao(8, GlobalPrefix{8}, 10.0 + i) == DaoVerdict::Forward);
    CHECK(d.n_blacklist() == 0);
    // the warm counter means the first post-activation DAO is already over
    CHECK(d.on_dao(8, GlobalPrefix{8}, 121.0) == DaoVerdict::BlacklistAndDiscard);
}

TEST_CASE("search-blacklist answers membership exactly") {
    LiMsdDefense d(1, cfg());
    int c = 0;
    CHECK_FALSE(d.search_blacklist(8, c));
    for (int i = 0; i < 11; ++i) d.on_dao(8, GlobalPrefix{8}, 130.0);
    CHECK(d.search_blacklist(8, c));
    CHECK_FALSE(d.search_blacklist(7, c));
}

TEST_CASE("forwarded DAOs carry a foreign prefix and are never counted") {
    // victim fix: B relaying C's DAOs to A must not budge B's counter
    LiMsdDefense a(1, cfg());
    const NodeId b = 2, c = 3;
    for (int i = 0; i < 100; ++i)
        CHECK(a.on_dao(b, GlobalPrefix{c}, 130.0 + i) == DaoVerdict::ForwardUncounted);
    CHECK(a.n_blacklist() == 0);
    // B's own originations still count normally
    CHECK(a.on_dao(b, GlobalPrefix{b}, 300.0) == DaoVerdict::Forward);
    CHECK(a.last_decision().dao_count == 1);
}

TEST_CASE("first DAO from a new child creates a neighbor entry") {
    LiMsdDefense d(1, cfg());
    CHECK(d.t_child() == 0);
    CHECK(d.on_dao(5, GlobalPrefix{5}, 130.0) == DaoVerdict::Forward);
    CHECK(d.t_child() == 1);
    CHECK(d.neighbor_table().entries().front().from == 5);
}

TEST_CASE("reinitialization clears both tables and allows re-detection") {
    LiMsdDefense d(1, cfg());
    for (int i = 0; i < 12; ++i) d.on_dao(8, GlobalPrefix{8}, 130.0);
    REQUIRE(d.n_blacklist() == 1);
    d.reinitialize(1800.0);
    CHECK(d.n_blacklist() == 0);
    CHECK(d.t_child() == 0);
    CHECK(d.init_calls() >= 2);  // boot + explicit reinit
    // the attacker can be detected again from scratch
    for (int i = 0; i < 10; ++i)
        CHECK(d.on_dao(8, GlobalPrefix{8}, 1801.0) == DaoVerdict::Forward);
    CHECK(d.on_dao(8, GlobalPrefix{8}, 1802.0) == DaoVerdict::BlacklistAndDiscard);
}

TEST_CASE("blacklisting emits a block event through the sink") {
    LiMsdDefense d(1, cfg());
    std::vector<BlockEvent> events;
    d.set_block_sink([&](const BlockEvent& ev) { events.push_back(ev); });
    for (int i = 0; i < 11; ++i) d.on_dao(8, GlobalPrefix{8}, 130.0);
    REQUIRE(events.size() == 1);
    CHECK(events[0].parent == 1);
    CHECK(events[0].target == 8);
    CHECK(events[0].by == DefenseMode::LiMsd);
}

TEST_CASE("SecRPL counts every DAO from a child regardless of originator") {
    SecRplDefense d(1, cfg());
    const NodeId b = 2;
    // 10 forwards with mixed originators all count against child B
    for (int i = 0; i < 10; ++i) {
        auto v = d.on_dao(b, GlobalPrefix{3 + (i % 2)}, 130.0 + i);
        CHECK(v == DaoVerdict::Forward);
    }
    CHECK(d.on_dao(b, GlobalPrefix{b}, 141.0) == DaoVerdict::Discard);
    CHECK(d.is_blocked(b));
}

TEST_CASE("SecRPL unblocks everyone when the parent sends a DIO") {
    SecRplDefense d(1, cfg());
    for (int i = 0; i < 11; ++i) d.on_dao(8, GlobalPrefix{8}, 130.0);
    REQUIRE(d.is_blocked(8));
    d.on_dio_sent(140.0);
    CHECK_FALSE(d.is_blocked(8));
    // and the attacker immediately floods again
    CHECK(d.on_dao(8, GlobalPrefix{8}, 141.0) == DaoVerdict::Forward);
}

TEST_CASE("SecRPL counters persist while no DIO is sent") {
    SecRplDefense d(1, cfg());
    for (int i = 0; i < 10; ++i) d.on_dao(8, GlobalPrefix{8}, 130.0);
    // long quiet gap, still no DIO
    CHECK(d.on_dao(8, GlobalPrefix{8}, 900.0) == DaoVerdict::Discard);
}

TEST_CASE("comparison work is bounded by blacklist plus child-table size") {
    for (int t_child = 1; t_child <= 32; ++t_child) {
        LiMsdDefense d(1, cfg());
        for (NodeId c = 2; c < 2 + t_child; ++c) d.on_dao(c, GlobalPrefix{c}, 130.0);
        REQUIRE(d.t_child() == t_child);
        // revisit every child once; each decision stays within the bound
        for (NodeId c = 2; c < 2 + t_child; ++c) {
            d.on_dao(c, GlobalPrefix{c}, 131.0);
            CHECK(d.last_decision().comparisons <= d.n_blacklist() + d.t_child());
        }
    }
}

TEST_CASE("property: a forwarding-only victim is never blacklisted by Li-MSD") {
    RngStream rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        LiMsdDefense parent(1, cfg());
        const NodeId victim = 2;
        const int own = static_cast<int>(rng.uniform_int(10));    // < beta originations
        const int relayed = 1 + static_cast<int>(rng.uniform_int(500));
        int sent_own = 0;
        for (int i = 0; i < own + relayed; ++i) {
            const bool originate = sent_own < own && rng.chance(0.2);
            GlobalPrefix p = originate
                                 ? GlobalPrefix{victim}
                                 : GlobalPrefix{3 + static_cast<NodeId>(rng.uniform_int(20))};
            sent_own += originate;
            parent.on_dao(victim, p, 130.0 + i);
        }
        int c = 0;
        CHECK_FALSE(parent.search_blacklist(victim, c));
    }
}
