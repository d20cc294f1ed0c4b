#include "doctest.h"

#include "rplsim/simulator.hpp"

using namespace rplsim;

namespace {

Scenario small_scenario(int clients, double rx_success = 1.0) {
    Scenario s;
    s.clients = clients;
    s.attackers = 0;
    s.radio.rx_success = rx_success;
    s.data_interval = 1.0e7;  // keep the data plane quiet in radio tests
    return s;
}

Message data_msg() {
    Message m;
    m.kind = MsgKind::Data;
    return m;
}

}  // namespace

TEST_CASE("unicast outside the unit disk is dropped out-of-range") {
    TopologyOverride topo;
    topo.positions = {{0, 0}, {60, 0}};
    Simulator sim(small_scenario(1), 1, &topo);
    auto out = sim.try_deliver(1, 0, data_msg());
    CHECK_FALSE(out.delivered);
    CHECK(out.reason == DropReason::OutOfRange);
}

TEST_CASE("unicast inside the disk with a perfect radio is delivered") {
    TopologyOverride topo;
    topo.positions = {{0, 0}, {10, 0}};
    Simulator sim(small_scenario(1), 1, &topo);
    auto out = sim.try_deliver(1, 0, data_msg());
    CHECK(out.delivered);
    CHECK(out.at > 0.0);
}

TEST_CASE("lossy radio hits the configured delivery probability") {
    TopologyOverride topo;
    topo.positions = {{0, 0}, {10, 0}};
    Simulator sim(small_scenario(1, 0.9), 1, &topo);
    // no-op ticks advance the clock so successive sends never share the medium
    const int trials = 1000;
    for (int i = 1; i <= trials; ++i)
        sim.schedule(static_cast<double>(i), EventKind::MetricsSample, 0);
    int delivered = 0, collisions = 0;
    for (int i = 1; i <= trials; ++i) {
        sim.run_until(static_cast<double>(i) + 0.5);
        auto out = sim.try_deliver(1, 0, data_msg());
        delivered += out.delivered;
        collisions += !out.delivered && out.reason == DropReason::Collision;
    }
    // the occasional control frame can collide with a probe; exclude those
    double mean = static_cast<double>(delivered) / (trials - collisions);
    CHECK(mean >= 0.88);
    CHECK(mean <= 0.92);
}

TEST_CASE("broadcast reaches exactly the in-range neighbors") {
    TopologyOverride topo;
    topo.positions = {{0, 0}, {10, 0}, {30, 0}, {49, 0}, {80, 0}};
    Simulator sim(small_scenario(4), 1, &topo);
    Message m = data_msg();
    m.dst = kNoNode;
    auto outcomes = sim.broadcast(0, m);
    CHECK(outcomes.size() == 3);  // 80 m neighbor is outside the disk
    for (const auto& o : outcomes) CHECK(o.delivered);
}

TEST_CASE("broadcast with no neighbors in range returns an empty list") {
    TopologyOverride topo;
    topo.positions = {{0, 0}, {140, 140}};
    Simulator sim(small_scenario(1), 1, &topo);
    Message m = data_msg();
    m.dst = kNoNode;
    CHECK(sim.broadcast(1, m).empty());
}

TEST_CASE("waypoint kinematics advance on a straight line") {
    Scenario s = small_scenario(1);
    s.mobility = true;
    TopologyOverride topo;
    topo.positions = {{0, 0}, {0, 0}};
    Simulator sim(s, 1, &topo);
    Simulator::Node& n = sim.node_mut(1);
    n.mob.waypoint = Position{30, 40};
    n.mob.speed = 2.0;
    n.mob.paused_until = 0.0;
    Position p = sim.mobility_step(1, 5.0);
    CHECK(p.x == doctest::Approx(6.0));
    CHECK(p.y == doctest::Approx(8.0));
}

TEST_CASE("arrival at the waypoint draws a fresh waypoint inside the arena") {
    Scenario s = small_scenario(1);
    s.mobility = true;
    TopologyOverride topo;
    topo.positions = {{0, 0}, {50, 50}};
    Simulator sim(s, 1, &topo);
    Simulator::Node& n = sim.node_mut(1);
    n.mob.waypoint = Position{50, 50};  // already there
    n.mob.speed = 1.0;
    n.mob.paused_until = 0.0;
    sim.mobility_step(1, 1.0);
    CHECK(n.mob.waypoint.x >= 0.0);
    CHECK(n.mob.waypoint.x <= 150.0);
    CHECK(n.mob.waypoint.y >= 0.0);
    CHECK(n.mob.waypoint.y <= 150.0);
    bool moved_target = n.mob.waypoint.x != 50.0 || n.mob.waypoint.y != 50.0;
    CHECK(moved_target);
}

TEST_CASE("static scenario keeps every position constant for the full run") {
    Scenario s = small_scenario(5);
    s.duration = 1800.0;
    Simulator sim(s, 3);
    std::vector<Position> before;
    for (int i = 0; i < sim.node_count(); ++i) before.push_back(sim.node(i).pos);
    sim.run();
    for (int i = 0; i < sim.node_count(); ++i) {
        CHECK(sim.node(i).pos.x == before[static_cast<std::size_t>(i)].x);
        CHECK(sim.node(i).pos.y == before[static_cast<std::size_t>(i)].y);
    }
}

TEST_CASE("mobile nodes respect the speed envelope between steps") {
    Scenario s = small_scenario(5);
    s.mobility = true;
    Simulator sim(s, 4);
    std::vector<Position> before;
    for (int i = 0; i < sim.node_count(); ++i) before.push_back(sim.node(i).pos);
    sim.run_until(100.0);
    CHECK(sim.node(0).pos.x == before[0].x);  // root never moves
    for (int i = 1; i < sim.node_count(); ++i) {
        double moved = distance(sim.node(i).pos, before[static_cast<std::size_t>(i)]);
        CHECK(moved <= 2.0 * 100.0 + 1e-9);  // speed cap 2 m/s
    }
}
