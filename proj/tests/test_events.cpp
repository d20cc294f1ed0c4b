#include "doctest.h"

#include "rplsim/events.hpp"

using namespace rplsim;

TEST_CASE("events fire in fire_at order") {
    EventQueue q;
    q.schedule(0.0, 5.0, EventKind::DataGeneration, 1);
    q.schedule(0.0, 4.096, EventKind::TrickleFire, 2);
    CHECK(q.pop().kind == EventKind::TrickleFire);
    CHECK(q.pop().kind == EventKind::DataGeneration);
}

TEST_CASE("identical fire_at resolves by insertion order") {
    EventQueue q;
    q.schedule(0.0, 1.0, EventKind::DataGeneration, 7);
    q.schedule(0.0, 1.0, EventKind::TrickleFire, 8);
    q.schedule(0.0, 1.0, EventKind::DaoTimer, 9);
    CHECK(q.pop().node == 7);
    CHECK(q.pop().node == 8);
    CHECK(q.pop().node == 9);
}

TEST_CASE("event at fire_at == now precedes strictly later events") {
    EventQueue q;
    q.schedule(1.0, 1.5, EventKind::DataGeneration, 1);
    q.schedule(1.0, 1.0, EventKind::TrickleFire, 2);
    CHECK(q.pop().node == 2);
}

TEST_CASE("scheduling in the past is rejected") {
    EventQueue q;
    CHECK_THROWS_AS(q.schedule(10.0, 9.0, EventKind::DataGeneration, 1),
                    std::logic_error);
}

TEST_CASE("cancelled events never fire") {
    EventQueue q;
    EventId id = q.schedule(0.0, 1.0, EventKind::DaoTimer, 1);
    q.schedule(0.0, 2.0, EventKind::DataGeneration, 2);
    q.cancel(id);
    CHECK(q.pop().node == 2);
    CHECK(q.empty());
}

TEST_CASE("pop on an empty queue throws") {
    EventQueue q;
    CHECK_THROWS_AS(q.pop(), std::logic_error);
}

TEST_CASE("clock cannot move backwards") {
    SimClock c;
    c.advance_to(5.0);
    CHECK(c.now() == 5.0);
    CHECK_THROWS_AS(c.advance_to(4.0), std::logic_error);
}
