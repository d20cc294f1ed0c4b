#include "doctest.h"

#include <string>

#include "rplsim/scenario.hpp"

using namespace rplsim;

TEST_CASE("empty text yields the reference defaults") {
    Scenario s = parse_scenario_text("");
    CHECK(s.clients == 15);
    CHECK(s.servers == 1);
    CHECK(s.attackers == 4);
    CHECK(s.arena == doctest::Approx(150.0));
    CHECK(s.duration == doctest::Approx(1800.0));
    CHECK(s.data_interval == doctest::Approx(60.0));
    CHECK(s.radio.tx_range == doctest::Approx(50.0));
    CHECK(s.radio.interference_range == doctest::Approx(100.0));
    CHECK_FALSE(s.mobility);
    CHECK(s.defense.mode == DefenseMode::None);
    CHECK(s.defense.beta == 10);
    CHECK(s.replications == 10);
}

TEST_CASE("comments and blank lines are ignored") {
    Scenario s = parse_scenario_text(
        "# reference setup\n"
        "\n"
        "mobility = on   # mobile variant\n"
        "replay_interval = 3\n");
    CHECK(s.mobility);
    CHECK(s.replay_interval == doctest::Approx(3.0));  // off-sweep values allowed
}

TEST_CASE("unknown keys fail with the line number") {
    try {
        parse_scenario_text("arena = 150\nspeed = 7\n");
        FAIL("expected a parse error");
    } catch (const ScenarioError& e) {
        std::string msg = e.what();
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("speed") != std::string::npos);
    }
}

TEST_CASE("malformed numbers fail with the line number") {
    try {
        parse_scenario_text("duration = soon\n");
        FAIL("expected a parse error");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("more attackers than clients is rejected") {
    // 15 clients by default; parsing validates the assembled scenario
    CHECK_THROWS_AS(parse_scenario_text("attackers = 20\n"), ScenarioError);
}

TEST_CASE("speed envelope outside 1-2 m/s is rejected") {
    CHECK_THROWS_AS(parse_scenario_text("speed_max = 5\n"), ScenarioError);
}

TEST_CASE("paper matrix enumerates 13 static cells") {
    auto cells = paper_matrix(true, false);
    CHECK(cells.size() == 13);  // 1 no-attack + 3 defenses x 4 intervals
    int reference_rows = 0;
    for (const auto& c : cells) reference_rows += !c.attack;
    CHECK(reference_rows == 1);
}

TEST_CASE("full matrix spans static and mobile") {
    auto cells = paper_matrix(true, true);
    CHECK(cells.size() == 26);
}

TEST_CASE("cell specs round-trip through their names") {
    MatrixCell c = parse_cell_spec("limsd,static,1s");
    CHECK(c.defense == DefenseMode::LiMsd);
    CHECK_FALSE(c.mobile);
    CHECK(c.attack);
    CHECK(c.replay_interval == doctest::Approx(1.0));
    MatrixCell round = parse_cell_spec("secrpl,mobile,8s");
    CHECK(round.defense == DefenseMode::SecRpl);
    CHECK(round.mobile);
    CHECK(round.replay_interval == doctest::Approx(8.0));
}

TEST_CASE("bad cell specs are rejected") {
    CHECK_THROWS_AS(parse_cell_spec("fortress,static,1s"), ScenarioError);
    CHECK_THROWS_AS(parse_cell_spec("limsd,undersea,1s"), ScenarioError);
}

TEST_CASE("applying a cell overrides defense, mobility, and interval") {
    Scenario base;
    MatrixCell c = parse_cell_spec("limsd,mobile,4s");
    Scenario s = apply_cell(base, c);
    CHECK(s.defense.mode == DefenseMode::LiMsd);
    CHECK(s.mobility);
    CHECK(s.attack_enabled);
    CHECK(s.replay_interval == doctest::Approx(4.0));
    MatrixCell ref{DefenseMode::None, false, false, 1.0};
    Scenario r = apply_cell(base, ref);
    CHECK_FALSE(r.attack_enabled);
}
