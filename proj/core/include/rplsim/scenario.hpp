#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rplsim/defense.hpp"
#include "rplsim/types.hpp"

namespace rplsim {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One complete experiment configuration. Defaults reproduce the reference
/// setup: 150 m arena, 15 clients + 1 server + 4 attackers, 1800 s, 60 s data
/// interval, UDGM radio, RWP mobility at 1-2 m/s when enabled.
struct Scenario {
    double arena = 150.0;
    int clients = 15;
    int servers = 1;
    int attackers = 4;
    bool mobility = false;
    double speed_min = 1.0;
    double speed_max = 2.0;
    double mobility_dt = 1.0;

    double replay_interval = 1.0;
    double attack_start = 90.0;
    // When false the attacker-designate nodes stay ordinary clients; keeps
    // topology identical to attack cells on matched seeds.
    bool attack_enabled = true;

    DefenseConfig defense;

    RadioModel radio;
    Mop mop = Mop::Storing;

    double data_interval = 60.0;
    int data_size = 30;

    double duration = 1800.0;
    int replications = 10;
    std::uint64_t base_seed = 1;

    bool trace = false;

    int total_nodes() const { return servers + clients + attackers; }
    void validate() const;
};

/// Parses the flat `key = value` scenario format (# comments). Unknown keys
/// and out-of-range values raise ScenarioError with the offending line.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text);

/// One cell of the experiment matrix.
struct MatrixCell {
    DefenseMode defense = DefenseMode::None;
    bool attack = false;  // false only for the reference RPL row
    bool mobile = false;
    double replay_interval = 1.0;

    std::string name() const;
};

/// Cross product {rpl, underattack, limsd, secrpl} x {1,2,4,8 s} for the
/// requested mobility settings; the RPL reference row carries no interval.
std::vector<MatrixCell> paper_matrix(bool include_static, bool include_mobile,
                                     const std::vector<double>& intervals = {1, 2, 4, 8});

/// Parses "limsd,static,1s" style cell specs.
MatrixCell parse_cell_spec(const std::string& spec);

/// Applies a cell on top of a base scenario.
Scenario apply_cell(const Scenario& base, const MatrixCell& cell);

}  // namespace rplsim
