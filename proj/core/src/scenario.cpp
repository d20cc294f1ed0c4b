#include "rplsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace rplsim {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ScenarioError("scenario line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
        return d;
    } catch (const ScenarioError&) {
        throw;
    } catch (...) {
        fail(line, "expected a number, got '" + v + "'");
    }
}

int to_int(const std::string& v, int line) {
    double d = to_double(v, line);
    int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) fail(line, "expected an integer, got '" + v + "'");
    return i;
}

bool to_bool(const std::string& v, int line) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    fail(line, "expected on/off, got '" + v + "'");
}

}  // namespace

void Scenario::validate() const {
    if (arena <= 0) throw ScenarioError("arena must be positive");
    if (clients < 0 || servers != 1) throw ScenarioError("exactly one server required");
    if (attackers < 0) throw ScenarioError("attackers must be non-negative");
    if (attackers > clients)
        throw ScenarioError("attackers exceed client pool");
    if (attackers > 0 && attack_start >= duration)
        throw ScenarioError("attack_start must precede end of run");
    if (replay_interval <= 0) throw ScenarioError("replay_interval must be positive");
    if (radio.tx_range <= 0 || radio.tx_range > radio.interference_range)
        throw ScenarioError("require 0 < tx_range <= interference_range");
    if (radio.rx_success < 0 || radio.rx_success > 1)
        throw ScenarioError("rx_success must be in [0,1]");
    if (defense.beta < 1) throw ScenarioError("beta must be >= 1");
    if (defense.activate_at < 0) throw ScenarioError("activate_at must be >= 0");
    if (speed_min < 1.0 || speed_max > 2.0 || speed_min > speed_max)
        throw ScenarioError("mobile speed must lie in [1,2] m/s");
    if (duration <= 0) throw ScenarioError("duration must be positive");
    if (replications < 1) throw ScenarioError("replications must be >= 1");
}

Scenario parse_scenario_text(const std::string& text) {
    Scenario s;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) fail(lineno, "expected 'key = value'");

        if (key == "arena") s.arena = to_double(val, lineno);
        else if (key == "clients") s.clients = to_int(val, lineno);
        else if (key == "servers") s.servers = to_int(val, lineno);
        else if (key == "attackers") s.attackers = to_int(val, lineno);
        else if (key == "mobility") s.mobility = to_bool(val, lineno);
        else if (key == "speed_min") s.speed_min = to_double(val, lineno);
        else if (key == "speed_max") s.speed_max = to_double(val, lineno);
        else if (key == "replay_interval") s.replay_interval = to_double(val, lineno);
        else if (key == "attack_start") s.attack_start = to_double(val, lineno);
        else if (key == "defense") {
            if (val == "none") s.defense.mode = DefenseMode::None;
            else if (val == "limsd") s.defense.mode = DefenseMode::LiMsd;
            else if (val == "secrpl") s.defense.mode = DefenseMode::SecRpl;
            else fail(lineno, "defense must be none|limsd|secrpl");
        }
        else if (key == "beta") s.defense.beta = to_int(val, lineno);
        else if (key == "secrpl_threshold") s.defense.secrpl_threshold = to_int(val, lineno);
        else if (key == "activate_at") s.defense.activate_at = to_double(val, lineno);
        else if (key == "reinit_period") s.defense.reinit_period = to_double(val, lineno);
        else if (key == "node_max") s.defense.node_max = to_int(val, lineno);
        else if (key == "tx_range") s.radio.tx_range = to_double(val, lineno);
        else if (key == "interference_range") s.radio.interference_range = to_double(val, lineno);
        else if (key == "rx_success") s.radio.rx_success = to_double(val, lineno);
        else if (key == "mop") {
            int m = to_int(val, lineno);
            if (m < 0 || m > 3) fail(lineno, "mop must be 0..3");
            s.mop = static_cast<Mop>(m);
        }
        else if (key == "data_interval") s.data_interval = to_double(val, lineno);
        else if (key == "data_size") s.data_size = to_int(val, lineno);
        else if (key == "duration") s.duration = to_double(val, lineno);
        else if (key == "replications") s.replications = to_int(val, lineno);
        else if (key == "base_seed") s.base_seed = static_cast<std::uint64_t>(to_double(val, lineno));
        else fail(lineno, "unknown key '" + key + "'");
    }

    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_scenario_text(ss.str());
}

std::string MatrixCell::name() const {
    std::string n = mobile ? "mobile/" : "static/";
    if (!attack) return n + "rpl";
    switch (defense) {
        case DefenseMode::None: n += "underattack"; break;
        case DefenseMode::LiMsd: n += "limsd"; break;
        case DefenseMode::SecRpl: n += "secrpl"; break;
    }
    std::ostringstream ss;
    ss << n << "/" << replay_interval << "s";
    return ss.str();
}

std::vector<MatrixCell> paper_matrix(bool include_static, bool include_mobile,
                                     const std::vector<double>& intervals) {
    std::vector<MatrixCell> cells;
    std::vector<bool> mobilities;
    if (include_static) mobilities.push_back(false);
    if (include_mobile) mobilities.push_back(true);
    for (bool mobile : mobilities) {
        cells.push_back(MatrixCell{DefenseMode::None, false, mobile, 0.0});
        for (DefenseMode d : {DefenseMode::None, DefenseMode::LiMsd, DefenseMode::SecRpl})
            for (double iv : intervals)
                cells.push_back(MatrixCell{d, true, mobile, iv});
    }
    return cells;
}

MatrixCell parse_cell_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ',') {
            parts.push_back(trim(cur));
            cur.clear();
        } else cur += c;
    }
    parts.push_back(trim(cur));
    if (parts.size() != 2 && parts.size() != 3)
        throw ScenarioError("cell spec must be 'defense,mobility[,interval]'");

    MatrixCell cell;
    const std::string& d = parts[0];
    if (d == "rpl") { cell.attack = false; cell.defense = DefenseMode::None; }
    else if (d == "underattack") { cell.attack = true; cell.defense = DefenseMode::None; }
    else if (d == "limsd") { cell.attack = true; cell.defense = DefenseMode::LiMsd; }
    else if (d == "secrpl") { cell.attack = true; cell.defense = DefenseMode::SecRpl; }
    else throw ScenarioError("unknown defense '" + d + "' in cell spec");

    if (parts[1] == "static") cell.mobile = false;
    else if (parts[1] == "mobile") cell.mobile = true;
    else throw ScenarioError("mobility must be static|mobile in cell spec");

    if (cell.attack) {
        if (parts.size() != 3) throw ScenarioError("attack cells need an interval, e.g. '1s'");
        std::string iv = parts[2];
        if (!iv.empty() && iv.back() == 's') iv.pop_back();
        cell.replay_interval = std::stod(iv);
    }
    return cell;
}

Scenario apply_cell(const Scenario& base, const MatrixCell& cell) {
    Scenario s = base;
    s.mobility = cell.mobile;
    s.attack_enabled = cell.attack;
    if (cell.attack) {
        s.defense.mode = cell.defense;
        s.replay_interval = cell.replay_interval;
    } else {
        s.defense.mode = DefenseMode::None;
    }
    return s;
}

}  // namespace rplsim
