#include "rplsim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rplsim {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string();
}

std::optional<double> row_metric(const RunRow& r, const std::string& name) {
    if (name == "pdr") return r.pdr;
    if (name == "plr") return r.plr;
    if (name == "ae2ed") return r.ae2ed;
    if (name == "apc") return r.apc;
    if (name == "fpr") return r.fpr;
    throw std::logic_error("unknown metric column: " + name);
}

void set_row_metric(RunRow& r, const std::string& name, std::optional<double> v) {
    if (name == "pdr") r.pdr = v;
    else if (name == "plr") r.plr = v;
    else if (name == "ae2ed") r.ae2ed = v;
    else if (name == "apc") r.apc = v;
    else if (name == "fpr") r.fpr = v;
    else throw std::runtime_error("runs.csv: unknown metric '" + name + "'");
}

MatrixCell parse_cell_name(const std::string& name) {
    MatrixCell cell;
    std::vector<std::string> parts;
    std::string cur;
    for (char c : name) {
        if (c == '/') {
            parts.push_back(cur);
            cur.clear();
        } else cur += c;
    }
    parts.push_back(cur);
    if (parts.size() < 2) throw std::runtime_error("bad cell name: " + name);
    cell.mobile = parts[0] == "mobile";
    const std::string& d = parts[1];
    if (d == "rpl") { cell.attack = false; cell.defense = DefenseMode::None; }
    else if (d == "underattack") { cell.attack = true; cell.defense = DefenseMode::None; }
    else if (d == "limsd") { cell.attack = true; cell.defense = DefenseMode::LiMsd; }
    else if (d == "secrpl") { cell.attack = true; cell.defense = DefenseMode::SecRpl; }
    else throw std::runtime_error("bad cell name: " + name);
    if (cell.attack) {
        if (parts.size() != 3) throw std::runtime_error("bad cell name: " + name);
        std::string iv = parts[2];
        if (!iv.empty() && iv.back() == 's') iv.pop_back();
        cell.replay_interval = std::stod(iv);
    }
    return cell;
}

struct SeriesKey {
    bool attack = false;
    DefenseMode defense = DefenseMode::None;
    const char* label = "rpl";
};

const std::vector<SeriesKey>& series_order() {
    static const std::vector<SeriesKey> order = {
        {false, DefenseMode::None, "rpl"},
        {true, DefenseMode::None, "underattack"},
        {true, DefenseMode::LiMsd, "limsd"},
        {true, DefenseMode::SecRpl, "secrpl"},
    };
    return order;
}

AggregateStats cell_stats(const MatrixResult& result, const MatrixCell& cell,
                          const std::string& metric, bool* found = nullptr) {
    std::vector<double> values;
    bool present = false;
    const std::string name = cell.name();
    for (const auto& r : result.rows) {
        if (r.cell != name) continue;
        present = true;
        if (auto v = row_metric(r, metric)) values.push_back(*v);
    }
    if (found) *found = present && !values.empty();
    return aggregate(values);
}

std::vector<double> intervals_present(const MatrixResult& result, bool mobile) {
    std::vector<double> ivs;
    for (const auto& c : result.cells) {
        if (c.mobile != mobile || !c.attack) continue;
        if (std::find(ivs.begin(), ivs.end(), c.replay_interval) == ivs.end())
            ivs.push_back(c.replay_interval);
    }
    std::sort(ivs.begin(), ivs.end());
    return ivs;
}

bool mobility_present(const MatrixResult& result, bool mobile) {
    for (const auto& c : result.cells)
        if (c.mobile == mobile) return true;
    return false;
}

}  // namespace

const std::vector<std::string>& report_metric_names() {
    static const std::vector<std::string> names = {"pdr", "plr", "ae2ed", "apc", "fpr"};
    return names;
}

void write_runs_csv(std::ostream& out, const MatrixResult& result) {
    out << "cell,rep,seed,metric,value\n";
    for (const auto& r : result.rows)
        for (const auto& m : report_metric_names())
            out << r.cell << ',' << r.rep << ',' << r.seed << ',' << m << ','
                << fmt_opt(row_metric(r, m)) << '\n';
}

void write_summary_csv(std::ostream& out, const MatrixResult& result) {
    out << "cell,metric,mean,ci95,reps\n";
    for (const auto& cell : result.cells) {
        const std::string name = cell.name();
        for (const auto& m : report_metric_names()) {
            bool found = false;
            AggregateStats st = cell_stats(result, cell, m, &found);
            out << name << ',' << m << ',';
            if (found) out << fmt(st.mean);
            out << ',';
            if (st.ci95_halfwidth) out << fmt(*st.ci95_halfwidth);
            out << ',' << st.samples << '\n';
        }
    }
}

void write_figure_files(const std::string& dir, const MatrixResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (bool mobile : {false, true}) {
        if (!mobility_present(result, mobile)) continue;
        const std::vector<double> ivs = intervals_present(result, mobile);
        for (const auto& metric : report_metric_names()) {
            const std::string path = dir + "/" + metric + "_" +
                                     (mobile ? "mobile" : "static") + ".dat";
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot write " + path);
            out << "# replay_interval";
            for (const auto& s : series_order())
                out << ' ' << s.label << "_mean " << s.label << "_ci";
            out << '\n';
            for (double iv : ivs) {
                out << fmt(iv);
                for (const auto& s : series_order()) {
                    MatrixCell cell{s.defense, s.attack, mobile,
                                    s.attack ? iv : 0.0};
                    bool found = false;
                    AggregateStats st = cell_stats(result, cell, metric, &found);
                    if (!found) {
                        out << " - -";  // gap, not zero
                        continue;
                    }
                    out << ' ' << fmt(st.mean) << ' '
                        << (st.ci95_halfwidth ? fmt(*st.ci95_halfwidth)
                                              : std::string("-"));
                }
                out << '\n';
            }
        }
    }
}

std::string comparison_table(const MatrixResult& result) {
    std::ostringstream out;
    auto entry = [&](const MatrixCell& cell, const std::string& metric) {
        bool found = false;
        AggregateStats st = cell_stats(result, cell, metric, &found);
        char buf[64];
        if (!found) return std::string("      -        ");
        if (st.ci95_halfwidth)
            std::snprintf(buf, sizeof buf, "%8.4f±%-6.4f", st.mean,
                          *st.ci95_halfwidth);
        else
            std::snprintf(buf, sizeof buf, "%8.4f       ", st.mean);
        return std::string(buf);
    };

    for (bool mobile : {false, true}) {
        if (!mobility_present(result, mobile)) continue;
        const std::vector<double> ivs = intervals_present(result, mobile);
        out << "== " << (mobile ? "mobile" : "static") << " scenario ==\n";
        for (const std::string metric : {"pdr", "ae2ed", "apc", "plr"}) {
            out << "\n" << metric << " (mean ± 95% CI half-width)\n";
            out << "interval    ";
            for (const auto& s : series_order()) {
                char buf[32];
                std::snprintf(buf, sizeof buf, " %-15s", s.label);
                out << buf;
            }
            out << '\n';
            for (double iv : ivs) {
                char head[16];
                std::snprintf(head, sizeof head, "%6.3gs     ", iv);
                out << head;
                for (const auto& s : series_order())
                    out << ' '
                        << entry(MatrixCell{s.defense, s.attack, mobile,
                                            s.attack ? iv : 0.0},
                                 metric);
                out << '\n';
            }
        }
        out << "\nfpr by defense (mean over replay intervals)\n";
        for (const auto& s : series_order()) {
            if (!s.attack) continue;
            std::vector<double> values;
            for (double iv : ivs) {
                MatrixCell cell{s.defense, true, mobile, iv};
                const std::string name = cell.name();
                for (const auto& r : result.rows)
                    if (r.cell == name && r.fpr) values.push_back(*r.fpr);
            }
            char buf[64];
            if (values.empty())
                std::snprintf(buf, sizeof buf, "%-12s       -\n", s.label);
            else
                std::snprintf(buf, sizeof buf, "%-12s %8.4f\n", s.label,
                              aggregate(values).mean);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

void write_all(const std::string& dir, const MatrixResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream out(dir + "/runs.csv");
        if (!out) throw std::runtime_error("cannot write " + dir + "/runs.csv");
        write_runs_csv(out, result);
    }
    {
        std::ofstream out(dir + "/summary.csv");
        if (!out) throw std::runtime_error("cannot write " + dir + "/summary.csv");
        write_summary_csv(out, result);
    }
    write_figure_files(dir, result);
    {
        std::ofstream out(dir + "/comparison.txt");
        if (!out) throw std::runtime_error("cannot write " + dir + "/comparison.txt");
        out << comparison_table(result);
    }
}

MatrixResult load_runs_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    MatrixResult result;
    std::string line;
    if (!std::getline(in, line) || line != "cell,rep,seed,metric,value")
        throw std::runtime_error("runs.csv: unexpected header in " + path);

    std::map<std::string, std::size_t> row_index;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cur;
        for (char c : line) {
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else cur += c;
        }
        f.push_back(cur);
        if (f.size() != 5)
            throw std::runtime_error("runs.csv line " + std::to_string(lineno) +
                                     ": expected 5 fields");
        const std::string key = f[0] + "#" + f[1];
        auto it = row_index.find(key);
        if (it == row_index.end()) {
            RunRow r;
            r.cell = f[0];
            r.rep = std::stoi(f[1]);
            r.seed = std::stoull(f[2]);
            it = row_index.emplace(key, result.rows.size()).first;
            result.rows.push_back(r);
            MatrixCell cell = parse_cell_name(f[0]);
            const std::string name = cell.name();
            bool known = false;
            for (const auto& c : result.cells)
                if (c.name() == name) known = true;
            if (!known) result.cells.push_back(cell);
        }
        std::optional<double> v;
        if (!f[4].empty()) v = std::stod(f[4]);
        set_row_metric(result.rows[it->second], f[3], v);
    }
    return result;
}

}  // namespace rplsim
