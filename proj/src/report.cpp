#include "levyfp/report.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace levyfp {

namespace {

std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory '" + parent.string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

double to_double(const std::string& s, const std::string& path, int line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw IoError(path + ":" + std::to_string(line) + ": not a number: '" + s + "'");
    }
    return v;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, ',')) {
        const auto a = item.find_first_not_of(" \t\r");
        const auto b = item.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? std::string() : item.substr(a, b - a + 1));
    }
    return out;
}

// "# t = <v>, b = <v>"
void parse_header(const std::string& line, Snapshot& s, const std::string& path) {
    for (const auto& part : split_commas(line.substr(1))) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) continue;
        auto key = part.substr(0, eq);
        key.erase(key.find_last_not_of(' ') + 1);
        key.erase(0, key.find_first_not_of(' '));
        auto value = part.substr(eq + 1);
        value.erase(0, value.find_first_not_of(' '));
        if (key == "t") s.t = to_double(value, path, 1);
        if (key == "b") s.b = to_double(value, path, 1);
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunReport make_report(const ScenarioConfig& cfg, const DiscreteOperator& op, const Trajectory& traj,
                      double total_seconds) {
    RunReport r;
    r.name = cfg.name;
    r.config = to_text(cfg);
    r.scheme = to_string(traj.scheme);
    r.positivity_preserving = traj.positivity_preserving;
    r.dt = cfg.resolved_dt();
    r.steps = static_cast<long>(traj.steps.size());
    for (const auto& f : traj.frames) {
        r.snapshots.push_back(SnapshotSummary{f.t, f.mass, f.min, f.max,
                                              op.params.b * op.grid.node(op.grid.index_to_node(f.argmax_index))});
    }
    for (const auto& s : traj.steps) {
        r.step_seconds.push_back(s.seconds);
        r.step_iterations.push_back(s.iterations);
    }
    r.total_seconds = total_seconds;
    const auto mp = check_max_principle_condition(op);
    r.max_principle_margin = mp.margin;
    r.max_principle_satisfied = mp.satisfied;
    r.global_min = traj.global_min();
    r.global_max = traj.global_max();

    r.warnings = cfg.warnings;
    if (r.global_min < -1e-12) {
        double t_first = 0.0;
        for (const auto& s : traj.steps) {
            if (s.min < -1e-12) {
                t_first = s.t;
                break;
            }
        }
        r.warnings.push_back("negative density: min = " + format_double(r.global_min) + " (first at t = " +
                             format_double(t_first) + ")");
    }
    if (op.bc == BoundaryCondition::absorbing && !traj.frames.empty()) {
        double prev = traj.frames.front().mass;
        for (const auto& s : traj.steps) {
            if (s.mass > prev + 1e-8) {
                r.warnings.push_back("mass increased from " + format_double(prev) + " to " + format_double(s.mass) +
                                     " at t = " + format_double(s.t) + " under the absorbing condition");
                break;
            }
            prev = s.mass;
        }
    }
    if (!mp.satisfied) {
        r.warnings.push_back("m2 is negative somewhere (margin " + format_double(mp.margin) +
                             "); the discrete maximum principle is not guaranteed");
    }
    return r;
}

std::string to_json(const RunReport& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["config"] = r.config;
    j["scheme"] = r.scheme;
    j["positivity_preserving"] = r.positivity_preserving;
    j["dt"] = r.dt;
    j["steps"] = r.steps;
    auto snaps = nlohmann::ordered_json::array();
    for (const auto& s : r.snapshots) {
        snaps.push_back({{"t", s.t}, {"mass", s.mass}, {"min", s.min}, {"max", s.max}, {"argmax_x", s.argmax_x}});
    }
    j["snapshots"] = std::move(snaps);
    j["max_principle"] = {{"margin", r.max_principle_margin}, {"satisfied", r.max_principle_satisfied}};
    j["global_min"] = r.global_min;
    j["global_max"] = r.global_max;
    j["total_seconds"] = r.total_seconds;
    j["step_seconds"] = r.step_seconds;
    j["step_iterations"] = r.step_iterations;
    j["warnings"] = r.warnings;
    j["files"] = r.files;
    return j.dump(2) + "\n";
}

void write_snapshot_csv(const std::string& path, const Snapshot& s) {
    auto out = open_out(path);
    out << "# t = " << format_double(s.t) << ", b = " << format_double(s.b) << "\n";
    out << "x,p\n";
    for (std::size_t i = 0; i < s.x_nodes.size(); ++i) {
        out << format_double(s.x_nodes[i]) << ',' << format_double(s.p_values[i]) << '\n';
    }
    finish(out, path);
}

Snapshot read_snapshot_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    Snapshot s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            parse_header(line, s, path);
            continue;
        }
        if (line == "x,p") continue;
        const auto f = split_commas(line);
        if (f.size() != 2) throw IoError(path + ":" + std::to_string(lineno) + ": expected 2 columns");
        s.x_nodes.push_back(to_double(f[0], path, lineno));
        s.p_values.push_back(to_double(f[1], path, lineno));
    }
    return s;
}

void write_long_csv(const std::string& path, const std::vector<Snapshot>& snapshots) {
    auto out = open_out(path);
    out << "# b = " << format_double(snapshots.empty() ? 1.0 : snapshots.front().b) << "\n";
    out << "t,x,p\n";
    for (const auto& s : snapshots) {
        const std::string t = format_double(s.t);
        for (std::size_t i = 0; i < s.x_nodes.size(); ++i) {
            out << t << ',' << format_double(s.x_nodes[i]) << ',' << format_double(s.p_values[i]) << '\n';
        }
    }
    finish(out, path);
}

std::vector<Snapshot> read_long_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<Snapshot> out;
    Snapshot header;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            parse_header(line, header, path);
            continue;
        }
        if (line == "t,x,p") continue;
        const auto f = split_commas(line);
        if (f.size() != 3) throw IoError(path + ":" + std::to_string(lineno) + ": expected 3 columns");
        const double t = to_double(f[0], path, lineno);
        if (out.empty() || out.back().t != t) {
            Snapshot s;
            s.t = t;
            s.b = header.b;
            out.push_back(std::move(s));
        }
        out.back().x_nodes.push_back(to_double(f[1], path, lineno));
        out.back().p_values.push_back(to_double(f[2], path, lineno));
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    finish(out, path);
}

}  // namespace levyfp
