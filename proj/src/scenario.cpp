#include "levyfp/scenario.hpp"

#include "levyfp/analysis.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace levyfp {

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line = 0;
};

struct Section {
    std::string label;
    std::vector<Entry> entries;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_real(const std::string& key, const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const double num = parse_real(key, trim(text.substr(0, slash)));
        const double den = parse_real(key, trim(text.substr(slash + 1)));
        if (den == 0.0) throw ConfigError(key, "division by zero in '" + text + "'");
        return num / den;
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError(key, "expected a real number, got '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& key, const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || v < INT32_MIN || v > INT32_MAX) {
        throw ConfigError(key, "expected an integer, got '" + text + "'");
    }
    return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
    if (text == "false" || text == "no" || text == "0" || text == "off") return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::string resolve_path(const std::string& base_dir, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    return path.lexically_normal().string();
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& key, const std::string& path,
                                                  std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw ConfigError(key, "cannot open '" + path + "'");
    std::vector<std::vector<double>> cols(columns);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_list(line);
        if (lineno == 1 && !fields.empty() && std::isalpha(static_cast<unsigned char>(fields[0][0]))) continue;
        if (fields.size() < columns) {
            throw ConfigError(key, path + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                                       " columns");
        }
        for (std::size_t c = 0; c < columns; ++c) cols[c].push_back(parse_real(key, fields[c]));
    }
    return cols;
}

DriftSpec parse_drift(const std::string& text, const std::string& base_dir) {
    if (text == "zero") return DriftSpec::zero();
    if (text.rfind("linear:", 0) == 0) return DriftSpec::linear(parse_real("drift", trim(text.substr(7))));
    if (text.rfind("table:", 0) == 0) {
        const auto path = resolve_path(base_dir, trim(text.substr(6)));
        auto cols = read_numeric_csv("drift", path, 3);
        try {
            return DriftSpec::tabulated(std::move(cols[0]), std::move(cols[1]), std::move(cols[2]));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("drift", e.what());
        }
    }
    throw ConfigError("drift", "expected zero, linear:<slope> or table:<path>, got '" + text + "'");
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string ic_name(InitialKind k) {
    switch (k) {
        case InitialKind::gaussian: return "gaussian";
        case InitialKind::uniform: return "uniform";
        case InitialKind::levy_exact: return "levy_exact";
        case InitialKind::file: return "file";
    }
    return "gaussian";
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' || c == '=';
        out.push_back(ok ? c : '_');
    }
    return out;
}

// Applies one key to the configuration being built.
void apply_key(ScenarioConfig& c, const std::string& key, const std::string& value, const std::string& base_dir) {
    auto& p = c.params;
    if (key == "name") {
        c.name = value;
    } else if (key == "description") {
        // free text, ignored
    } else if (key == "alpha") {
        p.alpha = parse_real(key, value);
    } else if (key == "beta") {
        p.beta = parse_real(key, value);
    } else if (key == "epsilon") {
        p.epsilon = parse_real(key, value);
    } else if (key == "sigma") {
        p.sigma = parse_real(key, value);
    } else if (key == "sigma2") {
        const double s2 = parse_real(key, value);
        if (s2 < 0.0) throw ConfigError(key, "must be >= 0");
        p.sigma = std::sqrt(s2);
    } else if (key == "b") {
        p.b = parse_real(key, value);
    } else if (key == "J") {
        c.J = parse_int(key, value);
    } else if (key == "dt") {
        if (value == "auto") {
            c.dt.reset();
        } else {
            c.dt = parse_real(key, value);
        }
    } else if (key == "t_final") {
        c.t_final = parse_real(key, value);
    } else if (key == "drift") {
        c.drift = parse_drift(value, base_dir);
        c.drift_text = value;
    } else if (key == "bc") {
        if (value == "absorbing") {
            c.bc = BoundaryCondition::absorbing;
        } else if (value == "natural") {
            c.bc = BoundaryCondition::natural;
        } else {
            throw ConfigError(key, "expected absorbing or natural, got '" + value + "'");
        }
    } else if (key == "ic") {
        if (value == "gaussian") {
            c.ic.kind = InitialKind::gaussian;
        } else if (value == "uniform") {
            c.ic.kind = InitialKind::uniform;
        } else if (value == "levy_exact") {
            c.ic.kind = InitialKind::levy_exact;
        } else if (value.rfind("file:", 0) == 0) {
            c.ic.kind = InitialKind::file;
            c.ic.path = resolve_path(base_dir, trim(value.substr(5)));
        } else {
            throw ConfigError(key, "expected gaussian, uniform, levy_exact or file:<path>, got '" + value + "'");
        }
    } else if (key == "ic.center") {
        c.ic.center = parse_real(key, value);
    } else if (key == "ic.rate") {
        c.ic.rate = parse_real(key, value);
    } else if (key == "ic.t0") {
        c.ic.t0 = parse_real(key, value);
    } else if (key == "scheme") {
        if (value == "backward_euler") {
            c.scheme = Scheme::backward_euler;
        } else if (value == "forward_euler") {
            c.scheme = Scheme::forward_euler;
        } else {
            throw ConfigError(key, "expected backward_euler or forward_euler, got '" + value + "'");
        }
    } else if (key == "solver") {
        if (value == "matrix_free") {
            c.solver.kind = LinearSolverKind::matrix_free;
        } else if (value == "dense_lu") {
            c.solver.kind = LinearSolverKind::dense_lu;
        } else {
            throw ConfigError(key, "expected matrix_free or dense_lu, got '" + value + "'");
        }
    } else if (key == "solver.tol") {
        c.solver.iterative.tol = parse_real(key, value);
    } else if (key == "solver.max_iter") {
        c.solver.iterative.max_iter = parse_int(key, value);
    } else if (key == "solver.restart") {
        c.solver.iterative.restart = parse_int(key, value);
    } else if (key == "solver.precondition") {
        c.solver.iterative.precondition = parse_bool(key, value);
    } else if (key == "mode") {
        if (value == "fast") {
            c.mode = ApplyMode::fast;
        } else if (value == "dense") {
            c.mode = ApplyMode::dense;
        } else {
            throw ConfigError(key, "expected fast or dense, got '" + value + "'");
        }
    } else if (key == "snapshots") {
        c.snapshots.clear();
        for (const auto& item : split_list(value)) c.snapshots.push_back(parse_real(key, item));
    } else if (key == "output.dir") {
        c.output_dir = value;
    } else if (key == "output.long") {
        c.long_format = parse_bool(key, value);
    } else if (key == "error.window") {
        const auto items = split_list(value);
        if (items.size() != 2) throw ConfigError(key, "expected two values lo, hi");
        const double lo = parse_real(key, items[0]);
        const double hi = parse_real(key, items[1]);
        if (!(lo < hi)) throw ConfigError(key, "requires lo < hi");
        c.error_window = std::make_pair(lo, hi);
    } else {
        throw ConfigError(key, "unknown key");
    }
}

void validate(ScenarioConfig& c) {
    const auto& p = c.params;
    auto check = [](bool ok, const char* key, const std::string& what) {
        if (!ok) throw ConfigError(key, what);
    };
    check(p.alpha > 0.0 && p.alpha <= 2.0, "alpha", "must lie in (0, 2], got " + format_real(p.alpha));
    check(p.alpha < 2.0, "alpha",
          "alpha = 2 is not a Levy noise here; set epsilon = 0 and use sigma for the Gaussian case");
    check(p.beta >= -1.0 && p.beta <= 1.0, "beta", "must lie in [-1, 1], got " + format_real(p.beta));
    check(p.epsilon >= 0.0, "epsilon", "must be >= 0, got " + format_real(p.epsilon));
    check(p.sigma >= 0.0, "sigma", "must be >= 0, got " + format_real(p.sigma));
    check(p.b > 0.0, "b", "must be > 0, got " + format_real(p.b));
    check(c.J >= 4, "J", "must be >= 4, got " + std::to_string(c.J));
    check(!c.dt || *c.dt > 0.0, "dt", "must be > 0");
    check(c.t_final >= 0.0, "t_final", "must be >= 0");
    check(c.ic.rate > 0.0, "ic.rate", "must be > 0");
    check(c.ic.t0 > 0.0, "ic.t0", "must be > 0");
    check(c.solver.iterative.max_iter > 0, "solver.max_iter", "must be > 0");
    check(c.solver.iterative.restart > 0, "solver.restart", "must be > 0");
    for (double t : c.snapshots) {
        check(t >= 0.0 && t <= c.t_final * (1.0 + 1e-12), "snapshots",
              "time " + format_real(t) + " lies outside [0, t_final]");
    }
    try {
        c.stepper().validate();
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        const char* key = what.find("snapshot") != std::string::npos ? "snapshots"
                          : what.find("tol") != std::string::npos    ? "solver.tol"
                          : what.find("t_final") != std::string::npos ? "t_final"
                                                                      : "dt";
        throw ConfigError(key, what);
    }
    if (c.bc == BoundaryCondition::natural && p.epsilon > 0.0 && p.b < 5.0) {
        c.warnings.push_back("natural condition with b = " + format_real(p.b) +
                             " < 5: the truncated domain may not approximate the whole line");
    }
    if (c.scheme == Scheme::forward_euler) {
        c.warnings.push_back("forward Euler is not positivity-preserving");
    }
}

std::vector<Section> split_sections(const std::string& text) {
    std::vector<Section> sections(1);
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ConfigError("", "line " + std::to_string(lineno) + ": malformed section header '" + line + "'");
            }
            sections.push_back(Section{trim(line.substr(1, line.size() - 2)), {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("", "line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
        }
        Entry e{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};
        if (e.key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
        sections.back().entries.push_back(std::move(e));
    }
    return sections;
}

}  // namespace

StepperConfig ScenarioConfig::stepper() const {
    StepperConfig s;
    s.scheme = scheme;
    s.dt = resolved_dt();
    s.t_final = t_final;
    s.solver = solver;
    s.mode = mode;
    s.snapshot_times = snapshots;
    return s;
}

DiscreteOperator ScenarioConfig::build_operator() const { return assemble(grid(), params, drift, bc); }

std::vector<ScenarioConfig> parse_scenarios(const std::string& text, const std::string& base_dir) {
    const auto sections = split_sections(text);
    std::vector<Section> variants;
    if (sections.size() == 1) {
        variants.push_back(sections[0]);
    } else {
        for (std::size_t i = 1; i < sections.size(); ++i) {
            Section v{sections[i].label, sections[0].entries};
            v.entries.insert(v.entries.end(), sections[i].entries.begin(), sections[i].entries.end());
            variants.push_back(std::move(v));
        }
    }

    std::vector<ScenarioConfig> out;
    for (const auto& v : variants) {
        std::vector<Entry> fixed;
        std::vector<std::pair<std::string, std::vector<std::string>>> sweeps;
        for (const auto& e : v.entries) {
            if (e.key.rfind("sweep.", 0) == 0) {
                const auto key = e.key.substr(6);
                auto values = split_list(e.value);
                if (values.empty()) throw ConfigError(e.key, "empty sweep");
                auto it = std::find_if(sweeps.begin(), sweeps.end(), [&](const auto& s) { return s.first == key; });
                if (it != sweeps.end()) {
                    it->second = std::move(values);
                } else {
                    sweeps.emplace_back(key, std::move(values));
                }
            } else {
                fixed.push_back(e);
            }
        }

        std::vector<std::size_t> counter(sweeps.size(), 0);
        while (true) {
            ScenarioConfig c;
            for (const auto& e : fixed) apply_key(c, e.key, e.value, base_dir);
            std::string name = c.name;
            if (!v.label.empty()) name += "_" + v.label;
            for (std::size_t s = 0; s < sweeps.size(); ++s) {
                const auto& value = sweeps[s].second[counter[s]];
                apply_key(c, sweeps[s].first, value, base_dir);
                name += "_" + sweeps[s].first + "=" + value;
            }
            c.name = sanitize(name);
            validate(c);
            out.push_back(std::move(c));

            std::size_t s = 0;
            for (; s < sweeps.size(); ++s) {
                if (++counter[s] < sweeps[s].second.size()) break;
                counter[s] = 0;
            }
            if (s == sweeps.size()) break;
        }
    }
    return out;
}

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
    auto all = parse_scenarios(text, base_dir);
    if (all.size() != 1) {
        throw ConfigError("", "document describes " + std::to_string(all.size()) + " runs, expected one");
    }
    return std::move(all.front());
}

std::vector<ScenarioConfig> load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse_scenarios(buf.str(), dir.empty() ? "." : dir);
}

std::string to_text(const ScenarioConfig& c) {
    std::ostringstream o;
    o << "name = " << c.name << '\n';
    o << "alpha = " << format_real(c.params.alpha) << '\n';
    o << "beta = " << format_real(c.params.beta) << '\n';
    o << "epsilon = " << format_real(c.params.epsilon) << '\n';
    o << "sigma = " << format_real(c.params.sigma) << '\n';
    o << "b = " << format_real(c.params.b) << '\n';
    o << "J = " << c.J << '\n';
    o << "dt = " << (c.dt ? format_real(*c.dt) : std::string("auto")) << '\n';
    o << "t_final = " << format_real(c.t_final) << '\n';
    o << "drift = " << c.drift_text << '\n';
    o << "bc = " << to_string(c.bc) << '\n';
    o << "ic = " << (c.ic.kind == InitialKind::file ? "file:" + c.ic.path : ic_name(c.ic.kind)) << '\n';
    o << "ic.center = " << format_real(c.ic.center) << '\n';
    o << "ic.rate = " << format_real(c.ic.rate) << '\n';
    o << "ic.t0 = " << format_real(c.ic.t0) << '\n';
    o << "scheme = " << to_string(c.scheme) << '\n';
    o << "solver = " << to_string(c.solver.kind) << '\n';
    o << "solver.tol = " << format_real(c.solver.iterative.tol) << '\n';
    o << "solver.max_iter = " << c.solver.iterative.max_iter << '\n';
    o << "solver.restart = " << c.solver.iterative.restart << '\n';
    o << "solver.precondition = " << (c.solver.iterative.precondition ? "true" : "false") << '\n';
    o << "mode = " << to_string(c.mode) << '\n';
    o << "snapshots = ";
    for (std::size_t i = 0; i < c.snapshots.size(); ++i) o << (i ? ", " : "") << format_real(c.snapshots[i]);
    o << '\n';
    o << "output.dir = " << c.output_dir << '\n';
    o << "output.long = " << (c.long_format ? "true" : "false") << '\n';
    if (c.error_window) {
        o << "error.window = " << format_real(c.error_window->first) << ", " << format_real(c.error_window->second)
          << '\n';
    }
    return o.str();
}

std::vector<double> initial_condition(const ScenarioConfig& cfg, const Grid& grid) {
    const double b = cfg.params.b;
    std::vector<double> v(grid.size());
    std::vector<double> fx, fp;
    if (cfg.ic.kind == InitialKind::file) {
        auto cols = read_numeric_csv("ic", cfg.ic.path, 2);
        fx = std::move(cols[0]);
        fp = std::move(cols[1]);
        if (fx.size() < 2 || !std::is_sorted(fx.begin(), fx.end())) {
            throw ConfigError("ic", "'" + cfg.ic.path + "' needs at least two rows with increasing x");
        }
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = b * grid.node(grid.index_to_node(i));
        switch (cfg.ic.kind) {
            case InitialKind::gaussian: {
                const double d = x - cfg.ic.center;
                v[i] = std::sqrt(cfg.ic.rate / std::numbers::pi) * std::exp(-cfg.ic.rate * d * d);
                break;
            }
            case InitialKind::uniform:
                v[i] = 0.5 / b;
                break;
            case InitialKind::levy_exact:
                v[i] = exact_levy_density(x, cfg.ic.t0);
                break;
            case InitialKind::file: {
                if (x < fx.front() || x > fx.back()) {
                    v[i] = 0.0;
                    break;
                }
                const auto it = std::upper_bound(fx.begin(), fx.end(), x);
                const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - fx.begin()), fx.size() - 1);
                const double w = (x - fx[k - 1]) / (fx[k] - fx[k - 1]);
                v[i] = (1.0 - w) * fp[k - 1] + w * fp[k];
                break;
            }
        }
    }
    return v;
}

namespace {

const std::map<std::string, std::string>& recipes() {
    static const std::map<std::string, std::string> table = {
#include "levyfp_recipes.inc"
    };
    return table;
}

}  // namespace

std::vector<std::string> builtin_recipe_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : recipes()) names.push_back(k);
    return names;
}

std::optional<std::string> builtin_recipe(const std::string& name) {
    const auto it = recipes().find(name);
    if (it == recipes().end()) return std::nullopt;
    return it->second;
}

}  // namespace levyfp
