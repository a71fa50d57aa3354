#include "levyfp/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <memory>
#include <filesystem>
#include <sstream>
#include <thread>
#include <variant>

namespace levyfp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Calls task(i) for i in [0, n) on up to `workers` threads. Exceptions are
// collected per index and the lowest failing index is rethrown.
template <class Task>
void parallel_for(std::size_t n, int workers, Task task) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto k = static_cast<std::size_t>(std::max(1, workers));
    if (k == 1 || n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(k, n); ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

bool is_output_time(const ScenarioConfig& cfg, double t) {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
    if (close(t, cfg.t_final)) return true;
    return std::any_of(cfg.snapshots.begin(), cfg.snapshots.end(), [&](double s) { return close(t, s); });
}

std::string time_tag(double t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "p_t%.6f.csv", t);
    return buf;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(const char* spec, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv(kWorkersEnv)) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 1024));
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

RunResult execute(const ScenarioConfig& cfg) {
    RunResult r;
    r.op = cfg.build_operator();
    const auto ic = initial_condition(cfg, r.op.grid);
    FastWorkspace ws(r.op);
    const auto start = Clock::now();
    r.trajectory = run(r.op, ic, cfg.stepper(), ws);
    r.report = make_report(cfg, r.op, r.trajectory, seconds_since(start));
    for (const auto& f : r.trajectory.frames) {
        if (is_output_time(cfg, f.t)) r.outputs.push_back(to_snapshot(r.op, f));
    }
    return r;
}

std::vector<RunReport> cmd_run(const std::vector<ScenarioConfig>& cases, const std::string& out_dir, int workers) {
    std::vector<RunReport> reports(cases.size());
    parallel_for(cases.size(), workers, [&](std::size_t i) {
        const auto& cfg = cases[i];
        auto result = execute(cfg);
        const std::filesystem::path dir = std::filesystem::path(out_dir.empty() ? cfg.output_dir : out_dir) / cfg.name;
        for (const auto& s : result.outputs) {
            const auto path = (dir / time_tag(s.t)).string();
            write_snapshot_csv(path, s);
            result.report.files.push_back(path);
        }
        if (cfg.long_format) {
            const auto path = (dir / "p_long.csv").string();
            write_long_csv(path, result.outputs);
            result.report.files.push_back(path);
        }
        const auto report_path = (dir / "report.json").string();
        result.report.files.push_back(report_path);
        write_text_file(report_path, to_json(result.report));
        reports[i] = std::move(result.report);
    });
    return reports;
}

bool has_exact_solution(const ScenarioConfig& cfg) {
    const auto& p = cfg.params;
    return cfg.ic.kind == InitialKind::levy_exact && p.alpha == 0.5 && p.beta == 1.0 && p.epsilon == 1.0 &&
           p.sigma == 0.0 && std::holds_alternative<ZeroDrift>(cfg.drift.kind()) &&
           cfg.bc == BoundaryCondition::natural;
}

ConvergenceTable cmd_convergence(const ScenarioConfig& cfg, const std::vector<int>& J_list, int workers) {
    if (J_list.empty()) throw ConfigError("J", "convergence needs at least one resolution");
    if (!std::is_sorted(J_list.begin(), J_list.end())) throw ConfigError("J", "resolutions must be ascending");

    const bool exact = has_exact_solution(cfg);
    std::vector<ScenarioConfig> runs;
    for (int J : J_list) {
        ScenarioConfig c = cfg;
        c.J = J;
        c.snapshots.clear();
        runs.push_back(std::move(c));
    }
    if (!exact) {
        ScenarioConfig ref = cfg;
        ref.J = 4 * J_list.back();
        ref.snapshots.clear();
        runs.push_back(std::move(ref));
    }
    for (auto& c : runs) c.stepper().validate();

    std::vector<Snapshot> finals(runs.size());
    std::vector<double> secs(runs.size());
    parallel_for(runs.size(), workers, [&](std::size_t i) {
        const auto start = Clock::now();
        auto r = execute(runs[i]);
        secs[i] = seconds_since(start);
        finals[i] = to_snapshot(r.op, r.trajectory.final_frame());
    });

    ConvergenceTable table;
    table.t_compare = exact ? cfg.ic.t0 + cfg.t_final : cfg.t_final;
    table.reference = exact ? "exact" : "self J=" + std::to_string(runs.back().J);
    const double t_exact = table.t_compare;
    for (std::size_t i = 0; i < J_list.size(); ++i) {
        ErrorNorms e = exact ? error_norms(finals[i], [t_exact](double x) { return exact_levy_density(x, t_exact); },
                                           cfg.error_window)
                             : error_norms(finals[i], finals.back(), cfg.error_window);
        ConvergenceRow row;
        row.J = J_list[i];
        row.h = 1.0 / J_list[i];
        row.sup_error = e.sup_error;
        row.l1_error = e.l1_error;
        row.seconds = secs[i];
        if (i > 0) row.sup_ratio = table.rows.back().sup_error / e.sup_error;
        table.rows.push_back(row);
    }
    table.monotone = true;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        if (!(table.rows[i].sup_error < table.rows[i - 1].sup_error)) table.monotone = false;
    }
    return table;
}

std::vector<BenchRow> cmd_bench(const ScenarioConfig& cfg, const std::vector<int>& J_list,
                                const std::vector<ApplyMode>& modes, int steps, int rounds) {
    if (!std::is_sorted(J_list.begin(), J_list.end())) throw ConfigError("J", "bench resolutions must be ascending");
    if (steps < 1 || rounds < 1) throw ConfigError("", "bench needs at least one step and one round");

    struct Case {
        ScenarioConfig cfg;
        DiscreteOperator op;
        std::vector<double> v;
        std::unique_ptr<BackwardEulerSolver> solver;
        FastWorkspace ws;
        std::vector<double> step_times, apply_times;
        long iterations = 0;
    };
    // solvers keep a pointer to their operator, so cases must not move
    std::vector<std::unique_ptr<Case>> cases;
    std::vector<BenchRow> rows;
    for (ApplyMode mode : modes) {
        for (int J : J_list) {
            auto owned = std::make_unique<Case>();
            Case& c = *owned;
            c.cfg = cfg;
            c.cfg.J = J;
            c.cfg.mode = mode;
            c.cfg.snapshots.clear();
            c.cfg.stepper().validate();
            c.op = c.cfg.build_operator();
            c.v = initial_condition(c.cfg, c.op.grid);
            c.solver = std::make_unique<BackwardEulerSolver>(c.op, c.cfg.resolved_dt(), c.cfg.solver, mode);
            c.ws.bind(c.op);
            cases.push_back(std::move(owned));
            BenchRow row;
            row.J = J;
            row.mode = mode;
            rows.push_back(row);
        }
    }

    std::vector<double> out;
    for (int round = 0; round < rounds; ++round) {
        for (auto& owned : cases) {
            Case& c = *owned;
            out.resize(c.op.size());
            for (int k = 0; k < steps; ++k) {
                auto start = Clock::now();
                c.v = c.solver->solve(c.v);
                c.step_times.push_back(seconds_since(start));
                c.iterations += c.solver->last_iterations();
                start = Clock::now();
                apply_a(c.op, c.v, out, c.ws, c.cfg.mode);
                c.apply_times.push_back(seconds_since(start));
            }
        }
    }

    for (std::size_t i = 0; i < cases.size(); ++i) {
        auto& row = rows[i];
        const auto& c = *cases[i];
        row.median_step_seconds = median(c.step_times);
        row.median_apply_seconds = median(c.apply_times);
        row.projected_run_seconds = row.median_step_seconds * static_cast<double>(c.cfg.stepper().steps());
        row.mean_iterations = static_cast<double>(c.iterations) / static_cast<double>(c.step_times.size());
        if (i > 0 && rows[i - 1].mode == row.mode) {
            row.step_ratio = row.median_step_seconds / rows[i - 1].median_step_seconds;
            row.apply_ratio = row.median_apply_seconds / rows[i - 1].median_apply_seconds;
        }
    }
    return rows;
}

CheckResult cmd_check(const ScenarioConfig& cfg) {
    CheckResult r;
    const auto op = cfg.build_operator();
    r.condition = check_max_principle_condition(op);
    r.min_exit_rate = min_exit_rate(cfg.params);
    r.min_fprime = INFINITY;
    for (std::size_t i = 0; i < op.size(); ++i) {
        r.min_fprime = std::min(r.min_fprime, cfg.drift.fprime(cfg.params.b * op.grid.node(op.grid.index_to_node(i))));
    }
    return r;
}

std::string format_convergence(const ConvergenceTable& t) {
    std::ostringstream o;
    o << "reference: " << t.reference << ", t = " << fmt("%g", t.t_compare) << "\n";
    o << "       J           h     sup_error      l1_error   ratio   seconds\n";
    for (const auto& r : t.rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%8d  %10.3e  %12.5e  %12.5e  %6s  %8.2f\n", r.J, r.h, r.sup_error,
                      r.l1_error, r.sup_ratio > 0.0 ? fmt("%.3f", r.sup_ratio).c_str() : "-", r.seconds);
        o << line;
    }
    o << "monotone: " << (t.monotone ? "yes" : "no") << "\n";
    return o.str();
}

std::string format_bench(const std::vector<BenchRow>& rows) {
    std::ostringstream o;
    o << "   mode        J   step_s(med)  apply_s(med)  run_s(proj)  iters  step_ratio  apply_ratio\n";
    for (const auto& r : rows) {
        char line[200];
        std::snprintf(line, sizeof line, "%7s  %7d  %12.4e  %12.4e  %11.3f  %5.2f  %10s  %11s\n", to_string(r.mode), r.J,
                      r.median_step_seconds, r.median_apply_seconds, r.projected_run_seconds, r.mean_iterations,
                      r.step_ratio > 0.0 ? fmt("%.3f", r.step_ratio).c_str() : "-",
                      r.apply_ratio > 0.0 ? fmt("%.3f", r.apply_ratio).c_str() : "-");
        o << line;
    }
    return o.str();
}

std::string convergence_csv(const ConvergenceTable& t) {
    std::ostringstream o;
    o << "J,h,sup_error,l1_error,sup_ratio,seconds\n";
    for (const auto& r : t.rows) {
        o << r.J << ',' << format_double(r.h) << ',' << format_double(r.sup_error) << ',' << format_double(r.l1_error)
          << ',' << format_double(r.sup_ratio) << ',' << format_double(r.seconds) << '\n';
    }
    return o.str();
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream o;
    o << "mode,J,median_step_seconds,median_apply_seconds,projected_run_seconds,mean_iterations,step_ratio,apply_ratio\n";
    for (const auto& r : rows) {
        o << to_string(r.mode) << ',' << r.J << ',' << format_double(r.median_step_seconds) << ','
          << format_double(r.median_apply_seconds) << ',' << format_double(r.projected_run_seconds) << ','
          << format_double(r.mean_iterations) << ',' << format_double(r.step_ratio) << ','
          << format_double(r.apply_ratio) << '\n';
    }
    return o.str();
}

}  // namespace levyfp
