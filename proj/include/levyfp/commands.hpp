#pragma once

#include "levyfp/report.hpp"
#include "levyfp/scenario.hpp"

#include <string>
#include <vector>

namespace levyfp {

/// Environment variable that overrides the default worker count.
inline constexpr const char* kWorkersEnv = "LEVYFP_WORKERS";

/// requested > 0 wins; otherwise LEVYFP_WORKERS, otherwise the hardware
/// concurrency. Never less than 1.
[[nodiscard]] int resolve_workers(int requested = 0);

struct RunResult {
    DiscreteOperator op;
    Trajectory trajectory;
    RunReport report;
    /// Frames at the requested snapshot times and t_final, in physical coordinates.
    std::vector<Snapshot> outputs;
};

/// Assembles and integrates one run in memory.
[[nodiscard]] RunResult execute(const ScenarioConfig& cfg);

/// Runs every case on a pool of `workers` threads. Each case writes
///   <out>/<name>/p_t<time>.csv, <out>/<name>/p_long.csv (optional),
///   <out>/<name>/report.json
/// where <out> is out_dir, or the case's output.dir when out_dir is empty.
/// Errors are rethrown after all workers finish, first failing case first.
std::vector<RunReport> cmd_run(const std::vector<ScenarioConfig>& cases, const std::string& out_dir, int workers);

struct ConvergenceRow {
    int J = 0;
    double h = 0.0;
    double sup_error = 0.0;
    double l1_error = 0.0;
    double sup_ratio = 0.0;  ///< previous sup_error / this one; 0 on the first row
    double seconds = 0.0;
};

struct ConvergenceTable {
    std::string reference;  ///< "exact" or "self J=<J_ref>"
    double t_compare = 0.0; ///< physical time of the comparison
    std::vector<ConvergenceRow> rows;
    bool monotone = false;  ///< sup errors strictly decreasing
};

/// True when cfg is the skewed Levy verification problem, whose exact
/// density is known: alpha = 1/2, beta = 1, eps = 1, sigma = 0, f = 0,
/// natural condition, levy_exact initial condition.
[[nodiscard]] bool has_exact_solution(const ScenarioConfig& cfg);

/// Errors at t_final for each J (ascending). Against the exact density when
/// known, otherwise against a run with 4 max(J) nodes. The comparison window
/// is cfg.error_window. dt follows each J when cfg.dt is auto.
[[nodiscard]] ConvergenceTable cmd_convergence(const ScenarioConfig& cfg, const std::vector<int>& J_list,
                                               int workers);

struct BenchRow {
    int J = 0;
    ApplyMode mode = ApplyMode::fast;
    double median_step_seconds = 0.0;
    double median_apply_seconds = 0.0;
    double projected_run_seconds = 0.0;  ///< median step time times the steps to t_final
    double mean_iterations = 0.0;
    double step_ratio = 0.0;   ///< against the previous J in the same mode; 0 on the first
    double apply_ratio = 0.0;
};

/// Times `steps` backward-Euler steps (and as many operator applications) per
/// (J, mode), interleaved over `rounds` rounds; reports medians.
[[nodiscard]] std::vector<BenchRow> cmd_bench(const ScenarioConfig& cfg, const std::vector<int>& J_list,
                                              const std::vector<ApplyMode>& modes, int steps = 20, int rounds = 3);

struct CheckResult {
    MaxPrincipleCheck condition;
    double min_exit_rate = 0.0;
    double min_fprime = 0.0;  ///< min of f'(b s_j) over the nodes
};

[[nodiscard]] CheckResult cmd_check(const ScenarioConfig& cfg);

[[nodiscard]] std::string format_convergence(const ConvergenceTable& t);
[[nodiscard]] std::string format_bench(const std::vector<BenchRow>& rows);
[[nodiscard]] std::string convergence_csv(const ConvergenceTable& t);
[[nodiscard]] std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace levyfp
